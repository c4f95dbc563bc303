#ifndef FLM_PIPELINE_HPP
#define FLM_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flm/instance.hpp"
#include "flm/lp.hpp"
#include "flm/reroute.hpp"
#include "flm/rounding.hpp"

namespace flm {

enum class PipelineMode {
    general,        // LP + min-cost maximum matching + reroute + meta-client rounding
    perfect_reroute,// same with the perfect-matching reroute variant
    perfect_direct, // LP projection + client-level rounding + min-cost perfect matching
    automatic,      // perfect_direct when perfectly matchable, else general
};

std::string mode_name(PipelineMode mode);
PipelineMode mode_from_name(const std::string& name);

double default_lambda(PipelineMode mode);

// Theorem factor at a given lambda:
//   general:         max{2L, 3(1 + 2/e^L)}
//   perfect_reroute: max{L,  2(1 + 2/e^L)}
//   perfect_direct:  max{L,  2 + 2/e^L}
double guarantee_bound(PipelineMode mode, double lambda);

struct PipelineConfig {
    PipelineMode mode = PipelineMode::automatic;
    double lambda = 0.0; // 0 = default for the resolved mode
    std::uint64_t seed = 0;
    int trials = 1;               // best-of-k rounding repetitions
    bool verify_lemmas = true;    // runtime re-checks of the deterministic lemmas
};

struct PipelineReport {
    PipelineMode resolved_mode = PipelineMode::general;
    double lambda = 0.0;
    std::uint64_t seed = 0;
    int trials = 1;
    int nu = 0;

    FlmSolution solution; // best across trials
    double lp_value = 0.0;
    double lp_open = 0.0;
    double lp_conn = 0.0;
    int cuts = 0;
    double guarantee_bound = 0.0;
    double mean_cost = 0.0; // across trials
    std::vector<double> trial_costs;
    std::uint64_t best_seed = 0;

    std::optional<RerouteReport> reroute;
    double matching_d_cost = 0.0; // sum of d(e) over the computed matching

    double ms_lp = 0.0;
    double ms_matching = 0.0;
    double ms_reroute = 0.0;
    double ms_round = 0.0;
};

// Algorithm with an up-front matching: LP optimum, min-cost maximum (or
// perfect) matching M*, reroute onto M*, then bifactor rounding of the
// meta-client UFL instance.
PipelineReport solve_flm_main(const FlmInstance& inst, const PipelineConfig& cfg);

// Perfect-matchable pipeline: LP optimum, client-level projection, bifactor
// rounding for the open set, then a min-cost perfect matching under d(S, .).
PipelineReport solve_flm_perfect(const FlmInstance& inst, const PipelineConfig& cfg);

// Mode dispatch (resolves automatic).
PipelineReport solve_flm(const FlmInstance& inst, PipelineConfig cfg);

} // namespace flm

#endif
