#ifndef FLM_ROUNDING_HPP
#define FLM_ROUNDING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "flm/instance.hpp"
#include "flm/ufl.hpp"

namespace flm {

// Empty iff d(i,j) <= d(i,j') + d(i',j') + d(i',j) holds for all quadruples
// within 1e-9 (exhaustive at desk scale).
std::vector<std::string> validate_three_hop(const UflInstance& ufl);

// LP_UFL feasibility violations of frac (assignment sums, x <= y, sign).
std::vector<std::string> check_lp_ufl_feasible(const UflInstance& ufl, const UflFractional& frac,
                                               double tol = 1e-6);

enum class RoundingMode {
    randomized,            // the (lambda, 1 + 2/e^lambda) guarantee
    deterministic_fallback // reproducible smoke mode, no guarantee
};

// Cluster structure of one rounding run, for the structural backstop checks:
// every client reaches its cluster center's opened facility within three hops
// of close-region distances.
struct RoundingClusters {
    std::vector<int> center_of_client;   // cluster center per client (centers map to themselves)
    std::vector<double> close_radius;    // max distance inside the client's close region
    std::vector<int> center_facility;    // per client: the facility its center opened (-1 if
                                         // the client is not a center and mode is fallback)
};

// Scaling-and-clustering bifactor rounding: scale y by lambda (capped at 1),
// partition each client's facility mass into a nearest-first "close" region
// of mass exactly 1, greedily pick cluster centers by ascending average
// close-distance, open one close facility per center (probability equal to
// its mass) and every unclaimed fractional piece independently, then assign
// every client to its nearest open facility. Expected cost is bounded by
// lambda * open(y) + (1 + 2/e^lambda) * conn(x) for lambda >= 1.678.
UflSolution round_bifactor(const UflInstance& ufl, const UflFractional& frac, double lambda,
                           std::uint64_t seed, RoundingMode mode = RoundingMode::randomized,
                           RoundingClusters* clusters_out = nullptr);

// Meta-client UFL instance: clients are the matched pairs, assignment cost
// d'(i, e) = d(i, e); satisfies the three-hop inequality.
UflInstance build_meta_client_ufl(const FlmInstance& inst, const Matching& m);

// Canonical solution for a fixed open set: every client to its nearest open
// facility (ties by lowest index).
UflSolution assign_nearest_open(const UflInstance& ufl, std::vector<int> open_set);

} // namespace flm

#endif
