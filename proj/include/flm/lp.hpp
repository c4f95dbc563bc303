#ifndef FLM_LP_HPP
#define FLM_LP_HPP

#include <string>
#include <utility>
#include <vector>

#include "flm/instance.hpp"
#include "flm/matching.hpp"
#include "flm/ufl.hpp"

namespace flm {

// ---------------------------------------------------------------------------
// Generic dense LP: min c.x subject to linear constraints, x >= 0.
// ---------------------------------------------------------------------------

enum class Relation { le, eq, ge };

struct LinearProgram {
    struct Constraint {
        std::string name;
        std::vector<std::pair<int, double>> terms; // (variable, coefficient)
        Relation relation = Relation::le;
        double rhs = 0.0;
    };

    std::vector<std::string> var_names;
    std::vector<double> objective;
    std::vector<Constraint> constraints;

    int add_variable(const std::string& name, double obj_coeff) {
        var_names.push_back(name);
        objective.push_back(obj_coeff);
        return (int)var_names.size() - 1;
    }

    void add_constraint(const std::string& name, std::vector<std::pair<int, double>> terms,
                        Relation rel, double rhs) {
        constraints.push_back({name, std::move(terms), rel, rhs});
    }

    int n_vars() const { return (int)var_names.size(); }
};

struct LpSolution {
    std::vector<double> x; // a vertex of the constraint polyhedron
    double objective = 0.0;
};

// Two-phase revised simplex (dense basis inverse, Dantzig pricing with a
// Bland's-rule fallback against cycling). Throws infeasible_error with a
// certificate description, or an unboundedness error.
LpSolution solve_lp(const LinearProgram& lp);

// Textual LP interchange format (Minimize / Subject To / Bounds / End).
std::string lp_to_text(const LinearProgram& lp);

// ---------------------------------------------------------------------------
// LP_FLM
// ---------------------------------------------------------------------------

// Fractional FLM point: x row-major [facility][edge], y per facility.
struct FractionalFlm {
    int n_facilities = 0;
    int n_edges = 0;
    std::vector<double> x;
    std::vector<double> y;

    double x_at(int i, int e) const { return x[(std::size_t)i * n_edges + e]; }
    double& x_at(int i, int e) { return x[(std::size_t)i * n_edges + e]; }
};

// x_e = sum_i x_{i,e}, per edge
std::vector<double> flm_edge_marginals(const FractionalFlm& frac);

// x_{i,j} = sum_{e in delta(j)} x_{i,e}
double flm_client_mass(const FlmInstance& inst, const FractionalFlm& frac, int facility,
                       int client);

enum class LpFlmVariant {
    full,          // the relaxation used by the algorithms
    weakened_flow, // x_{i,e} <= y_i instead of the flow constraints (bad: unbounded gap)
    degree_only,   // degree equalities instead of the matching polytope (bad: unbounded gap)
};

struct LpFlmResult {
    FractionalFlm frac;
    double value = 0.0;
    double open_cost = 0.0;
    double conn_cost = 0.0;
    int cuts_added = 0;
    int nu = 0;
};

// Cutting-plane solve of LP_FLM: start from degree/size/flow constraints and
// add the most violated blossom inequality each round until separation finds
// none. Perfectly matchable instances use degree equalities and cut-form
// separation.
LpFlmResult solve_lp_flm(const FlmInstance& inst, LpFlmVariant variant = LpFlmVariant::full);

// (open(y), conn_FLM(x))
std::pair<double, double> flm_costs(const FlmInstance& inst, const FractionalFlm& frac);

// Client-level projection x_{i,j} (Lemma: feasible for LP_UFL on (F, V, f, d)
// when the compatibility graph is perfectly matchable, with equal cost).
UflFractional project_to_ufl(const FlmInstance& inst, const FractionalFlm& frac);

// Feasibility report for LP_FLM; empty when feasible within tol.
std::vector<std::string> check_lp_flm_feasible(const FlmInstance& inst, const FractionalFlm& frac,
                                               double tol = 1e-7);

} // namespace flm

#endif
