#ifndef FLM_ORACLE_HPP
#define FLM_ORACLE_HPP

#include <vector>

#include "flm/instance.hpp"
#include "flm/lp.hpp"
#include "flm/matching.hpp"

namespace flm {

struct ExactResult {
    double optimum = 0.0;
    FlmSolution optimal_solution;
    long long facility_subsets_evaluated = 0;
};

// Exact optimum by enumerating facility subsets; for fixed S the optimal
// matching is the minimum-cost maximum matching under edge costs d(S, e).
// Exponential only in |F| (default cap 16).
ExactResult exact_solve(const FlmInstance& inst, int facility_cap = 16);

// Every maximum matching, by exhaustive enumeration over all matchings.
// Independent of the blossom engine; |V| <= 12.
std::vector<Matching> brute_force_matchings(const Graph& g, int vertex_cap = 12);

// exact optimum / LP optimum, 1.0 for the 0/0 case.
double integrality_gap(const FlmInstance& inst, LpFlmVariant variant = LpFlmVariant::full,
                       int facility_cap = 16);

} // namespace flm

#endif
