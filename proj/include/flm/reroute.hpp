#ifndef FLM_REROUTE_HPP
#define FLM_REROUTE_HPP

#include <vector>

#include "flm/instance.hpp"
#include "flm/lp.hpp"
#include "flm/matching.hpp"

namespace flm {

struct RerouteTraceEntry {
    int iteration = 0;
    double epsilon = 0.0;
    int component_edges = 0;
    long long potential = 0; // after the iteration
};

struct RerouteReport {
    FractionalFlm output;      // x-tilde together with the scaled opening vector
    int iterations = 0;
    long long initial_potential = 0;
    long long final_potential = 0;
    double transfer_total = 0.0; // total mass moved off non-matching edges
    std::vector<RerouteTraceEntry> trace;
};

// Phi = (|E|+1) * #{(i,e') : e' off the target matching, x_{i,e'} > 1e-9}
//       + sum over supported matchings M' of |M' \ M|.
long long reroute_potential(const FlmInstance& inst, const FractionalFlm& x_tilde,
                            const MatchingDecomposition& gamma, const Matching& m);

// Algorithm: shift the assignment mass of every off-matching edge onto the
// next matching edge along an alternating path/cycle until the decomposition
// collapses onto M. Output opening vector is 2y; bounds (checked by tests):
// support in M, (x~, 2y) feasible, open doubled exactly,
// conn(x~) <= 2 conn(x) + sum_{e in M} d(e).
RerouteReport reroute_general(const FlmInstance& inst, const FractionalFlm& frac,
                              const Matching& m, bool verify_each_iteration = false);

// Perfectly matchable variant: components are alternating cycles and each
// decrement is split in half towards both adjacent matching edges. Output
// opening vector is y unchanged; conn(x~) <= conn(x) + sum_{e in M} d(e).
RerouteReport reroute_perfect(const FlmInstance& inst, const FractionalFlm& frac,
                              const Matching& m, bool verify_each_iteration = false);

} // namespace flm

#endif
