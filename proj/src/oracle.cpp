#include "flm/oracle.hpp"

#include <cmath>
#include <limits>

namespace flm {

ExactResult exact_solve(const FlmInstance& inst, int facility_cap) {
    if (inst.n_facilities > facility_cap)
        throw capability_error("exact solve capped at " + std::to_string(facility_cap) +
                               " facilities, instance has " + std::to_string(inst.n_facilities));
    ExactResult res;
    const int m = nu(inst.compat);
    if (m == 0) {
        res.optimal_solution = finalize_solution(inst, {}, {}, {});
        res.optimum = 0.0;
        res.facility_subsets_evaluated = 1;
        return res;
    }

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_open;
    Matching best_matching;

    for (unsigned long mask = 1; mask < (1UL << inst.n_facilities); ++mask) {
        ++res.facility_subsets_evaluated;
        std::vector<int> open;
        double open_cost = 0.0;
        for (int i = 0; i < inst.n_facilities; ++i)
            if (mask & (1UL << i)) {
                open.push_back(i);
                open_cost += inst.opening_cost[i];
            }
        if (open_cost >= best) continue; // matching cost is nonnegative

        std::vector<double> costs(inst.compat.edge_count());
        for (int e = 0; e < inst.compat.edge_count(); ++e)
            costs[e] = set_distance_pair(inst, open, inst.compat.edges[e]).first;
        Matching matching = min_cost_maximum_matching(inst.compat, costs);
        double total = open_cost + matching_cost(inst.compat, matching, costs);
        if (total < best) {
            best = total;
            best_open = open;
            best_matching = matching;
        }
    }

    std::vector<int> assignment;
    for (int id : best_matching)
        assignment.push_back(set_distance_pair(inst, best_open, inst.compat.edges[id]).second);
    res.optimal_solution = finalize_solution(inst, best_open, best_matching, assignment);
    res.optimum = res.optimal_solution.total();
    return res;
}

namespace {

void enumerate_matchings(const Graph& g, int edge_start, std::vector<char>& used,
                         Matching& current, std::vector<Matching>& all, std::size_t& best_size) {
    best_size = std::max(best_size, current.size());
    all.push_back(current);
    for (int id = edge_start; id < g.edge_count(); ++id) {
        auto [u, v] = g.edges[id];
        if (used[u] || used[v]) continue;
        used[u] = used[v] = true;
        current.push_back(id);
        enumerate_matchings(g, id + 1, used, current, all, best_size);
        current.pop_back();
        used[u] = used[v] = false;
    }
}

} // namespace

std::vector<Matching> brute_force_matchings(const Graph& g, int vertex_cap) {
    if (g.n > vertex_cap)
        throw capability_error("matching enumeration capped at " + std::to_string(vertex_cap) +
                               " vertices");
    std::vector<Matching> all;
    Matching current;
    std::vector<char> used(g.n, false);
    std::size_t best_size = 0;
    enumerate_matchings(g, 0, used, current, all, best_size);
    std::vector<Matching> maximum;
    for (auto& m : all)
        if (m.size() == best_size) maximum.push_back(m);
    return maximum;
}

double integrality_gap(const FlmInstance& inst, LpFlmVariant variant, int facility_cap) {
    ExactResult exact = exact_solve(inst, facility_cap);
    LpFlmResult lp = solve_lp_flm(inst, variant);
    if (exact.optimum == 0.0 && lp.value <= 1e-12) return 1.0;
    if (lp.value <= 1e-12)
        return std::numeric_limits<double>::infinity(); // bad relaxations can hit exactly this
    return exact.optimum / lp.value;
}

} // namespace flm
