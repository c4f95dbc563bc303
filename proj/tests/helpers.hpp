#ifndef FLM_TEST_HELPERS_HPP
#define FLM_TEST_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "flm/graph.hpp"
#include "flm/instance.hpp"
#include "flm/lp.hpp"
#include "flm/matching.hpp"
#include "flm/rng.hpp"
#include "flm/ufl.hpp"

namespace flm_test {

using namespace flm;

// Random simple graph with each edge present with probability p.
inline Graph random_graph(int n, double p, Rng& rng) {
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.bernoulli(p)) edges.push_back({u, v});
    return Graph(n, edges);
}

// Random graph guaranteed to be perfectly matchable: a hidden perfect
// matching plus random extra edges. n must be even.
inline Graph random_perfectly_matchable_graph(int n, double p, Rng& rng) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.next_below(i + 1)]);
    std::vector<Edge> edges;
    for (int t = 0; t < n; t += 2) edges.push_back(make_edge(perm[t], perm[t + 1]));
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.bernoulli(p)) edges.push_back({u, v});
    return Graph(n, edges);
}

// Instance on an integer grid with L1 distances: every distance, edge length
// and pair distance is an exactly representable small integer, so optimal
// matching costs compare exactly against enumeration.
inline FlmInstance random_grid_instance(int n_fac, int n_cli, double edge_p, Rng& rng,
                                        int grid = 20, bool force_perfect = false) {
    FlmInstance inst;
    inst.n_facilities = n_fac;
    inst.n_clients = n_cli;
    inst.facility_labels.assign(n_fac, "");
    inst.client_labels.assign(n_cli, "");
    const int n = n_fac + n_cli;
    std::vector<int> px(n), py(n);
    for (int a = 0; a < n; ++a) {
        px[a] = (int)rng.next_below(grid + 1);
        py[a] = (int)rng.next_below(grid + 1);
    }
    inst.opening_cost.resize(n_fac);
    for (int i = 0; i < n_fac; ++i) inst.opening_cost[i] = (double)rng.next_below(grid + 1);
    inst.metric.assign((std::size_t)n * n, 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            inst.metric[(std::size_t)a * n + b] =
                (double)(std::abs(px[a] - px[b]) + std::abs(py[a] - py[b]));
    inst.compat = force_perfect ? random_perfectly_matchable_graph(n_cli, edge_p, rng)
                                : random_graph(n_cli, edge_p, rng);
    return inst;
}

// Random Euclidean instance that is perfectly matchable (rejection over the
// generator's seed space, deterministic for a given base seed).
inline FlmInstance random_perfect_euclidean(int n_fac, int n_cli, double p, double box,
                                            std::uint64_t base_seed) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        FlmInstance inst = generate_euclidean(n_fac, n_cli, p, box, base_seed + 7919 * attempt);
        if (is_perfectly_matchable(inst.compat)) return inst;
    }
}

// Exhaustive UFL optimum: every nonempty open set, nearest-facility
// assignment. Independent of all library solvers.
inline double brute_force_ufl(const UflInstance& ufl) {
    double best = std::numeric_limits<double>::infinity();
    if (ufl.n_clients == 0) best = 0.0;
    for (unsigned long mask = 1; mask < (1UL << ufl.n_facilities); ++mask) {
        double cost = 0.0;
        for (int i = 0; i < ufl.n_facilities; ++i)
            if (mask & (1UL << i)) cost += ufl.opening_cost[i];
        for (int j = 0; j < ufl.n_clients; ++j) {
            double nearest = std::numeric_limits<double>::infinity();
            for (int i = 0; i < ufl.n_facilities; ++i)
                if (mask & (1UL << i)) nearest = std::min(nearest, ufl.cost(i, j));
            cost += nearest;
        }
        best = std::min(best, cost);
    }
    return best;
}

// UFL instance induced by an FLM instance's facility-client distances.
inline UflInstance client_ufl_of(const FlmInstance& inst) {
    UflInstance ufl;
    ufl.n_facilities = inst.n_facilities;
    ufl.n_clients = inst.n_clients;
    ufl.opening_cost = inst.opening_cost;
    ufl.assignment.resize((std::size_t)ufl.n_facilities * ufl.n_clients);
    for (int i = 0; i < ufl.n_facilities; ++i)
        for (int j = 0; j < ufl.n_clients; ++j) ufl.cost(i, j) = inst.dist_fc(i, j);
    return ufl;
}

// Optimal LP_UFL point via the dense simplex.
inline UflFractional solve_ufl_lp(const UflInstance& ufl) {
    LinearProgram lp;
    std::vector<int> yv(ufl.n_facilities);
    for (int i = 0; i < ufl.n_facilities; ++i)
        yv[i] = lp.add_variable("y_" + std::to_string(i), ufl.opening_cost[i]);
    std::vector<std::vector<int>> xv(ufl.n_facilities, std::vector<int>(ufl.n_clients));
    for (int i = 0; i < ufl.n_facilities; ++i)
        for (int j = 0; j < ufl.n_clients; ++j)
            xv[i][j] = lp.add_variable("x_" + std::to_string(i) + "_" + std::to_string(j),
                                       ufl.cost(i, j));
    for (int j = 0; j < ufl.n_clients; ++j) {
        std::vector<std::pair<int, double>> terms;
        for (int i = 0; i < ufl.n_facilities; ++i) terms.push_back({xv[i][j], 1.0});
        lp.add_constraint("assign_" + std::to_string(j), terms, Relation::eq, 1.0);
    }
    for (int i = 0; i < ufl.n_facilities; ++i)
        for (int j = 0; j < ufl.n_clients; ++j)
            lp.add_constraint("open_" + std::to_string(i) + "_" + std::to_string(j),
                              {{xv[i][j], 1.0}, {yv[i], -1.0}}, Relation::le, 0.0);
    LpSolution sol = solve_lp(lp);
    UflFractional frac;
    frac.n_facilities = ufl.n_facilities;
    frac.n_clients = ufl.n_clients;
    frac.x.resize((std::size_t)ufl.n_facilities * ufl.n_clients);
    frac.y.resize(ufl.n_facilities);
    for (int i = 0; i < ufl.n_facilities; ++i) {
        frac.y[i] = sol.x[yv[i]];
        for (int j = 0; j < ufl.n_clients; ++j) frac.x_at(i, j) = sol.x[xv[i][j]];
    }
    return frac;
}

// All matchings (not only maximum), for enumeration-side checks.
inline void all_matchings_rec(const Graph& g, int from, std::vector<char>& used, Matching& cur,
                              std::vector<Matching>& out) {
    out.push_back(cur);
    for (int id = from; id < g.edge_count(); ++id) {
        auto [u, v] = g.edges[id];
        if (used[u] || used[v]) continue;
        used[u] = used[v] = true;
        cur.push_back(id);
        all_matchings_rec(g, id + 1, used, cur, out);
        cur.pop_back();
        used[u] = used[v] = false;
    }
}

inline std::vector<Matching> all_matchings(const Graph& g) {
    std::vector<Matching> out;
    Matching cur;
    std::vector<char> used(g.n, false);
    all_matchings_rec(g, 0, used, cur, out);
    return out;
}

} // namespace flm_test

#endif
