#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "flm/matching.hpp"
#include "flm/oracle.hpp"
#include "helpers.hpp"

using namespace flm;
using namespace flm_test;

namespace {

double enum_min_cost_max_matching(const Graph& g, const std::vector<double>& cost) {
    auto all = all_matchings(g);
    std::size_t best_size = 0;
    for (const auto& m : all) best_size = std::max(best_size, m.size());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& m : all) {
        if (m.size() != best_size) continue;
        double c = 0.0;
        for (int id : m) c += cost[id];
        best = std::min(best, c);
    }
    return best;
}

bool is_valid_matching(const Graph& g, const Matching& m) {
    std::set<int> used;
    for (int id : m) {
        auto [u, v] = g.edges[id];
        if (used.count(u) || used.count(v)) return false;
        used.insert(u);
        used.insert(v);
    }
    return true;
}

} // namespace

TEST_CASE("max cardinality matching on small named graphs") {
    Graph triangle(3, {{0, 1}, {1, 2}, {0, 2}});
    CHECK(nu(triangle) == 1);
    CHECK_FALSE(is_perfectly_matchable(triangle));

    Graph p4(4, {{0, 1}, {1, 2}, {2, 3}});
    CHECK(nu(p4) == 2);
    CHECK(is_perfectly_matchable(p4));

    Graph c4(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    CHECK(nu(c4) == 2);
    CHECK(is_perfectly_matchable(c4));

    Graph k6(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {1, 2}, {1, 3}, {1, 4}, {1, 5},
                 {2, 3}, {2, 4}, {2, 5}, {3, 4}, {3, 5}, {4, 5}});
    CHECK(nu(k6) == 3);
    CHECK(is_perfectly_matchable(k6));

    // Petersen-like blossom stress: odd cycles joined through a cut vertex
    Graph two_triangles(5, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {2, 4}});
    CHECK(nu(two_triangles) == 2);

    Graph empty(4, {});
    CHECK(nu(empty) == 0);
}

TEST_CASE("max cardinality matching equals enumeration on 500 random graphs") {
    Rng rng(20240601);
    for (int trial = 0; trial < 500; ++trial) {
        int n = 2 + (int)rng.next_below(9); // up to 10 vertices
        Graph g = random_graph(n, 0.15 + rng.next_double() * 0.7, rng);
        Matching m = max_cardinality_matching(g);
        REQUIRE(is_valid_matching(g, m));
        auto maximum = brute_force_matchings(g);
        REQUIRE(m.size() == maximum.front().size());
    }
}

TEST_CASE("min cost maximum matching: trivial cases") {
    Graph path(3, {{0, 1}, {1, 2}});
    std::vector<double> cost{1.0, 2.0};
    Matching m = min_cost_maximum_matching(path, cost);
    REQUIRE(m.size() == 1);
    CHECK(path.edges[m[0]] == Edge{0, 1});
    CHECK(matching_cost(path, m, cost) == 1.0);

    // all costs equal: any maximum matching, cost nu * c
    Graph c4(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    std::vector<double> flat{3.0, 3.0, 3.0, 3.0};
    Matching m2 = min_cost_maximum_matching(c4, flat);
    CHECK(m2.size() == 2);
    CHECK(matching_cost(c4, m2, flat) == doctest::Approx(6.0));
}

TEST_CASE("min cost maximum matching agrees with enumeration on 300 random weighted graphs") {
    Rng rng(777001);
    for (int trial = 0; trial < 300; ++trial) {
        int n = 2 + (int)rng.next_below(9);
        Graph g = random_graph(n, 0.2 + rng.next_double() * 0.7, rng);
        std::vector<double> cost(g.edge_count());
        for (double& c : cost) c = (double)rng.next_below(50); // exact integers
        Matching m = min_cost_maximum_matching(g, cost);
        REQUIRE(is_valid_matching(g, m));
        auto maximum = brute_force_matchings(g);
        REQUIRE(m.size() == maximum.front().size());
        CHECK(matching_cost(g, m, cost) == enum_min_cost_max_matching(g, cost));
    }
}

TEST_CASE("min cost perfect matching") {
    Graph single(2, {{0, 1}});
    CHECK(min_cost_perfect_matching(single, {5.0}) == Matching{0});

    // 4-cycle with alternating costs has exactly two perfect matchings
    Graph c4(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
    std::vector<double> cost(4);
    cost[c4.edge_id(0, 1)] = 1.0;
    cost[c4.edge_id(1, 2)] = 5.0;
    cost[c4.edge_id(2, 3)] = 1.0;
    cost[c4.edge_id(0, 3)] = 5.0;
    Matching m = min_cost_perfect_matching(c4, cost);
    CHECK(matching_cost(c4, m, cost) == 2.0);

    Graph triangle(3, {{0, 1}, {1, 2}, {0, 2}});
    CHECK_THROWS_AS(min_cost_perfect_matching(triangle, {1.0, 1.0, 1.0}), Error);
}

TEST_CASE("min cost perfect matching agrees with enumeration on 300 random graphs") {
    Rng rng(424242);
    int done = 0;
    while (done < 300) {
        int n = 2 * (1 + (int)rng.next_below(5)); // even, up to 10
        Graph g = random_perfectly_matchable_graph(n, 0.3 + rng.next_double() * 0.5, rng);
        std::vector<double> cost(g.edge_count());
        for (double& c : cost) c = (double)rng.next_below(50);
        Matching m = min_cost_perfect_matching(g, cost);
        REQUIRE(2 * (int)m.size() == g.n);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& cand : brute_force_matchings(g)) {
            if (2 * (int)cand.size() != g.n) continue;
            double c = 0.0;
            for (int id : cand) c += cost[id];
            best = std::min(best, c);
        }
        CHECK(matching_cost(g, m, cost) == best);
        ++done;
    }
}

TEST_CASE("symmetric difference components") {
    Graph g(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});

    SUBCASE("identical matchings give no components") {
        Matching m{g.edge_id(0, 1)};
        CHECK(symmetric_difference_components(g, m, m).empty());
    }

    SUBCASE("one alternating path") {
        Matching m{g.edge_id(0, 1)};
        Matching mp{g.edge_id(1, 2)};
        auto comps = symmetric_difference_components(g, m, mp);
        REQUIRE(comps.size() == 1);
        CHECK_FALSE(comps[0].is_cycle);
        CHECK(comps[0].edge_ids.size() == 2);
        CHECK(comps[0].vertices.size() == 3);
    }

    SUBCASE("two perfect matchings of a 4-cycle give one alternating cycle") {
        Matching m{g.edge_id(0, 1), g.edge_id(2, 3)};
        Matching mp{g.edge_id(1, 2), g.edge_id(0, 3)};
        auto comps = symmetric_difference_components(g, m, mp);
        REQUIRE(comps.size() == 1);
        CHECK(comps[0].is_cycle);
        CHECK(comps[0].edge_ids.size() == 4);
    }

    SUBCASE("vertices appear in at most one component, path endpoints have degree 1") {
        Rng rng(5150);
        for (int trial = 0; trial < 100; ++trial) {
            int n = 4 + (int)rng.next_below(7);
            Graph rg = random_graph(n, 0.5, rng);
            auto maximum = brute_force_matchings(rg);
            if (maximum.size() < 2) continue;
            const Matching& a = maximum[rng.next_below(maximum.size())];
            const Matching& b = maximum[rng.next_below(maximum.size())];
            auto comps = symmetric_difference_components(rg, a, b);
            std::set<int> seen;
            for (const auto& comp : comps) {
                std::size_t expect = comp.is_cycle ? comp.edge_ids.size()
                                                   : comp.edge_ids.size() + 1;
                CHECK(comp.vertices.size() == expect);
                for (int v : comp.vertices) {
                    CHECK_FALSE(seen.count(v));
                    seen.insert(v);
                }
                // alternation between the two matchings
                for (std::size_t i = 1; i < comp.in_second.size(); ++i)
                    CHECK(comp.in_second[i] != comp.in_second[i - 1]);
            }
        }
    }
}

TEST_CASE("odd set separation") {
    SUBCASE("integral matchings separate nothing") {
        Graph k4(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
        FractionalMatching z{std::vector<double>(6, 0.0)};
        z.z[k4.edge_id(0, 1)] = 1.0;
        z.z[k4.edge_id(2, 3)] = 1.0;
        CHECK_FALSE(separate_odd_set(k4, z, SeparationMode::general).has_value());
        CHECK_FALSE(separate_odd_set(k4, z, SeparationMode::perfect).has_value());
    }

    SUBCASE("triangle with z = 1/2 violates the odd set constraint") {
        Graph triangle(3, {{0, 1}, {1, 2}, {0, 2}});
        FractionalMatching z{{0.5, 0.5, 0.5}};
        auto cut = separate_odd_set(triangle, z, SeparationMode::general);
        REQUIRE(cut.has_value());
        CHECK(cut->vertices == std::vector<int>{0, 1, 2});
        CHECK(cut->lhs == doctest::Approx(1.5));
        CHECK(cut->violation == doctest::Approx(0.5));
    }

    SUBCASE("two co-located triangles: cut form finds the starved odd cut") {
        // K6 client graph, support only inside {0,1,2} and {3,4,5}
        std::vector<Edge> edges;
        for (int u = 0; u < 6; ++u)
            for (int v = u + 1; v < 6; ++v) edges.push_back({u, v});
        Graph k6(6, edges);
        FractionalMatching z{std::vector<double>(k6.edge_count(), 0.0)};
        for (int tri = 0; tri < 2; ++tri)
            for (int u = 3 * tri; u < 3 * tri + 3; ++u)
                for (int v = u + 1; v < 3 * tri + 3; ++v) z.z[k6.edge_id(u, v)] = 0.5;
        auto cut = separate_odd_set(k6, z, SeparationMode::perfect);
        REQUIRE(cut.has_value());
        CHECK(cut->vertices.size() == 3);
        CHECK(cut->lhs == doctest::Approx(0.0));
        CHECK(cut->violation == doctest::Approx(1.0));
    }

    SUBCASE("none returned iff exhaustive enumeration finds no violation, |V| <= 14") {
        Rng rng(90210);
        for (int trial = 0; trial < 60; ++trial) {
            int n = 3 + (int)rng.next_below(10);
            Graph g = random_graph(n, 0.5, rng);
            if (g.edge_count() == 0) continue;
            // random nonnegative z scaled into degree feasibility
            std::vector<double> z(g.edge_count());
            for (double& v : z) v = rng.next_double();
            std::vector<double> deg(n, 0.0);
            for (int id = 0; id < g.edge_count(); ++id) {
                deg[g.edges[id].first] += z[id];
                deg[g.edges[id].second] += z[id];
            }
            double scale = 1.0;
            for (int v = 0; v < n; ++v) scale = std::max(scale, deg[v]);
            for (double& v : z) v /= scale;

            auto cut = separate_odd_set(g, FractionalMatching{z}, SeparationMode::general);
            // independent mask enumeration
            bool any = false;
            for (unsigned mask = 1; mask < (1u << n); ++mask) {
                int bits = __builtin_popcount(mask);
                if (bits % 2 == 0) continue;
                double inside = 0.0;
                for (int id = 0; id < g.edge_count(); ++id) {
                    auto [u, v] = g.edges[id];
                    if ((mask >> u & 1) && (mask >> v & 1)) inside += z[id];
                }
                if (inside > (bits - 1) / 2.0 + 1e-7) any = true;
            }
            CHECK(cut.has_value() == any);
        }
    }

    SUBCASE("capability cap above 22 vertices") {
        std::vector<Edge> edges;
        for (int u = 0; u < 23; ++u) edges.push_back({u, (u + 1) % 23});
        Graph big(23, edges);
        FractionalMatching z{std::vector<double>(big.edge_count(), 0.0)};
        CHECK_THROWS_AS(separate_odd_set(big, z, SeparationMode::general), Error);
    }
}

TEST_CASE("decomposition into maximum matchings") {
    SUBCASE("indicator of a maximum matching decomposes to itself") {
        Graph p4(4, {{0, 1}, {1, 2}, {2, 3}});
        FractionalMatching z{std::vector<double>(3, 0.0)};
        z.z[p4.edge_id(0, 1)] = 1.0;
        z.z[p4.edge_id(2, 3)] = 1.0;
        auto dec = decompose_to_maximum_matchings(p4, z);
        REQUIRE(dec.matchings.size() == 1);
        CHECK(dec.coefficients[0] == doctest::Approx(1.0));
        CHECK(dec.matchings[0] == Matching{p4.edge_id(0, 1), p4.edge_id(2, 3)});
    }

    SUBCASE("uniform third on a triangle") {
        Graph triangle(3, {{0, 1}, {1, 2}, {0, 2}});
        FractionalMatching z{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
        auto dec = decompose_to_maximum_matchings(triangle, z);
        REQUIRE(dec.matchings.size() == 3);
        for (double c : dec.coefficients) CHECK(c == doctest::Approx(1.0 / 3.0));
        for (const auto& m : dec.matchings) CHECK(m.size() == 1);
        auto back = reconstruct_marginals(triangle, dec);
        for (int e = 0; e < 3; ++e) CHECK(back[e] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    }

    SUBCASE("200 random convex combinations reconstruct within 1e-7") {
        Rng rng(600613);
        int done = 0;
        while (done < 200) {
            int n = 3 + (int)rng.next_below(8);
            Graph g = random_graph(n, 0.4 + rng.next_double() * 0.5, rng);
            auto maximum = brute_force_matchings(g);
            if (maximum.front().empty()) continue;
            int parts = 1 + (int)rng.next_below(std::min<std::size_t>(maximum.size(), 6));
            std::vector<double> w(parts);
            double total = 0.0;
            for (double& v : w) {
                v = 0.05 + rng.next_double();
                total += v;
            }
            std::vector<double> z(g.edge_count(), 0.0);
            for (int t = 0; t < parts; ++t) {
                const Matching& m = maximum[rng.next_below(maximum.size())];
                for (int id : m) z[id] += w[t] / total;
            }
            auto dec = decompose_to_maximum_matchings(g, FractionalMatching{z});
            // coefficients sum to one, list length within the peel bound
            double csum = 0.0;
            for (double c : dec.coefficients) {
                CHECK(c > 0.0);
                csum += c;
            }
            CHECK(csum == doctest::Approx(1.0).epsilon(1e-9));
            CHECK((int)dec.matchings.size() <= 2 * g.edge_count() + g.n);
            for (const auto& m : dec.matchings) CHECK(m.size() == maximum.front().size());
            auto back = reconstruct_marginals(g, dec);
            for (int e = 0; e < g.edge_count(); ++e)
                CHECK(std::abs(back[e] - z[e]) <= 1e-7);
            ++done;
        }
    }

    SUBCASE("infeasible z is rejected with the violated constraint") {
        Graph triangle(3, {{0, 1}, {1, 2}, {0, 2}});
        FractionalMatching z{{0.5, 0.5, 0.5}}; // violates the odd set constraint
        CHECK_THROWS_AS(decompose_to_maximum_matchings(triangle, z), Error);
    }
}
