#include <doctest.h>

#include <cmath>

#include "flm/oracle.hpp"
#include "flm/reroute.hpp"
#include "helpers.hpp"

using namespace flm;
using namespace flm_test;

namespace {

double total_mass(const FractionalFlm& f) {
    double s = 0.0;
    for (double v : f.x) s += v;
    return s;
}

double sum_edge_lengths(const FlmInstance& inst, const Matching& m) {
    double s = 0.0;
    for (int id : m) s += edge_length_by_id(inst, id);
    return s;
}

// (1/3, 2/3) fractional point of the triangle fixture
FractionalFlm triangle_point() {
    FractionalFlm frac;
    frac.n_facilities = 1;
    frac.n_edges = 3;
    frac.x.assign(3, 1.0 / 3.0);
    frac.y = {2.0 / 3.0};
    return frac;
}

void check_general_bounds(const FlmInstance& inst, const FractionalFlm& before,
                          const Matching& m, const RerouteReport& rep) {
    std::vector<char> in_m(inst.compat.edge_count(), false);
    for (int id : m) in_m[id] = true;
    for (int i = 0; i < inst.n_facilities; ++i)
        for (int e = 0; e < inst.compat.edge_count(); ++e)
            if (!in_m[e]) CHECK(rep.output.x_at(i, e) <= 1e-9);
    CHECK(check_lp_flm_feasible(inst, rep.output).empty());
    auto [open_before, conn_before] = flm_costs(inst, before);
    auto [open_after, conn_after] = flm_costs(inst, rep.output);
    CHECK(open_after == doctest::Approx(2.0 * open_before).epsilon(1e-9));
    CHECK(conn_after <= 2.0 * conn_before + sum_edge_lengths(inst, m) + 1e-6);
    CHECK(rep.final_potential == 0);
    // mass conservation
    CHECK(total_mass(rep.output) == doctest::Approx(total_mass(before)).epsilon(1e-7));
    // strict potential decrease along the trace
    long long last = rep.initial_potential;
    for (const auto& entry : rep.trace) {
        CHECK(entry.potential < last);
        last = entry.potential;
    }
    CHECK(rep.iterations <= rep.initial_potential);
}

} // namespace

TEST_CASE("reroute potential") {
    FlmInstance tri = fixture("triangle-3-2");

    SUBCASE("supported on M gives zero") {
        FractionalFlm frac;
        frac.n_facilities = 1;
        frac.n_edges = 3;
        frac.x.assign(3, 0.0);
        frac.x_at(0, 0) = 1.0;
        frac.y = {1.0};
        MatchingDecomposition dec;
        dec.matchings = {{0}};
        dec.coefficients = {1.0};
        CHECK(reroute_potential(tri, frac, dec, {0}) == 0);
    }

    SUBCASE("triangle input against a single edge gives 10") {
        FractionalFlm frac = triangle_point();
        MatchingDecomposition dec;
        dec.matchings = {{0}, {1}, {2}};
        dec.coefficients = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
        // |E|+1 = 4, two serviced off-M pairs, two off-M matchings of one edge
        CHECK(reroute_potential(tri, frac, dec, {0}) == 10);
    }
}

TEST_CASE("reroute_general on the triangle fixture") {
    FlmInstance tri = fixture("triangle-3-2");
    for (int target = 0; target < 3; ++target) {
        FractionalFlm frac = triangle_point();
        RerouteReport rep = reroute_general(tri, frac, {target}, /*verify_each_iteration=*/true);
        CHECK(rep.output.x_at(0, target) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.output.y[0] == doctest::Approx(4.0 / 3.0));
        CHECK(rep.initial_potential == 10);
        CHECK(rep.final_potential == 0);
        // the matched edge needs a full opening: 1 > y = 2/3, and 4/3 >= 1 covers it
        double required = 0.0;
        for (int j = 0; j < tri.n_clients; ++j)
            required = std::max(required, flm_client_mass(tri, rep.output, 0, j));
        CHECK(required == doctest::Approx(1.0));
        CHECK(required > 2.0 / 3.0);
        CHECK(rep.output.y[0] >= required - 1e-9);
    }
}

TEST_CASE("reroute_general identity when already supported on M") {
    FlmInstance unit = fixture("colocated-unit");
    ExactResult res = exact_solve(unit);
    FractionalFlm frac;
    frac.n_facilities = 1;
    frac.n_edges = unit.compat.edge_count();
    frac.x.assign(frac.n_edges, 0.0);
    for (std::size_t t = 0; t < res.optimal_solution.matching.size(); ++t)
        frac.x_at(0, res.optimal_solution.matching[t]) = 1.0;
    frac.y = {1.0};
    RerouteReport rep = reroute_general(unit, frac, res.optimal_solution.matching);
    CHECK(rep.iterations == 0);
    CHECK(rep.initial_potential == 0);
    CHECK(rep.transfer_total == 0.0);
    for (int e = 0; e < frac.n_edges; ++e) CHECK(rep.output.x_at(0, e) == frac.x_at(0, e));
    CHECK(rep.output.y[0] == doctest::Approx(2.0)); // doubled by contract
}

TEST_CASE("reroute_general satisfies the cost and feasibility bounds on random instances") {
    Rng rng(515253);
    int done = 0;
    for (int trial = 0; done < 60; ++trial) {
        FlmInstance inst = generate_euclidean(2 + (int)rng.next_below(3),
                                              4 + (int)rng.next_below(5), 0.55, 10.0,
                                              40000 + trial);
        if (nu(inst.compat) == 0) continue;
        LpFlmResult lp = solve_lp_flm(inst);
        Matching m;
        if (done % 2 == 0) {
            std::vector<double> lengths(inst.compat.edge_count());
            for (int e = 0; e < inst.compat.edge_count(); ++e)
                lengths[e] = edge_length_by_id(inst, e);
            m = min_cost_maximum_matching(inst.compat, lengths);
        } else {
            m = max_cardinality_matching(inst.compat);
        }
        RerouteReport rep = reroute_general(inst, lp.frac, m, done < 10);
        check_general_bounds(inst, lp.frac, m, rep);
        ++done;
    }
}

TEST_CASE("reroute_general rejects a non-maximum target matching") {
    FlmInstance unit = fixture("colocated-unit");
    LpFlmResult lp = solve_lp_flm(unit);
    CHECK_THROWS_AS(reroute_general(unit, lp.frac, Matching{0}), Error);
}

TEST_CASE("reroute_perfect on the 4-cycle hand example") {
    // one free facility, four co-located clients on a C4 compatibility graph
    FlmInstance inst;
    inst.n_facilities = 1;
    inst.n_clients = 4;
    inst.facility_labels = {""};
    inst.client_labels = {"", "", "", ""};
    inst.opening_cost = {0.0};
    inst.metric.assign(25, 0.0);
    inst.compat = Graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});

    FractionalFlm frac;
    frac.n_facilities = 1;
    frac.n_edges = 4;
    frac.x.assign(4, 0.5);
    frac.y = {1.0};
    REQUIRE(check_lp_flm_feasible(inst, frac).empty());

    Matching m{inst.compat.edge_id(0, 1), inst.compat.edge_id(2, 3)};
    RerouteReport rep = reroute_perfect(inst, frac, m, /*verify_each_iteration=*/true);
    for (int id : m) CHECK(rep.output.x_at(0, id) == doctest::Approx(1.0));
    CHECK(rep.output.y[0] == doctest::Approx(1.0)); // opening unchanged
    // final flow at every client equals the halved sum of both endpoints' input flows
    for (int j = 0; j < 4; ++j)
        CHECK(flm_client_mass(inst, rep.output, 0, j) == doctest::Approx(1.0));
}

TEST_CASE("reroute_perfect bounds on random perfectly matchable instances") {
    int done = 0;
    for (int trial = 0; done < 60; ++trial) {
        FlmInstance inst = random_perfect_euclidean(2 + trial % 3, 6, 0.5, 10.0, 60000 + trial);
        LpFlmResult lp = solve_lp_flm(inst);
        std::vector<double> lengths(inst.compat.edge_count());
        for (int e = 0; e < inst.compat.edge_count(); ++e)
            lengths[e] = edge_length_by_id(inst, e);
        Matching m = min_cost_perfect_matching(inst.compat, lengths);
        RerouteReport rep = reroute_perfect(inst, lp.frac, m, done < 10);

        std::vector<char> in_m(inst.compat.edge_count(), false);
        for (int id : m) in_m[id] = true;
        for (int i = 0; i < inst.n_facilities; ++i)
            for (int e = 0; e < inst.compat.edge_count(); ++e)
                if (!in_m[e]) CHECK(rep.output.x_at(i, e) <= 1e-9);
        CHECK(check_lp_flm_feasible(inst, rep.output).empty());
        auto [open_before, conn_before] = flm_costs(inst, lp.frac);
        auto [open_after, conn_after] = flm_costs(inst, rep.output);
        CHECK(open_after == doctest::Approx(open_before).epsilon(1e-9)); // y unchanged
        CHECK(conn_after <= conn_before + sum_edge_lengths(inst, m) + 1e-6);
        CHECK(rep.final_potential == 0);
        ++done;
    }
}

TEST_CASE("reroute_perfect rejects a non-perfect matching") {
    FlmInstance tri = fixture("triangle-3-2");
    FractionalFlm frac = triangle_point();
    CHECK_THROWS_AS(reroute_perfect(tri, frac, {0}), Error);
}

TEST_CASE("adjacent-edge distance bound d(i,e) <= 2 d(i,e') + d(e) holds pointwise") {
    for (int trial = 0; trial < 20; ++trial) {
        FlmInstance inst = generate_euclidean(3, 6, 0.8, 10.0, 70000 + trial);
        REQUIRE(validate_instance(inst).empty());
        for (int i = 0; i < inst.n_facilities; ++i)
            for (int e = 0; e < inst.compat.edge_count(); ++e)
                for (int e2 = 0; e2 < inst.compat.edge_count(); ++e2) {
                    if (e == e2) continue;
                    auto [a, b] = inst.compat.edges[e];
                    auto [c, d] = inst.compat.edges[e2];
                    bool adjacent = (a == c || a == d || b == c || b == d);
                    if (!adjacent) continue;
                    CHECK(pair_distance_by_id(inst, i, e) <=
                          2.0 * pair_distance_by_id(inst, i, e2) + edge_length_by_id(inst, e) +
                              1e-9);
                }
    }
}
