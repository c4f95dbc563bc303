#ifndef FLM_INSTANCE_HPP
#define FLM_INSTANCE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "flm/graph.hpp"
#include "flm/ufl.hpp"

namespace flm {

// Facility location with matching instance (F, V, E, f, d). Facilities and
// clients use dense 0-based indices; the metric is a full symmetric matrix
// over F then V (facility i at row i, client j at row n_facilities + j).
// Instances are immutable after construction.
struct FlmInstance {
    int n_facilities = 0;
    int n_clients = 0;
    std::vector<std::string> facility_labels; // optional, may be empty strings
    std::vector<std::string> client_labels;
    std::vector<double> opening_cost;
    std::vector<double> metric; // row-major (n_facilities + n_clients)^2
    Graph compat;               // graph on clients; edges = compatible pairs

    int n_points() const { return n_facilities + n_clients; }

    double d(int a, int b) const { return metric[(std::size_t)a * n_points() + b]; }

    // global metric index of client j
    int client_point(int j) const { return n_facilities + j; }

    double dist_fc(int facility, int client) const {
        return d(facility, client_point(client));
    }
    double dist_cc(int j, int k) const { return d(client_point(j), client_point(k)); }
};

struct FlmSolution {
    std::vector<int> open_set;   // sorted facility indices (S)
    Matching matching;           // edge ids into compat (M)
    std::vector<int> assignment; // parallel to matching: open facility per pair (sigma)
    double opening_cost_total = 0.0;
    double connection_cost_total = 0.0;

    double total() const { return opening_cost_total + connection_cost_total; }
};

// --------------------------------------------------------------------------
// Validation and distances
// --------------------------------------------------------------------------

constexpr double kMetricTol = 1e-9;

// Empty when all instance invariants hold; each violation names the
// offending indices.
std::vector<std::string> validate_instance(const FlmInstance& inst);

// d(i, e) = d(i, j) + d(i, k) for e = {j, k}
double pair_distance(const FlmInstance& inst, int facility, Edge client_pair);
double pair_distance_by_id(const FlmInstance& inst, int facility, int edge_id);

// d(e) = d(j, k)
double edge_length(const FlmInstance& inst, Edge client_pair);
double edge_length_by_id(const FlmInstance& inst, int edge_id);

// min over i in S of d(i, t); ties broken by lowest facility index
std::pair<double, int> set_distance_client(const FlmInstance& inst, const std::vector<int>& s,
                                           int client);
std::pair<double, int> set_distance_pair(const FlmInstance& inst, const std::vector<int>& s,
                                         Edge client_pair);

// (total, opening, connection); throws on structural violations
struct CostBreakdown {
    double total = 0.0;
    double opening = 0.0;
    double connection = 0.0;
};
CostBreakdown solution_cost(const FlmInstance& inst, const FlmSolution& sol);

// Structural checks as a violation list (used by solution_cost and the CLI
// verify command). Empty when feasible.
std::vector<std::string> validate_solution(const FlmInstance& inst, const FlmSolution& sol);

// Fills in the cost fields from the structure.
FlmSolution finalize_solution(const FlmInstance& inst, std::vector<int> open_set,
                              Matching matching, std::vector<int> assignment);

// --------------------------------------------------------------------------
// Generators
// --------------------------------------------------------------------------

// One more co-located copy per client, compatible only with its original;
// opening costs doubled. The FLM optimum is exactly twice the UFL optimum.
FlmInstance reduce_ufl_to_flm(const UflInstance& ufl);

// Points uniform in [0, box]^2, Euclidean metric, opening costs uniform in
// [0, box], edges sampled independently with the given probability.
FlmInstance generate_euclidean(int n_fac, int n_cli, double edge_probability, double box_size,
                               std::uint64_t seed);

// Named paper-derived fixtures: gap-2fac, colocated-unit, triangle-3-2.
FlmInstance fixture(const std::string& name);

} // namespace flm

#endif
