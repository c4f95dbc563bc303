#ifndef FLM_UFL_HPP
#define FLM_UFL_HPP

#include <string>
#include <vector>

namespace flm {

// Uncapacitated facility location instance. Assignment costs need only
// satisfy the three-hop inequality, not a full metric.
struct UflInstance {
    int n_facilities = 0;
    int n_clients = 0;
    std::vector<double> opening_cost;   // per facility
    std::vector<double> assignment;     // row-major [facility][client]

    double cost(int i, int j) const { return assignment[(std::size_t)i * n_clients + j]; }
    double& cost(int i, int j) { return assignment[(std::size_t)i * n_clients + j]; }
};

// Fractional LP_UFL point: x row-major [facility][client], y per facility.
struct UflFractional {
    std::vector<double> x;
    std::vector<double> y;
    int n_facilities = 0;
    int n_clients = 0;

    double x_at(int i, int j) const { return x[(std::size_t)i * n_clients + j]; }
    double& x_at(int i, int j) { return x[(std::size_t)i * n_clients + j]; }
};

struct UflSolution {
    std::vector<int> open_set;      // sorted facility indices
    std::vector<int> assignment;    // per client: its (nearest open) facility, -1 if no clients
    double opening_cost_total = 0.0;
    double connection_cost_total = 0.0;

    double total() const { return opening_cost_total + connection_cost_total; }
};

double ufl_open_cost(const UflInstance& inst, const std::vector<double>& y);
double ufl_conn_cost(const UflInstance& inst, const UflFractional& frac);

} // namespace flm

#endif
