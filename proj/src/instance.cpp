#include "flm/instance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "flm/matching.hpp"
#include "flm/rng.hpp"

namespace flm {

namespace {

std::string idx(int a) { return std::to_string(a); }

void require_facility(const FlmInstance& inst, int i) {
    if (i < 0 || i >= inst.n_facilities)
        throw identifier_error("unknown facility " + idx(i));
}

void require_client(const FlmInstance& inst, int j) {
    if (j < 0 || j >= inst.n_clients) throw identifier_error("unknown client " + idx(j));
}

} // namespace

std::vector<std::string> validate_instance(const FlmInstance& inst) {
    std::vector<std::string> out;
    const int n = inst.n_points();
    if ((int)inst.opening_cost.size() != inst.n_facilities)
        out.push_back("opening cost vector has wrong length");
    if ((int)inst.metric.size() != n * n) {
        out.push_back("metric matrix has wrong shape");
        return out;
    }
    for (int i = 0; i < inst.n_facilities; ++i)
        if (inst.opening_cost[i] < 0.0)
            out.push_back("negative opening cost at facility " + idx(i));

    for (int a = 0; a < n; ++a) {
        if (std::abs(inst.d(a, a)) > kMetricTol)
            out.push_back("nonzero diagonal at point " + idx(a));
        for (int b = a + 1; b < n; ++b) {
            if (inst.d(a, b) < -kMetricTol)
                out.push_back("negative distance d(" + idx(a) + "," + idx(b) + ")");
            if (std::abs(inst.d(a, b) - inst.d(b, a)) > kMetricTol)
                out.push_back("asymmetric distance d(" + idx(a) + "," + idx(b) + ")");
        }
    }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (b == a) continue;
            for (int c = 0; c < n; ++c) {
                if (c == a || c == b) continue;
                if (inst.d(a, b) > inst.d(a, c) + inst.d(c, b) + kMetricTol) {
                    std::ostringstream os;
                    os << "triangle inequality violated: d(" << a << "," << b << ") > d(" << a
                       << "," << c << ") + d(" << c << "," << b << ") (" << inst.d(a, b) << " > "
                       << inst.d(a, c) + inst.d(c, b) << ")";
                    out.push_back(os.str());
                }
            }
        }

    if (inst.compat.n != inst.n_clients)
        out.push_back("compatibility graph vertex count differs from client count");
    for (const auto& [j, k] : inst.compat.edges) {
        if (j < 0 || k >= inst.n_clients)
            out.push_back("compatible pair {" + idx(j) + "," + idx(k) + "} references unknown client");
        if (j == k) out.push_back("self-loop compatible pair at client " + idx(j));
    }
    return out;
}

double pair_distance(const FlmInstance& inst, int facility, Edge client_pair) {
    require_facility(inst, facility);
    require_client(inst, client_pair.first);
    require_client(inst, client_pair.second);
    return inst.dist_fc(facility, client_pair.first) + inst.dist_fc(facility, client_pair.second);
}

double pair_distance_by_id(const FlmInstance& inst, int facility, int edge_id) {
    if (edge_id < 0 || edge_id >= inst.compat.edge_count())
        throw identifier_error("unknown edge id " + idx(edge_id));
    return pair_distance(inst, facility, inst.compat.edges[edge_id]);
}

double edge_length(const FlmInstance& inst, Edge client_pair) {
    require_client(inst, client_pair.first);
    require_client(inst, client_pair.second);
    return inst.dist_cc(client_pair.first, client_pair.second);
}

double edge_length_by_id(const FlmInstance& inst, int edge_id) {
    if (edge_id < 0 || edge_id >= inst.compat.edge_count())
        throw identifier_error("unknown edge id " + idx(edge_id));
    return edge_length(inst, inst.compat.edges[edge_id]);
}

std::pair<double, int> set_distance_client(const FlmInstance& inst, const std::vector<int>& s,
                                           int client) {
    if (s.empty()) throw precondition_error("set_distance over an empty facility set");
    require_client(inst, client);
    double best = 0.0;
    int arg = -1;
    for (int i : s) {
        require_facility(inst, i);
        double v = inst.dist_fc(i, client);
        if (arg == -1 || v < best || (v == best && i < arg)) {
            best = v;
            arg = i;
        }
    }
    return {best, arg};
}

std::pair<double, int> set_distance_pair(const FlmInstance& inst, const std::vector<int>& s,
                                         Edge client_pair) {
    if (s.empty()) throw precondition_error("set_distance over an empty facility set");
    double best = 0.0;
    int arg = -1;
    for (int i : s) {
        double v = pair_distance(inst, i, client_pair);
        if (arg == -1 || v < best || (v == best && i < arg)) {
            best = v;
            arg = i;
        }
    }
    return {best, arg};
}

std::vector<std::string> validate_solution(const FlmInstance& inst, const FlmSolution& sol) {
    std::vector<std::string> out;
    std::set<int> open(sol.open_set.begin(), sol.open_set.end());
    for (int i : open)
        if (i < 0 || i >= inst.n_facilities) out.push_back("open set references unknown facility " + idx(i));

    std::set<int> used;
    for (int id : sol.matching) {
        if (id < 0 || id >= inst.compat.edge_count()) {
            out.push_back("matching references unknown edge id " + idx(id));
            continue;
        }
        auto [j, k] = inst.compat.edges[id];
        if (used.count(j) || used.count(k))
            out.push_back("matching is not a matching: client reuse in edge {" + idx(j) + "," +
                          idx(k) + "}");
        used.insert(j);
        used.insert(k);
    }

    int max_size = nu(inst.compat);
    if ((int)sol.matching.size() < max_size)
        out.push_back("matching not maximum: |M| = " + idx((int)sol.matching.size()) +
                      " < nu = " + idx(max_size));
    if ((int)sol.matching.size() > max_size)
        out.push_back("matching larger than nu, inconsistent");

    if (sol.assignment.size() != sol.matching.size())
        out.push_back("assignment does not cover exactly the matched pairs");
    else
        for (std::size_t t = 0; t < sol.matching.size(); ++t) {
            int i = sol.assignment[t];
            if (i < 0 || i >= inst.n_facilities)
                out.push_back("assignment references unknown facility " + idx(i));
            else if (!open.count(i))
                out.push_back("assignment target not open: facility " + idx(i) + " for edge id " +
                              idx(sol.matching[t]));
        }

    if (!sol.matching.empty() && open.empty()) out.push_back("no facility open but matching nonempty");
    return out;
}

CostBreakdown solution_cost(const FlmInstance& inst, const FlmSolution& sol) {
    auto violations = validate_solution(inst, sol);
    if (!violations.empty()) throw infeasible_error(violations[0]);
    CostBreakdown cb;
    for (int i : sol.open_set) cb.opening += inst.opening_cost[i];
    for (std::size_t t = 0; t < sol.matching.size(); ++t)
        cb.connection += pair_distance_by_id(inst, sol.assignment[t], sol.matching[t]);
    cb.total = cb.opening + cb.connection;
    return cb;
}

FlmSolution finalize_solution(const FlmInstance& inst, std::vector<int> open_set,
                              Matching matching, std::vector<int> assignment) {
    FlmSolution sol;
    std::sort(open_set.begin(), open_set.end());
    open_set.erase(std::unique(open_set.begin(), open_set.end()), open_set.end());
    sol.open_set = std::move(open_set);
    // keep matching and assignment aligned while sorting by edge id
    std::vector<std::pair<int, int>> paired;
    for (std::size_t t = 0; t < matching.size(); ++t)
        paired.push_back({matching[t], t < assignment.size() ? assignment[t] : -1});
    std::sort(paired.begin(), paired.end());
    for (auto& [id, fac] : paired) {
        sol.matching.push_back(id);
        sol.assignment.push_back(fac);
    }
    CostBreakdown cb = solution_cost(inst, sol);
    sol.opening_cost_total = cb.opening;
    sol.connection_cost_total = cb.connection;
    return sol;
}

FlmInstance reduce_ufl_to_flm(const UflInstance& ufl) {
    const int nf = ufl.n_facilities, nc = ufl.n_clients;
    FlmInstance out;
    out.n_facilities = nf;
    out.n_clients = 2 * nc; // originals then copies
    out.facility_labels.assign(nf, "");
    out.client_labels.assign(2 * nc, "");
    out.opening_cost.resize(nf);
    for (int i = 0; i < nf; ++i) out.opening_cost[i] = 2.0 * ufl.opening_cost[i];

    // Metric closure over F and the original clients via Floyd-Warshall on
    // the facility-client distances; the three-hop inequality guarantees the
    // given facility-client entries survive unchanged. Copies share rows.
    const int base = nf + nc;
    const double inf = 1e100;
    std::vector<double> dist((std::size_t)base * base, inf);
    auto at = [&](int a, int b) -> double& { return dist[(std::size_t)a * base + b]; };
    for (int a = 0; a < base; ++a) at(a, a) = 0.0;
    for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nc; ++j) {
            at(i, nf + j) = ufl.cost(i, j);
            at(nf + j, i) = ufl.cost(i, j);
        }
    for (int k = 0; k < base; ++k)
        for (int a = 0; a < base; ++a)
            for (int b = 0; b < base; ++b)
                if (at(a, k) + at(k, b) < at(a, b)) at(a, b) = at(a, k) + at(k, b);

    const int n = out.n_points();
    out.metric.assign((std::size_t)n * n, 0.0);
    auto src_point = [&](int p) {
        // map output point to its base-metric point (copies collapse)
        if (p < nf + nc) return p;
        return p - nc; // copy of client p - (nf + nc)
    };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double v = at(src_point(a), src_point(b));
            out.metric[(std::size_t)a * n + b] = (a == b || src_point(a) == src_point(b)) ? 0.0 : v;
        }

    std::vector<Edge> edges;
    for (int j = 0; j < nc; ++j) edges.push_back({j, nc + j});
    out.compat = Graph(2 * nc, edges);
    return out;
}

FlmInstance generate_euclidean(int n_fac, int n_cli, double edge_probability, double box_size,
                               std::uint64_t seed) {
    if (n_fac < 1) throw precondition_error("generate_euclidean requires at least one facility");
    if (n_cli < 0) throw precondition_error("negative client count");
    if (edge_probability < 0.0 || edge_probability > 1.0)
        throw precondition_error("edge probability outside [0,1]");

    Rng rng(seed);
    Rng coord_rng = rng.split(1), cost_rng = rng.split(2), edge_rng = rng.split(3);

    FlmInstance out;
    out.n_facilities = n_fac;
    out.n_clients = n_cli;
    out.facility_labels.assign(n_fac, "");
    out.client_labels.assign(n_cli, "");
    const int n = n_fac + n_cli;
    std::vector<double> px(n), py(n);
    for (int p = 0; p < n; ++p) {
        px[p] = coord_rng.uniform(box_size);
        py[p] = coord_rng.uniform(box_size);
    }
    out.opening_cost.resize(n_fac);
    for (int i = 0; i < n_fac; ++i) out.opening_cost[i] = cost_rng.uniform(box_size);

    out.metric.assign((std::size_t)n * n, 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            out.metric[(std::size_t)a * n + b] = std::hypot(px[a] - px[b], py[a] - py[b]);

    std::vector<Edge> edges;
    for (int j = 0; j < n_cli; ++j)
        for (int k = j + 1; k < n_cli; ++k)
            if (edge_rng.next_double() < edge_probability) edges.push_back({j, k});
    out.compat = Graph(n_cli, edges);
    return out;
}

FlmInstance fixture(const std::string& name) {
    auto dense_metric = [](int n, auto&& f) {
        std::vector<double> m((std::size_t)n * n, 0.0);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) m[(std::size_t)a * n + b] = (a == b) ? 0.0 : f(a, b);
        return m;
    };

    if (name == "gap-2fac") {
        // Two free facilities at mutual distance 10; three clients co-located
        // with each; complete compatibility graph on the six clients.
        FlmInstance out;
        out.n_facilities = 2;
        out.n_clients = 6;
        out.facility_labels = {"i1", "i2"};
        out.client_labels = {"j1", "j2", "j3", "k1", "k2", "k3"};
        out.opening_cost = {0.0, 0.0};
        // location 0: facility 0 and clients 0..2; location 1: facility 1 and clients 3..5
        auto loc = [](int p) { return (p == 0 || (p >= 2 && p <= 4)) ? 0 : 1; };
        out.metric = dense_metric(8, [&](int a, int b) { return loc(a) == loc(b) ? 0.0 : 10.0; });
        std::vector<Edge> edges;
        for (int j = 0; j < 6; ++j)
            for (int k = j + 1; k < 6; ++k) edges.push_back({j, k});
        out.compat = Graph(6, edges);
        return out;
    }
    if (name == "colocated-unit") {
        // Single unit-cost facility, four mutually compatible co-located clients.
        FlmInstance out;
        out.n_facilities = 1;
        out.n_clients = 4;
        out.facility_labels = {"i"};
        out.client_labels = {"v1", "v2", "v3", "v4"};
        out.opening_cost = {1.0};
        out.metric = dense_metric(5, [](int, int) { return 0.0; });
        std::vector<Edge> edges;
        for (int j = 0; j < 4; ++j)
            for (int k = j + 1; k < 4; ++k) edges.push_back({j, k});
        out.compat = Graph(4, edges);
        return out;
    }
    if (name == "triangle-3-2") {
        // Three mutually compatible clients on a unit triangle, one free
        // facility at distance 1 from each.
        FlmInstance out;
        out.n_facilities = 1;
        out.n_clients = 3;
        out.facility_labels = {"i"};
        out.client_labels = {"v1", "v2", "v3"};
        out.opening_cost = {0.0};
        out.metric = dense_metric(4, [](int, int) { return 1.0; });
        out.compat = Graph(3, {{0, 1}, {1, 2}, {0, 2}});
        return out;
    }
    throw identifier_error("unknown fixture '" + name + "'");
}

} // namespace flm
