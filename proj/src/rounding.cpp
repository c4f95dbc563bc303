#include "flm/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flm/rng.hpp"

namespace flm {

double ufl_open_cost(const UflInstance& inst, const std::vector<double>& y) {
    double v = 0.0;
    for (int i = 0; i < inst.n_facilities; ++i) v += inst.opening_cost[i] * y[i];
    return v;
}

double ufl_conn_cost(const UflInstance& inst, const UflFractional& frac) {
    double v = 0.0;
    for (int i = 0; i < inst.n_facilities; ++i)
        for (int j = 0; j < inst.n_clients; ++j) v += inst.cost(i, j) * frac.x_at(i, j);
    return v;
}

std::vector<std::string> validate_three_hop(const UflInstance& ufl) {
    std::vector<std::string> out;
    for (int i = 0; i < ufl.n_facilities; ++i)
        for (int j = 0; j < ufl.n_clients; ++j) {
            if (ufl.cost(i, j) < 0.0)
                out.push_back("negative assignment cost at (" + std::to_string(i) + "," +
                              std::to_string(j) + ")");
            for (int i2 = 0; i2 < ufl.n_facilities; ++i2)
                for (int j2 = 0; j2 < ufl.n_clients; ++j2)
                    if (ufl.cost(i, j) >
                        ufl.cost(i, j2) + ufl.cost(i2, j2) + ufl.cost(i2, j) + 1e-9) {
                        std::ostringstream os;
                        os << "three-hop inequality violated: d(" << i << "," << j << ") > d(" << i
                           << "," << j2 << ") + d(" << i2 << "," << j2 << ") + d(" << i2 << ","
                           << j << ")";
                        out.push_back(os.str());
                    }
        }
    return out;
}

std::vector<std::string> check_lp_ufl_feasible(const UflInstance& ufl, const UflFractional& frac,
                                               double tol) {
    std::vector<std::string> out;
    if (frac.n_facilities != ufl.n_facilities || frac.n_clients != ufl.n_clients) {
        out.push_back("fractional point has wrong shape");
        return out;
    }
    for (int j = 0; j < ufl.n_clients; ++j) {
        double total = 0.0;
        for (int i = 0; i < ufl.n_facilities; ++i) {
            double v = frac.x_at(i, j);
            if (v < -tol)
                out.push_back("negative x at (" + std::to_string(i) + "," + std::to_string(j) + ")");
            if (v > frac.y[i] + tol)
                out.push_back("x exceeds y at (" + std::to_string(i) + "," + std::to_string(j) +
                              "): " + std::to_string(v) + " > " + std::to_string(frac.y[i]));
            total += v;
        }
        if (std::abs(total - 1.0) > tol)
            out.push_back("client " + std::to_string(j) + " fractionally assigned mass " +
                          std::to_string(total) + " != 1");
    }
    for (int i = 0; i < ufl.n_facilities; ++i)
        if (frac.y[i] < -tol) out.push_back("negative y at facility " + std::to_string(i));
    return out;
}

UflSolution assign_nearest_open(const UflInstance& ufl, std::vector<int> open_set) {
    std::sort(open_set.begin(), open_set.end());
    open_set.erase(std::unique(open_set.begin(), open_set.end()), open_set.end());
    UflSolution sol;
    sol.open_set = std::move(open_set);
    sol.assignment.assign(ufl.n_clients, -1);
    if (ufl.n_clients > 0 && sol.open_set.empty())
        throw infeasible_error("no facility open but clients exist");
    for (int i : sol.open_set) sol.opening_cost_total += ufl.opening_cost[i];
    for (int j = 0; j < ufl.n_clients; ++j) {
        int arg = -1;
        double best = 0.0;
        for (int i : sol.open_set) {
            double v = ufl.cost(i, j);
            if (arg == -1 || v < best) {
                best = v;
                arg = i;
            }
        }
        sol.assignment[j] = arg;
        sol.connection_cost_total += best;
    }
    return sol;
}

namespace {

// A fractional piece of a facility's scaled opening mass; clients' close
// regions are prefixes of pieces in nearest-facility-first order.
struct Piece {
    int facility;
    double mass;
};

struct CloseRegion {
    std::vector<int> pieces; // indices into the piece table, client's order
    double avg_distance = 0.0;
};

} // namespace

UflSolution round_bifactor(const UflInstance& ufl, const UflFractional& frac, double lambda,
                           std::uint64_t seed, RoundingMode mode,
                           RoundingClusters* clusters_out) {
    if (lambda < 1.678)
        throw precondition_error("bifactor rounding requires lambda >= 1.678, got " +
                                 std::to_string(lambda));
    {
        auto violations = check_lp_ufl_feasible(ufl, frac, 1e-6);
        if (!violations.empty())
            throw infeasible_error("fractional point infeasible for LP_UFL: " + violations[0]);
    }

    const int nf = ufl.n_facilities, nc = ufl.n_clients;
    if (nc == 0) return assign_nearest_open(ufl, {});

    std::vector<double> ybar(nf);
    for (int i = 0; i < nf; ++i) ybar[i] = std::min(1.0, lambda * std::max(0.0, frac.y[i]));

    // Facility order per client: ascending distance, ties by index.
    std::vector<std::vector<int>> order(nc);
    for (int j = 0; j < nc; ++j) {
        for (int i = 0; i < nf; ++i)
            if (ybar[i] > 0.0) order[j].push_back(i);
        std::sort(order[j].begin(), order[j].end(), [&](int a, int b) {
            if (ufl.cost(a, j) != ufl.cost(b, j)) return ufl.cost(a, j) < ufl.cost(b, j);
            return a < b;
        });
    }

    // Pass 1: per client, the boundary facility where cumulative ybar mass
    // reaches exactly 1, and the partial amount taken from it.
    std::vector<int> boundary(nc, -1);
    std::vector<double> boundary_take(nc, 0.0);
    std::vector<std::vector<double>> cuts(nf); // split points inside each facility's mass
    for (int j = 0; j < nc; ++j) {
        double need = 1.0;
        int last = -1;
        for (int i : order[j]) {
            if (ybar[i] >= need - 1e-12) {
                boundary[j] = i;
                boundary_take[j] = std::min(need, ybar[i]);
                cuts[i].push_back(boundary_take[j]);
                need = 0.0;
                break;
            }
            need -= ybar[i];
            last = i;
        }
        if (boundary[j] == -1) {
            // LP-tolerance dust can leave the cumulative mass just short of 1
            if (need <= 1e-5 && last != -1) {
                boundary[j] = last;
                boundary_take[j] = ybar[last];
                cuts[last].push_back(boundary_take[j]);
            } else {
                throw infeasible_error("client " + std::to_string(j) +
                                       " has scaled facility mass below 1");
            }
        }
    }

    // Atomic pieces: each facility's mass split at every recorded cut point.
    std::vector<Piece> pieces;
    std::vector<std::vector<int>> fac_pieces(nf);             // piece ids per facility, in order
    std::vector<std::vector<double>> fac_piece_upper(nf);     // cumulative upper bound per piece
    for (int i = 0; i < nf; ++i) {
        if (ybar[i] <= 0.0) continue;
        auto& c = cuts[i];
        c.push_back(ybar[i]);
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                c.end());
        double lo = 0.0;
        for (double hi : c) {
            if (hi - lo < 1e-15) continue;
            fac_pieces[i].push_back((int)pieces.size());
            fac_piece_upper[i].push_back(hi);
            pieces.push_back({i, hi - lo});
            lo = hi;
        }
    }

    // Close region per client: all pieces of fully used facilities plus the
    // pieces of the boundary facility up to its take.
    std::vector<CloseRegion> close(nc);
    for (int j = 0; j < nc; ++j) {
        double dist_mass = 0.0;
        for (int i : order[j]) {
            bool is_boundary = (i == boundary[j]);
            for (std::size_t t = 0; t < fac_pieces[i].size(); ++t) {
                if (is_boundary && fac_piece_upper[i][t] > boundary_take[j] + 1e-12) break;
                int pid = fac_pieces[i][t];
                close[j].pieces.push_back(pid);
                dist_mass += pieces[pid].mass * ufl.cost(i, j);
            }
            if (is_boundary) break;
        }
        close[j].avg_distance = dist_mass; // region mass is exactly 1
    }

    // Greedy clustering by ascending average close-distance.
    std::vector<int> client_order(nc);
    for (int j = 0; j < nc; ++j) client_order[j] = j;
    std::sort(client_order.begin(), client_order.end(), [&](int a, int b) {
        if (close[a].avg_distance != close[b].avg_distance)
            return close[a].avg_distance < close[b].avg_distance;
        return a < b;
    });

    std::vector<int> piece_owner(pieces.size(), -1); // claiming cluster center
    std::vector<int> centers;
    std::vector<int> center_of(nc, -1);
    for (int j : client_order) {
        int owner = -1;
        for (int pid : close[j].pieces)
            if (piece_owner[pid] != -1) {
                owner = piece_owner[pid]; // nearest-first order makes this stable
                break;
            }
        if (owner != -1) {
            center_of[j] = owner;
            continue;
        }
        center_of[j] = j;
        centers.push_back(j);
        for (int pid : close[j].pieces) piece_owner[pid] = j;
    }

    // Open facilities.
    std::vector<char> open(nf, false);
    std::vector<int> center_pick(nc, -1); // facility opened by each center
    Rng base(seed);
    if (mode == RoundingMode::randomized) {
        for (int c : centers) {
            Rng stream = base.split((std::uint64_t)c);
            std::vector<double> weights;
            for (int pid : close[c].pieces) weights.push_back(pieces[pid].mass);
            std::size_t pick = stream.categorical(weights, 1.0);
            int fac = pieces[close[c].pieces[pick]].facility;
            open[fac] = true;
            center_pick[c] = fac;
        }
        for (int i = 0; i < nf; ++i) {
            Rng stream = base.split((std::uint64_t)(nc + 1 + i));
            for (int pid : fac_pieces[i]) {
                if (piece_owner[pid] != -1) continue;
                if (stream.bernoulli(pieces[pid].mass)) open[i] = true;
            }
        }
    } else {
        // reproducible fallback: no approximation guarantee
        for (int i = 0; i < nf; ++i)
            if (ybar[i] >= 0.5) open[i] = true;
        for (int c : centers) {
            int best = -1;
            for (int pid : close[c].pieces) {
                int i = pieces[pid].facility;
                if (best == -1 || ufl.cost(i, c) < ufl.cost(best, c)) best = i;
            }
            if (best != -1) {
                open[best] = true;
                center_pick[c] = best;
            }
        }
    }

    if (clusters_out) {
        clusters_out->center_of_client = center_of;
        clusters_out->close_radius.assign(nc, 0.0);
        clusters_out->center_facility.assign(nc, -1);
        for (int j = 0; j < nc; ++j) {
            for (int pid : close[j].pieces)
                clusters_out->close_radius[j] =
                    std::max(clusters_out->close_radius[j], ufl.cost(pieces[pid].facility, j));
            clusters_out->center_facility[j] = center_pick[center_of[j]];
        }
    }

    std::vector<int> open_set;
    for (int i = 0; i < nf; ++i)
        if (open[i]) open_set.push_back(i);
    return assign_nearest_open(ufl, std::move(open_set));
}

UflInstance build_meta_client_ufl(const FlmInstance& inst, const Matching& m) {
    Matching sorted = normalize_matching(m);
    UflInstance out;
    out.n_facilities = inst.n_facilities;
    out.n_clients = (int)sorted.size();
    out.opening_cost = inst.opening_cost;
    out.assignment.assign((std::size_t)out.n_facilities * out.n_clients, 0.0);
    for (int i = 0; i < out.n_facilities; ++i)
        for (int t = 0; t < out.n_clients; ++t)
            out.cost(i, t) = pair_distance_by_id(inst, i, sorted[t]);
    return out;
}

} // namespace flm
