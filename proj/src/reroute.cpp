#include "flm/reroute.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace flm {

namespace {

constexpr double kSupportTol = 1e-9;
constexpr double kGammaDrop = 1e-12;

using GammaMap = std::map<Matching, double>;

long long potential_of(const FlmInstance& inst, const FractionalFlm& x_tilde,
                       const GammaMap& gamma, const std::vector<char>& in_m) {
    const int m = inst.compat.edge_count();
    long long off_support = 0;
    for (int i = 0; i < inst.n_facilities; ++i)
        for (int e = 0; e < m; ++e)
            if (!in_m[e] && x_tilde.x_at(i, e) > kSupportTol) ++off_support;
    long long matching_term = 0;
    for (const auto& [matching, coeff] : gamma) {
        if (coeff <= kGammaDrop) continue;
        for (int e : matching)
            if (!in_m[e]) ++matching_term;
    }
    return (long long)(m + 1) * off_support + matching_term;
}

// Orients a component so that the walk starts with an M'-edge (odd-indexed
// edges in M'); paths start from the endpoint whose incident edge is in M',
// cycles are rotated/flipped so the first edge at the lowest vertex is in M'.
AlternatingComponent orient_component(AlternatingComponent comp) {
    if (!comp.is_cycle) {
        if (comp.in_second.front()) return comp;
        if (!comp.in_second.back())
            throw numeric_error("alternating path has both end edges in the target matching");
        std::reverse(comp.edge_ids.begin(), comp.edge_ids.end());
        std::reverse(comp.in_second.begin(), comp.in_second.end());
        std::reverse(comp.vertices.begin(), comp.vertices.end());
        return comp;
    }
    // cycle: start at the lowest vertex, first edge in M'
    std::size_t n = comp.vertices.size();
    std::size_t start = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (comp.vertices[i] < comp.vertices[start]) start = i;
    AlternatingComponent out;
    out.is_cycle = true;
    // the two incident edges of vertices[start] along the cycle are
    // edge_ids[start] (forward) and edge_ids[start-1] (backward)
    bool forward_in_second = comp.in_second[start];
    if (forward_in_second) {
        for (std::size_t t = 0; t < n; ++t) {
            std::size_t k = (start + t) % n;
            out.vertices.push_back(comp.vertices[k]);
            out.edge_ids.push_back(comp.edge_ids[k]);
            out.in_second.push_back(comp.in_second[k]);
        }
    } else {
        // walk backwards so the first traversed edge is the M'-edge
        for (std::size_t t = 0; t < n; ++t) {
            std::size_t kv = (start + n - t) % n;
            std::size_t ke = (start + n - 1 - t) % n;
            out.vertices.push_back(comp.vertices[kv % n]);
            out.edge_ids.push_back(comp.edge_ids[ke]);
            out.in_second.push_back(comp.in_second[ke]);
        }
        out.vertices[0] = comp.vertices[start];
    }
    if (!out.in_second.front())
        throw numeric_error("cycle orientation failed to start with an off-matching edge");
    return out;
}

struct Shift {
    int from_edge;
    int to_edge;   // general mode: the single next matching edge
    int to_edge2;  // perfect mode: second adjacent matching edge, else -1
    int facility;
};

RerouteReport run_reroute(const FlmInstance& inst, const FractionalFlm& frac, const Matching& m_in,
                          bool perfect_mode, bool verify_each_iteration) {
    const Graph& g = inst.compat;
    Matching target = normalize_matching(m_in);
    for (int id : target)
        if (id < 0 || id >= g.edge_count()) throw identifier_error("matching edge id out of range");

    int max_size = nu(g);
    if ((int)target.size() != max_size)
        throw precondition_error("target matching is not maximum (" +
                                 std::to_string(target.size()) + " < " +
                                 std::to_string(max_size) + ")");
    if (perfect_mode && 2 * (int)target.size() != g.n)
        throw precondition_error("target matching is not perfect");

    {
        auto violations = check_lp_flm_feasible(inst, frac);
        if (!violations.empty())
            throw precondition_error("input point infeasible for LP_FLM: " + violations[0]);
    }

    std::vector<char> in_m(g.edge_count(), false);
    for (int id : target) in_m[id] = true;

    RerouteReport rep;
    rep.output = frac;
    FractionalFlm& xt = rep.output;

    MatchingDecomposition initial =
        decompose_to_maximum_matchings(g, FractionalMatching{flm_edge_marginals(frac)});
    GammaMap gamma;
    for (std::size_t k = 0; k < initial.matchings.size(); ++k)
        gamma[initial.matchings[k]] += initial.coefficients[k];

    long long phi = potential_of(inst, xt, gamma, in_m);
    rep.initial_potential = phi;

    for (;;) {
        // any supported maximum matching other than the target
        auto it = gamma.end();
        for (auto g_it = gamma.begin(); g_it != gamma.end(); ++g_it)
            if (g_it->second > kGammaDrop && g_it->first != target) {
                it = g_it;
                break;
            }
        if (it == gamma.end()) break;
        const Matching m_prime = it->first;
        const double gamma_mp = it->second;

        auto components = symmetric_difference_components(g, target, m_prime);
        if (components.empty())
            throw numeric_error("supported matching differs from target but symmetric difference "
                                "is empty");
        AlternatingComponent comp = orient_component(components.front());
        if (perfect_mode && !comp.is_cycle)
            throw numeric_error("expected alternating cycles only for perfect matchings");
        if (comp.edge_ids.size() % 2 != 0)
            throw numeric_error("alternating component of two maximum matchings has odd length");

        // facility choice per off-matching edge: largest current mass
        std::vector<Shift> shifts;
        double eps = gamma_mp;
        const std::size_t len = comp.edge_ids.size();
        for (std::size_t t = 0; t < len; ++t) {
            if (!comp.in_second[t]) continue;
            int e_prime = comp.edge_ids[t];
            int best_fac = -1;
            double best_mass = 0.0;
            for (int i = 0; i < inst.n_facilities; ++i) {
                double v = xt.x_at(i, e_prime);
                if (v > best_mass) {
                    best_mass = v;
                    best_fac = i;
                }
            }
            if (best_fac == -1)
                throw numeric_error("no facility services a supported off-matching edge");
            Shift s;
            s.from_edge = e_prime;
            s.facility = best_fac;
            if (perfect_mode) {
                s.to_edge = comp.edge_ids[(t + 1) % len];
                s.to_edge2 = comp.edge_ids[(t + len - 1) % len];
            } else {
                if (t + 1 < len) {
                    s.to_edge = comp.edge_ids[t + 1];
                } else {
                    // cycle wrap: the next matching edge after the last M'-edge
                    if (!comp.is_cycle)
                        throw numeric_error("path component ends on an off-matching edge");
                    s.to_edge = comp.edge_ids[0];
                }
                s.to_edge2 = -1;
            }
            eps = std::min(eps, best_mass);
            shifts.push_back(s);
        }
        if (shifts.empty()) throw numeric_error("component carries no off-matching edge");
        if (!(eps > 0.0)) throw numeric_error("nonpositive reroute step");

        for (const auto& s : shifts) {
            xt.x_at(s.facility, s.from_edge) -= eps;
            if (xt.x_at(s.facility, s.from_edge) < kSupportTol) xt.x_at(s.facility, s.from_edge) = 0.0;
            if (perfect_mode) {
                xt.x_at(s.facility, s.to_edge) += eps / 2.0;
                xt.x_at(s.facility, s.to_edge2) += eps / 2.0;
            } else {
                xt.x_at(s.facility, s.to_edge) += eps;
            }
            rep.transfer_total += eps;
        }

        // gamma update: gamma_{M'} -= eps, gamma_{M' xor P} += eps
        Matching swapped = m_prime;
        {
            std::vector<char> flip(g.edge_count(), false);
            for (int id : comp.edge_ids) flip[id] = true;
            Matching next;
            std::vector<char> in_prime(g.edge_count(), false);
            for (int id : m_prime) in_prime[id] = true;
            for (int id = 0; id < g.edge_count(); ++id)
                if (in_prime[id] != flip[id]) next.push_back(id);
            swapped = normalize_matching(next);
        }
        gamma[m_prime] -= eps;
        if (gamma[m_prime] < kGammaDrop) gamma.erase(m_prime);
        gamma[swapped] += eps;

        long long new_phi = potential_of(inst, xt, gamma, in_m);
        if (new_phi >= phi) {
            std::ostringstream os;
            os << "potential did not strictly decrease: " << phi << " -> " << new_phi
               << " at iteration " << rep.iterations;
            throw numeric_error(os.str());
        }
        phi = new_phi;
        ++rep.iterations;
        rep.trace.push_back({rep.iterations, eps, (int)comp.edge_ids.size(), phi});

        if (verify_each_iteration) {
            FractionalFlm probe = xt;
            if (!perfect_mode)
                for (double& v : probe.y) v *= 2.0;
            auto violations = check_lp_flm_feasible(inst, probe);
            if (!violations.empty())
                throw numeric_error("feasibility lost during reroute: " + violations[0]);
        }
    }

    rep.final_potential = phi;
    if (phi != 0) throw numeric_error("reroute terminated with nonzero potential");

    // clear sub-tolerance dust off the non-matching support
    for (int i = 0; i < inst.n_facilities; ++i)
        for (int e = 0; e < g.edge_count(); ++e)
            if (!in_m[e] && xt.x_at(i, e) <= kSupportTol) xt.x_at(i, e) = 0.0;

    if (!perfect_mode)
        for (double& v : xt.y) v *= 2.0;
    return rep;
}

} // namespace

long long reroute_potential(const FlmInstance& inst, const FractionalFlm& x_tilde,
                            const MatchingDecomposition& gamma, const Matching& m) {
    std::vector<char> in_m(inst.compat.edge_count(), false);
    for (int id : normalize_matching(m)) in_m[id] = true;
    GammaMap gm;
    for (std::size_t k = 0; k < gamma.matchings.size(); ++k)
        gm[normalize_matching(gamma.matchings[k])] += gamma.coefficients[k];
    return potential_of(inst, x_tilde, gm, in_m);
}

RerouteReport reroute_general(const FlmInstance& inst, const FractionalFlm& frac,
                              const Matching& m, bool verify_each_iteration) {
    return run_reroute(inst, frac, m, /*perfect_mode=*/false, verify_each_iteration);
}

RerouteReport reroute_perfect(const FlmInstance& inst, const FractionalFlm& frac,
                              const Matching& m, bool verify_each_iteration) {
    return run_reroute(inst, frac, m, /*perfect_mode=*/true, verify_each_iteration);
}

} // namespace flm
