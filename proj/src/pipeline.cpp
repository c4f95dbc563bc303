#include "flm/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace flm {

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

void require(bool cond, const std::string& what) {
    if (!cond) throw numeric_error("pipeline invariant failed: " + what);
}

std::vector<double> edge_lengths(const FlmInstance& inst) {
    std::vector<double> d(inst.compat.edge_count());
    for (int e = 0; e < inst.compat.edge_count(); ++e) d[e] = edge_length_by_id(inst, e);
    return d;
}

FlmSolution trivial_empty_solution(const FlmInstance& inst) {
    return finalize_solution(inst, {}, {}, {});
}

} // namespace

std::string mode_name(PipelineMode mode) {
    switch (mode) {
        case PipelineMode::general: return "general";
        case PipelineMode::perfect_reroute: return "perfect-reroute";
        case PipelineMode::perfect_direct: return "perfect-direct";
        case PipelineMode::automatic: return "auto";
    }
    return "?";
}

PipelineMode mode_from_name(const std::string& name) {
    if (name == "general") return PipelineMode::general;
    if (name == "perfect-reroute") return PipelineMode::perfect_reroute;
    if (name == "perfect-direct") return PipelineMode::perfect_direct;
    if (name == "auto") return PipelineMode::automatic;
    throw precondition_error("unknown pipeline mode '" + name + "'");
}

double default_lambda(PipelineMode mode) {
    switch (mode) {
        case PipelineMode::general: return 1.934;
        case PipelineMode::perfect_reroute: return 2.373;
        case PipelineMode::perfect_direct: return 2.218;
        case PipelineMode::automatic: break;
    }
    throw precondition_error("no default lambda for unresolved mode");
}

double guarantee_bound(PipelineMode mode, double lambda) {
    double rounding = 1.0 + 2.0 / std::exp(lambda);
    switch (mode) {
        case PipelineMode::general: return std::max(2.0 * lambda, 3.0 * rounding);
        case PipelineMode::perfect_reroute: return std::max(lambda, 2.0 * rounding);
        case PipelineMode::perfect_direct: return std::max(lambda, 2.0 + 2.0 / std::exp(lambda));
        case PipelineMode::automatic: break;
    }
    throw precondition_error("no guarantee bound for unresolved mode");
}

PipelineReport solve_flm_main(const FlmInstance& inst, const PipelineConfig& cfg) {
    if (cfg.mode != PipelineMode::general && cfg.mode != PipelineMode::perfect_reroute)
        throw precondition_error("solve_flm_main expects mode general or perfect-reroute");
    const bool perfect = cfg.mode == PipelineMode::perfect_reroute;
    if (perfect && !is_perfectly_matchable(inst.compat))
        throw precondition_error("perfect-reroute mode requires a perfectly matchable graph");
    if (cfg.trials < 1) throw precondition_error("trials must be >= 1");

    PipelineReport rep;
    rep.resolved_mode = cfg.mode;
    rep.lambda = cfg.lambda > 0.0 ? cfg.lambda : default_lambda(cfg.mode);
    rep.seed = cfg.seed;
    rep.trials = cfg.trials;
    rep.guarantee_bound = guarantee_bound(cfg.mode, rep.lambda);

    double t0 = now_ms();
    LpFlmResult lp = solve_lp_flm(inst);
    rep.ms_lp = now_ms() - t0;
    rep.nu = lp.nu;
    rep.lp_value = lp.value;
    rep.lp_open = lp.open_cost;
    rep.lp_conn = lp.conn_cost;
    rep.cuts = lp.cuts_added;

    if (lp.nu == 0) {
        rep.solution = trivial_empty_solution(inst);
        return rep;
    }

    t0 = now_ms();
    std::vector<double> lengths = edge_lengths(inst);
    Matching m_star = perfect ? min_cost_perfect_matching(inst.compat, lengths)
                              : min_cost_maximum_matching(inst.compat, lengths);
    rep.ms_matching = now_ms() - t0;
    rep.matching_d_cost = matching_cost(inst.compat, m_star, lengths);
    if (cfg.verify_lemmas)
        require(rep.matching_d_cost <= rep.lp_conn + 1e-6,
                "min-cost matching d-cost exceeds conn_FLM of the LP optimum");

    t0 = now_ms();
    RerouteReport rr = perfect ? reroute_perfect(inst, lp.frac, m_star)
                               : reroute_general(inst, lp.frac, m_star);
    rep.ms_reroute = now_ms() - t0;

    // interpret (x~, y~) as a fractional LP_UFL point over the meta-clients
    UflInstance meta = build_meta_client_ufl(inst, m_star);
    UflFractional meta_frac;
    meta_frac.n_facilities = inst.n_facilities;
    meta_frac.n_clients = (int)m_star.size();
    meta_frac.y = rr.output.y;
    meta_frac.x.assign((std::size_t)inst.n_facilities * m_star.size(), 0.0);
    Matching sorted = normalize_matching(m_star);
    for (int i = 0; i < inst.n_facilities; ++i)
        for (std::size_t t = 0; t < sorted.size(); ++t)
            meta_frac.x_at(i, (int)t) = rr.output.x_at(i, sorted[t]);
    if (cfg.verify_lemmas) {
        require(check_lp_ufl_feasible(meta, meta_frac).empty(),
                "rerouted point not feasible for the meta-client LP_UFL");
        require(validate_three_hop(meta).empty(), "meta-client costs break the three-hop inequality");
    }

    t0 = now_ms();
    double best = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    FlmSolution best_sol;
    for (int t = 0; t < cfg.trials; ++t) {
        std::uint64_t trial_seed = cfg.seed + (std::uint64_t)t;
        UflSolution rounded = round_bifactor(meta, meta_frac, rep.lambda, trial_seed);
        std::vector<int> assignment(sorted.size(), -1);
        for (std::size_t k = 0; k < sorted.size(); ++k) assignment[k] = rounded.assignment[k];
        FlmSolution sol = finalize_solution(inst, rounded.open_set, sorted, assignment);
        sum += sol.total();
        rep.trial_costs.push_back(sol.total());
        if (sol.total() < best) {
            best = sol.total();
            best_sol = sol;
            rep.best_seed = trial_seed;
        }
    }
    rep.ms_round = now_ms() - t0;
    rep.solution = std::move(best_sol);
    rep.mean_cost = sum / cfg.trials;
    rep.reroute = std::move(rr);

    require(rep.solution.total() >= rep.lp_value - 1e-6, "output cost fell below the LP value");
    return rep;
}

PipelineReport solve_flm_perfect(const FlmInstance& inst, const PipelineConfig& cfg) {
    if (cfg.mode != PipelineMode::perfect_direct)
        throw precondition_error("solve_flm_perfect expects mode perfect-direct");
    if (!is_perfectly_matchable(inst.compat))
        throw precondition_error("perfect-direct mode requires a perfectly matchable graph");
    if (cfg.trials < 1) throw precondition_error("trials must be >= 1");

    PipelineReport rep;
    rep.resolved_mode = cfg.mode;
    rep.lambda = cfg.lambda > 0.0 ? cfg.lambda : default_lambda(cfg.mode);
    rep.seed = cfg.seed;
    rep.trials = cfg.trials;
    rep.guarantee_bound = guarantee_bound(cfg.mode, rep.lambda);

    double t0 = now_ms();
    LpFlmResult lp = solve_lp_flm(inst);
    rep.ms_lp = now_ms() - t0;
    rep.nu = lp.nu;
    rep.lp_value = lp.value;
    rep.lp_open = lp.open_cost;
    rep.lp_conn = lp.conn_cost;
    rep.cuts = lp.cuts_added;

    if (lp.nu == 0) {
        rep.solution = trivial_empty_solution(inst);
        return rep;
    }

    UflFractional projected = project_to_ufl(inst, lp.frac);
    UflInstance client_ufl;
    client_ufl.n_facilities = inst.n_facilities;
    client_ufl.n_clients = inst.n_clients;
    client_ufl.opening_cost = inst.opening_cost;
    client_ufl.assignment.assign((std::size_t)inst.n_facilities * inst.n_clients, 0.0);
    for (int i = 0; i < inst.n_facilities; ++i)
        for (int j = 0; j < inst.n_clients; ++j) client_ufl.cost(i, j) = inst.dist_fc(i, j);

    std::vector<double> lengths = edge_lengths(inst);
    std::vector<double> marginals = flm_edge_marginals(lp.frac);

    double best = std::numeric_limits<double>::infinity();
    double sum = 0.0;
    FlmSolution best_sol;
    double ms_matching = 0.0, ms_round = 0.0;
    for (int t = 0; t < cfg.trials; ++t) {
        std::uint64_t trial_seed = cfg.seed + (std::uint64_t)t;
        double r0 = now_ms();
        UflSolution rounded = round_bifactor(client_ufl, projected, rep.lambda, trial_seed);
        ms_round += now_ms() - r0;

        r0 = now_ms();
        std::vector<double> set_costs(inst.compat.edge_count());
        for (int e = 0; e < inst.compat.edge_count(); ++e)
            set_costs[e] = set_distance_pair(inst, rounded.open_set, inst.compat.edges[e]).first;
        Matching m_s = min_cost_perfect_matching(inst.compat, set_costs);
        ms_matching += now_ms() - r0;

        if (cfg.verify_lemmas) {
            for (int e = 0; e < inst.compat.edge_count(); ++e) {
                auto [j, k] = inst.compat.edges[e];
                double dsj = set_distance_client(inst, rounded.open_set, j).first;
                double dsk = set_distance_client(inst, rounded.open_set, k).first;
                require(set_costs[e] <= lengths[e] + dsj + dsk + 1e-9,
                        "d(S,e) <= d(e) + d(S,j) + d(S,k) failed");
            }
            double matched_cost = matching_cost(inst.compat, m_s, set_costs);
            double frac_bound = 0.0;
            for (int e = 0; e < inst.compat.edge_count(); ++e)
                frac_bound += set_costs[e] * marginals[e];
            require(matched_cost <= frac_bound + 1e-6,
                    "assignment cost exceeds sum of d(S,e) x*_e");
        }

        std::vector<int> assignment;
        for (int id : m_s)
            assignment.push_back(set_distance_pair(inst, rounded.open_set, inst.compat.edges[id]).second);
        FlmSolution sol = finalize_solution(inst, rounded.open_set, m_s, assignment);
        sum += sol.total();
        rep.trial_costs.push_back(sol.total());
        if (sol.total() < best) {
            best = sol.total();
            best_sol = sol;
            rep.best_seed = trial_seed;
        }
    }
    rep.ms_matching = ms_matching;
    rep.ms_round = ms_round;
    rep.solution = std::move(best_sol);
    rep.mean_cost = sum / cfg.trials;

    require(rep.solution.total() >= rep.lp_value - 1e-6, "output cost fell below the LP value");
    return rep;
}

PipelineReport solve_flm(const FlmInstance& inst, PipelineConfig cfg) {
    if (cfg.mode == PipelineMode::automatic)
        cfg.mode = is_perfectly_matchable(inst.compat) ? PipelineMode::perfect_direct
                                                       : PipelineMode::general;
    if (cfg.mode == PipelineMode::perfect_direct) return solve_flm_perfect(inst, cfg);
    return solve_flm_main(inst, cfg);
}

} // namespace flm
