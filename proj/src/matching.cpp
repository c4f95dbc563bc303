#include "flm/matching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

namespace flm {

namespace {

// ---------------------------------------------------------------------------
// Unweighted blossom (augmenting path search with contraction), O(V^3).
// mate[v] = -1 when v is unmatched.
// ---------------------------------------------------------------------------
class CardinalityBlossom {
public:
    explicit CardinalityBlossom(const Graph& g) : n_(g.n), adj_(g.n) {
        for (const auto& [u, v] : g.edges) {
            adj_[u].push_back(v);
            adj_[v].push_back(u);
        }
        mate_.assign(n_, -1);
    }

    std::vector<int> solve() {
        for (int v = 0; v < n_; ++v)
            if (mate_[v] == -1) find_augmenting_path(v);
        return mate_;
    }

private:
    int n_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> mate_, parent_, base_;
    std::vector<char> used_, blossom_;

    int lowest_common_base(int a, int b) {
        std::vector<char> seen(n_, false);
        for (;;) {
            a = base_[a];
            seen[a] = true;
            if (mate_[a] == -1) break;
            a = parent_[mate_[a]];
        }
        for (;;) {
            b = base_[b];
            if (seen[b]) return b;
            b = parent_[mate_[b]];
        }
    }

    void mark_path(int v, int b, int child) {
        while (base_[v] != b) {
            blossom_[base_[v]] = true;
            blossom_[base_[mate_[v]]] = true;
            parent_[v] = child;
            child = mate_[v];
            v = parent_[mate_[v]];
        }
    }

    bool find_augmenting_path(int root) {
        used_.assign(n_, false);
        parent_.assign(n_, -1);
        base_.resize(n_);
        std::iota(base_.begin(), base_.end(), 0);
        used_[root] = true;
        std::queue<int> q;
        q.push(root);
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int to : adj_[v]) {
                if (base_[v] == base_[to] || mate_[v] == to) continue;
                if (to == root || (mate_[to] != -1 && parent_[mate_[to]] != -1)) {
                    // odd cycle: contract the blossom
                    int cur_base = lowest_common_base(v, to);
                    blossom_.assign(n_, false);
                    mark_path(v, cur_base, to);
                    mark_path(to, cur_base, v);
                    for (int i = 0; i < n_; ++i)
                        if (blossom_[base_[i]]) {
                            base_[i] = cur_base;
                            if (!used_[i]) {
                                used_[i] = true;
                                q.push(i);
                            }
                        }
                } else if (parent_[to] == -1) {
                    parent_[to] = v;
                    if (mate_[to] == -1) {
                        // augment along root..to
                        int u = to;
                        while (u != -1) {
                            int pv = parent_[u], ppv = mate_[pv];
                            mate_[u] = pv;
                            mate_[pv] = u;
                            u = ppv;
                        }
                        return true;
                    }
                    used_[mate_[to]] = true;
                    q.push(mate_[to]);
                }
            }
        }
        return false;
    }
};

// ---------------------------------------------------------------------------
// Maximum weight matching on a complete graph, O(V^3), primal-dual blossom
// with integer weights (the classic lab/slack/flower formulation). Vertices
// are 1-based internally; weights must be even and nonnegative so that all
// dual values stay integral.
// ---------------------------------------------------------------------------
class WeightedBlossom {
    using ll = long long;
    static constexpr ll kInf = std::numeric_limits<ll>::max() / 4;

    struct Arc {
        int u = 0, v = 0;
        ll w = 0;
    };

public:
    explicit WeightedBlossom(int n) : n_(n), cap_(2 * n + 2) {
        g_.assign(cap_, std::vector<Arc>(cap_));
        for (int u = 0; u < cap_; ++u)
            for (int v = 0; v < cap_; ++v) g_[u][v] = Arc{u, v, 0};
        flower_.assign(cap_, {});
        flower_from_.assign(cap_, std::vector<int>(n_ + 1, 0));
        lab_.assign(cap_, 0);
        match_.assign(cap_, 0);
        slack_.assign(cap_, 0);
        st_.assign(cap_, 0);
        pa_.assign(cap_, 0);
        s_.assign(cap_, 0);
        vis_.assign(cap_, 0);
    }

    // weight must be even and >= 0
    void set_weight(int u, int v, ll w) {
        g_[u + 1][v + 1].w = w;
        g_[v + 1][u + 1].w = w;
    }

    // mate[v] = matched partner or -1 (0-based)
    std::vector<int> solve() {
        std::fill(match_.begin(), match_.end(), 0);
        n_x_ = n_;
        for (int u = 0; u <= n_; ++u) {
            st_[u] = u;
            flower_[u].clear();
        }
        for (int u = n_ + 1; u < cap_; ++u) {
            st_[u] = 0;
            flower_[u].clear();
        }
        ll w_max = 0;
        for (int u = 1; u <= n_; ++u)
            for (int v = 1; v <= n_; ++v) {
                flower_from_[u][v] = (u == v ? u : 0);
                w_max = std::max(w_max, g_[u][v].w);
            }
        for (int u = 1; u <= n_; ++u) lab_[u] = w_max;
        while (run_phase()) {
        }
        std::vector<int> mate(n_, -1);
        for (int u = 1; u <= n_; ++u)
            if (match_[u]) mate[u - 1] = match_[u] - 1;
        return mate;
    }

private:
    int n_, cap_, n_x_ = 0;
    std::vector<std::vector<Arc>> g_;
    std::vector<std::vector<int>> flower_, flower_from_;
    std::vector<ll> lab_;
    std::vector<int> match_, slack_, st_, pa_, s_, vis_;
    std::deque<int> q_;
    int timestamp_ = 0;

    ll e_delta(const Arc& e) const { return lab_[e.u] + lab_[e.v] - g_[e.u][e.v].w * 2; }

    void update_slack(int u, int x) {
        if (!slack_[x] || e_delta(g_[u][x]) < e_delta(g_[slack_[x]][x])) slack_[x] = u;
    }

    void set_slack(int x) {
        slack_[x] = 0;
        for (int u = 1; u <= n_; ++u)
            if (g_[u][x].w > 0 && st_[u] != x && s_[st_[u]] == 0) update_slack(u, x);
    }

    void q_push(int x) {
        if (x <= n_) {
            q_.push_back(x);
        } else {
            for (int i : flower_[x]) q_push(i);
        }
    }

    void set_st(int x, int b) {
        st_[x] = b;
        if (x > n_)
            for (int i : flower_[x]) set_st(i, b);
    }

    int get_pr(int b, int xr) {
        int pr = (int)(std::find(flower_[b].begin(), flower_[b].end(), xr) - flower_[b].begin());
        if (pr % 2 == 1) {
            std::reverse(flower_[b].begin() + 1, flower_[b].end());
            return (int)flower_[b].size() - pr;
        }
        return pr;
    }

    void set_match(int u, int v) {
        match_[u] = g_[u][v].v;
        if (u > n_) {
            Arc e = g_[u][v];
            int xr = flower_from_[u][e.u];
            int pr = get_pr(u, xr);
            for (int i = 0; i < pr; ++i) set_match(flower_[u][i], flower_[u][i ^ 1]);
            set_match(xr, v);
            std::rotate(flower_[u].begin(), flower_[u].begin() + pr, flower_[u].end());
        }
    }

    void augment(int u, int v) {
        for (;;) {
            int xnv = st_[match_[u]];
            set_match(u, v);
            if (!xnv) return;
            set_match(xnv, st_[pa_[xnv]]);
            u = st_[pa_[xnv]];
            v = xnv;
        }
    }

    int get_lca(int u, int v) {
        for (++timestamp_; u || v; std::swap(u, v)) {
            if (u == 0) continue;
            if (vis_[u] == timestamp_) return u;
            vis_[u] = timestamp_;
            u = st_[match_[u]];
            if (u) u = st_[pa_[u]];
        }
        return 0;
    }

    void add_blossom(int u, int lca, int v) {
        int b = n_ + 1;
        while (b <= n_x_ && st_[b]) ++b;
        if (b > n_x_) ++n_x_;
        lab_[b] = 0;
        s_[b] = 0;
        match_[b] = match_[lca];
        flower_[b].clear();
        flower_[b].push_back(lca);
        for (int x = u, y; x != lca; x = st_[pa_[y]]) {
            flower_[b].push_back(x);
            flower_[b].push_back(y = st_[match_[x]]);
            q_push(y);
        }
        std::reverse(flower_[b].begin() + 1, flower_[b].end());
        for (int x = v, y; x != lca; x = st_[pa_[y]]) {
            flower_[b].push_back(x);
            flower_[b].push_back(y = st_[match_[x]]);
            q_push(y);
        }
        set_st(b, b);
        for (int x = 1; x <= n_x_; ++x) g_[b][x].w = g_[x][b].w = 0;
        for (int x = 1; x <= n_; ++x) flower_from_[b][x] = 0;
        for (int xs : flower_[b]) {
            for (int x = 1; x <= n_x_; ++x)
                if (g_[b][x].w == 0 || e_delta(g_[xs][x]) < e_delta(g_[b][x])) {
                    g_[b][x] = g_[xs][x];
                    g_[x][b] = g_[x][xs];
                }
            for (int x = 1; x <= n_; ++x)
                if (flower_from_[xs][x]) flower_from_[b][x] = xs;
        }
        set_slack(b);
    }

    void expand_blossom(int b) { // lab[b] == 0, S[b] == 1
        for (int i : flower_[b]) set_st(i, i);
        int xr = flower_from_[b][g_[b][pa_[b]].u];
        int pr = get_pr(b, xr);
        for (int i = 0; i < pr; i += 2) {
            int xs = flower_[b][i], xns = flower_[b][i + 1];
            pa_[xs] = g_[xns][xs].u;
            s_[xs] = 1;
            s_[xns] = 0;
            slack_[xs] = 0;
            set_slack(xns);
            q_push(xns);
        }
        s_[xr] = 1;
        pa_[xr] = pa_[b];
        for (int i = pr + 1; i < (int)flower_[b].size(); ++i) {
            int xs = flower_[b][i];
            s_[xs] = -1;
            set_slack(xs);
        }
        st_[b] = 0;
    }

    bool on_found_edge(const Arc& e) {
        int u = st_[e.u], v = st_[e.v];
        if (s_[v] == -1) {
            pa_[v] = e.u;
            s_[v] = 1;
            int nu = st_[match_[v]];
            slack_[v] = slack_[nu] = 0;
            s_[nu] = 0;
            q_push(nu);
        } else if (s_[v] == 0) {
            int lca = get_lca(u, v);
            if (!lca) {
                augment(u, v);
                augment(v, u);
                return true;
            }
            add_blossom(u, lca, v);
        }
        return false;
    }

    // One search phase; returns true when an augmentation happened, false
    // when no further matching of larger weight exists.
    bool run_phase() {
        std::fill(s_.begin() + 1, s_.begin() + n_x_ + 1, -1);
        std::fill(slack_.begin() + 1, slack_.begin() + n_x_ + 1, 0);
        q_.clear();
        for (int x = 1; x <= n_x_; ++x)
            if (st_[x] == x && !match_[x]) {
                pa_[x] = 0;
                s_[x] = 0;
                q_push(x);
            }
        if (q_.empty()) return false;
        for (;;) {
            while (!q_.empty()) {
                int u = q_.front();
                q_.pop_front();
                if (s_[st_[u]] == 1) continue;
                for (int v = 1; v <= n_; ++v)
                    if (g_[u][v].w > 0 && st_[u] != st_[v]) {
                        if (e_delta(g_[u][v]) == 0) {
                            if (on_found_edge(g_[u][v])) return true;
                        } else {
                            update_slack(u, st_[v]);
                        }
                    }
            }
            ll d = kInf;
            for (int b = n_ + 1; b <= n_x_; ++b)
                if (st_[b] == b && s_[b] == 1) d = std::min(d, lab_[b] / 2);
            for (int x = 1; x <= n_x_; ++x)
                if (st_[x] == x && slack_[x]) {
                    if (s_[x] == -1)
                        d = std::min(d, e_delta(g_[slack_[x]][x]));
                    else if (s_[x] == 0)
                        d = std::min(d, e_delta(g_[slack_[x]][x]) / 2);
                }
            for (int u = 1; u <= n_; ++u) {
                if (s_[st_[u]] == 0) {
                    if (lab_[u] <= d) return false; // a free dual would hit zero
                    lab_[u] -= d;
                } else if (s_[st_[u]] == 1) {
                    lab_[u] += d;
                }
            }
            for (int b = n_ + 1; b <= n_x_; ++b)
                if (st_[b] == b) {
                    if (s_[b] == 0)
                        lab_[b] += d * 2;
                    else if (s_[b] == 1)
                        lab_[b] -= d * 2;
                }
            q_.clear();
            for (int x = 1; x <= n_x_; ++x)
                if (st_[x] == x && slack_[x] && st_[slack_[x]] != x &&
                    e_delta(g_[slack_[x]][x]) == 0)
                    if (on_found_edge(g_[slack_[x]][x])) return true;
            for (int b = n_ + 1; b <= n_x_; ++b)
                if (st_[b] == b && s_[b] == 1 && lab_[b] == 0) expand_blossom(b);
        }
    }
};

Matching mate_to_matching(const Graph& g, const std::vector<int>& mate) {
    Matching m;
    for (int id = 0; id < g.edge_count(); ++id) {
        auto [u, v] = g.edges[id];
        if (mate[u] == v) m.push_back(id);
    }
    return m;
}

// Costs are mapped to even integer weights w = 2*(K - c) on a scaled grid so
// that larger cardinality always dominates and duals stay integral. Scale
// 2^26 keeps the maximum-weight arithmetic well inside the exact range of
// both int64 and double; integer-valued costs below ~2^25 round-trip exactly.
constexpr double kCostScale = 67108864.0; // 2^26

Matching weighted_engine(const Graph& g, const std::vector<double>& cost) {
    if ((int)cost.size() != g.edge_count())
        throw precondition_error("cost vector size mismatch with edge count");
    for (double c : cost)
        if (!(c >= 0.0)) throw precondition_error("edge costs must be nonnegative");
    if (g.n == 0) return {};

    long long total = 0;
    std::vector<long long> scaled(cost.size());
    for (std::size_t i = 0; i < cost.size(); ++i) {
        scaled[i] = std::llround(cost[i] * kCostScale);
        total += scaled[i];
    }
    long long shift = total + 1;

    int n = g.n % 2 == 0 ? g.n : g.n + 1; // pad to even, isolated dummy
    WeightedBlossom engine(n);
    for (int id = 0; id < g.edge_count(); ++id) {
        auto [u, v] = g.edges[id];
        engine.set_weight(u, v, 2 * (shift - scaled[id]));
    }
    std::vector<int> mate = engine.solve();
    mate.resize(g.n, -1);
    return mate_to_matching(g, mate);
}

} // namespace

Matching max_cardinality_matching(const Graph& g) {
    CardinalityBlossom engine(g);
    return mate_to_matching(g, engine.solve());
}

int nu(const Graph& g) { return (int)max_cardinality_matching(g).size(); }

bool is_perfectly_matchable(const Graph& g) { return 2 * nu(g) == g.n; }

Matching min_cost_maximum_matching(const Graph& g, const std::vector<double>& cost) {
    return weighted_engine(g, cost);
}

Matching min_cost_perfect_matching(const Graph& g, const std::vector<double>& cost) {
    Matching m = weighted_engine(g, cost);
    if (2 * (int)m.size() != g.n)
        throw infeasible_error("graph has no perfect matching (nu = " +
                               std::to_string(m.size()) + ", |V| = " + std::to_string(g.n) + ")");
    return m;
}

double matching_cost(const Graph& g, const Matching& m, const std::vector<double>& cost) {
    (void)g;
    Matching sorted = normalize_matching(m);
    double c = 0.0;
    for (int id : sorted) c += cost[id];
    return c;
}

std::vector<AlternatingComponent> symmetric_difference_components(const Graph& g,
                                                                  const Matching& m_first,
                                                                  const Matching& m_second) {
    Matching a = normalize_matching(m_first), b = normalize_matching(m_second);
    std::vector<char> in_a(g.edge_count(), false), in_b(g.edge_count(), false);
    for (int id : a) in_a[id] = true;
    for (int id : b) in_b[id] = true;

    // edges of the symmetric difference, with per-vertex incidence
    std::vector<std::vector<int>> inc(g.n);
    std::vector<char> in_diff(g.edge_count(), false);
    for (int id = 0; id < g.edge_count(); ++id) {
        if (in_a[id] == in_b[id]) continue;
        in_diff[id] = true;
        inc[g.edges[id].first].push_back(id);
        inc[g.edges[id].second].push_back(id);
    }
    for (int v = 0; v < g.n; ++v)
        if (inc[v].size() > 2)
            throw precondition_error("inputs are not matchings: vertex " + std::to_string(v) +
                                     " has degree " + std::to_string(inc[v].size()) +
                                     " in the symmetric difference");

    std::vector<char> visited_edge(g.edge_count(), false);
    std::vector<AlternatingComponent> out;

    auto walk = [&](int start_vertex, bool is_cycle) {
        AlternatingComponent comp;
        comp.is_cycle = is_cycle;
        int v = start_vertex;
        comp.vertices.push_back(v);
        for (;;) {
            int next_id = -1;
            for (int id : inc[v])
                if (!visited_edge[id]) {
                    next_id = id;
                    break;
                }
            if (next_id == -1) break;
            visited_edge[next_id] = true;
            comp.edge_ids.push_back(next_id);
            comp.in_second.push_back(in_b[next_id]);
            auto [x, y] = g.edges[next_id];
            v = (x == v) ? y : x;
            comp.vertices.push_back(v);
        }
        if (is_cycle) comp.vertices.pop_back(); // last == first
        return comp;
    };

    // paths first: start at degree-1 vertices, lowest index first
    for (int v = 0; v < g.n; ++v) {
        if (inc[v].size() != 1) continue;
        bool fresh = !visited_edge[inc[v][0]];
        if (fresh) out.push_back(walk(v, false));
    }
    // remaining components are cycles; start at lowest unvisited vertex
    for (int v = 0; v < g.n; ++v) {
        for (int id : inc[v])
            if (!visited_edge[id]) {
                out.push_back(walk(v, true));
                break;
            }
    }

    for (const auto& comp : out)
        for (std::size_t i = 1; i < comp.in_second.size(); ++i)
            if (comp.in_second[i] == comp.in_second[i - 1])
                throw precondition_error("symmetric difference walk does not alternate");
    return out;
}

std::optional<OddSetCut> separate_odd_set(const Graph& g, const FractionalMatching& z,
                                          SeparationMode mode, double tol) {
    if ((int)z.z.size() != g.edge_count())
        throw precondition_error("fractional matching size mismatch with edge count");
    if (g.n > 22)
        throw capability_error("odd-set separation implemented exhaustively for |V| <= 22 only "
                               "(minimum odd cut routine not implemented)");

    // weighted degree per vertex and adjacency weights
    std::vector<double> wdeg(g.n, 0.0);
    std::vector<std::vector<std::pair<int, double>>> nbr(g.n);
    for (int id = 0; id < g.edge_count(); ++id) {
        auto [u, v] = g.edges[id];
        wdeg[u] += z.z[id];
        wdeg[v] += z.z[id];
        nbr[u].push_back({v, z.z[id]});
        nbr[v].push_back({u, z.z[id]});
    }

    OddSetCut best;
    best.mode = mode;
    bool found = false;

    std::vector<int> current;
    std::vector<char> in_set(g.n, false);
    double inside = 0.0, degsum = 0.0;

    // DFS over subsets with incremental inside-edge and degree sums.
    std::function<void(int)> enumerate = [&](int v) {
        if (v == g.n) {
            if (current.size() % 2 == 0 || current.empty()) return;
            double viol;
            double lhs;
            if (mode == SeparationMode::general) {
                lhs = inside;
                viol = inside - (double)(current.size() - 1) / 2.0;
            } else {
                lhs = degsum - 2.0 * inside; // = z(delta(U))
                viol = 1.0 - lhs;
            }
            if (viol > tol && (!found || viol > best.violation)) {
                found = true;
                best.vertices = current;
                best.lhs = lhs;
                best.violation = viol;
            }
            return;
        }
        enumerate(v + 1); // exclude v
        double add = 0.0;
        for (auto [u, w] : nbr[v])
            if (u < v && in_set[u]) add += w;
        current.push_back(v);
        in_set[v] = true;
        inside += add;
        degsum += wdeg[v];
        enumerate(v + 1); // include v
        degsum -= wdeg[v];
        inside -= add;
        in_set[v] = false;
        current.pop_back();
    };
    enumerate(0);

    if (!found) return std::nullopt;
    return best;
}

std::vector<std::string> check_pmm_feasible(const Graph& g, const FractionalMatching& z,
                                            double tol) {
    std::vector<std::string> out;
    if ((int)z.z.size() != g.edge_count()) {
        out.push_back("z has wrong dimension");
        return out;
    }
    double total = 0.0;
    std::vector<double> deg(g.n, 0.0);
    for (int id = 0; id < g.edge_count(); ++id) {
        if (z.z[id] < -tol)
            out.push_back("negative z on edge " + std::to_string(id));
        total += z.z[id];
        deg[g.edges[id].first] += z.z[id];
        deg[g.edges[id].second] += z.z[id];
    }
    for (int v = 0; v < g.n; ++v)
        if (deg[v] > 1.0 + tol)
            out.push_back("degree constraint violated at vertex " + std::to_string(v) + ": " +
                          std::to_string(deg[v]));
    int size = nu(g);
    if (std::abs(total - (double)size) > tol)
        out.push_back("total mass " + std::to_string(total) + " differs from nu = " +
                      std::to_string(size));
    if (out.empty()) {
        if (auto cut = separate_odd_set(g, z, SeparationMode::general, tol)) {
            std::ostringstream os;
            os << "odd-set constraint violated on U = {";
            for (std::size_t i = 0; i < cut->vertices.size(); ++i)
                os << (i ? "," : "") << cut->vertices[i];
            os << "}: " << cut->lhs << " > " << (cut->vertices.size() - 1) / 2.0;
            out.push_back(os.str());
        }
    }
    return out;
}

namespace {

// One subset sweep over odd vertex sets of size >= 3, reporting set members,
// inside-edge mass and inside-matching-edge count to a visitor. Shared by the
// tight-set penalty pass and the peel-amount bound in the decomposition.
template <typename Visitor>
void sweep_odd_sets(const Graph& g, const std::vector<double>& z, const std::vector<char>& in_m,
                    Visitor&& visit) {
    const int n = g.n;
    std::vector<std::vector<std::pair<int, double>>> nbr(n);
    std::vector<std::vector<int>> nbr_m(n);
    for (int id = 0; id < g.edge_count(); ++id) {
        auto [u, v] = g.edges[id];
        nbr[u].push_back({v, z[id]});
        nbr[v].push_back({u, z[id]});
        if (in_m[id]) {
            nbr_m[u].push_back(v);
            nbr_m[v].push_back(u);
        }
    }
    std::vector<char> in_set(n, false);
    std::vector<int> members;
    double inside = 0.0;
    int inside_m = 0;
    std::function<void(int)> rec = [&](int v) {
        if (v == n) {
            if (members.size() % 2 == 1 && members.size() >= 3)
                visit(members, in_set, inside, inside_m);
            return;
        }
        rec(v + 1);
        double add = 0.0;
        int add_m = 0;
        for (auto [u, w] : nbr[v])
            if (in_set[u]) add += w;
        for (int u : nbr_m[v])
            if (in_set[u]) ++add_m;
        in_set[v] = true;
        members.push_back(v);
        inside += add;
        inside_m += add_m;
        rec(v + 1);
        inside -= add;
        inside_m -= add_m;
        members.pop_back();
        in_set[v] = false;
    };
    rec(0);
}

} // namespace

// The naive peel (subtract the minimum value along an arbitrary support
// matching) can leave the matching polytope in non-bipartite graphs: an odd
// set crossed more than its share collapses the remaining support onto odd
// cycles. Instead each round picks a maximum matching that fills every tight
// degree and odd-set constraint (maximum penalty weight), then peels the
// largest coefficient that keeps the rescaled remainder inside the polytope.
// Every round makes a new constraint tight, so the face dimension drops and
// the peel count stays within 2|E| + |V|.
MatchingDecomposition decompose_to_maximum_matchings(const Graph& g,
                                                     const FractionalMatching& z_in) {
    if (g.n > 22)
        throw capability_error("decomposition implemented for |V| <= 22 "
                               "(shares the exhaustive odd-set machinery)");
    FractionalMatching zf = z_in;
    for (double& v : zf.z)
        if (v < 1e-9) v = 0.0; // clamp LP round-off before peeling

    auto violations = check_pmm_feasible(g, zf, 1e-7);
    if (!violations.empty())
        throw infeasible_error("point not in the maximum-matching polytope: " + violations[0]);

    const int m = g.edge_count();
    const int size = nu(g);
    MatchingDecomposition out;
    if (size == 0) {
        out.matchings.push_back({});
        out.coefficients.push_back(1.0);
        return out;
    }

    std::vector<double> z = zf.z;
    double rho = 1.0; // remaining coefficient mass
    const double tight_tol = 1e-9;
    const int max_iters = 2 * m + g.n + 1;

    for (int iter = 0;; ++iter) {
        if (rho <= 1e-9) break;
        if (iter >= max_iters)
            throw infeasible_error("decomposition did not terminate within 2|E|+|V| peels");

        std::vector<double> deg(g.n, 0.0);
        for (int id = 0; id < m; ++id) {
            deg[g.edges[id].first] += z[id];
            deg[g.edges[id].second] += z[id];
        }

        // penalty weights: +1 per tight vertex endpoint, +1 per tight odd set
        // containing the edge
        std::vector<double> weight(m, 0.0);
        std::vector<Edge> support_edges;
        std::vector<int> support_ids;
        for (int id = 0; id < m; ++id)
            if (z[id] > 0.0) {
                support_edges.push_back(g.edges[id]);
                support_ids.push_back(id);
            }
        Graph support(g.n, support_edges);

        for (int id = 0; id < m; ++id) {
            auto [u, v] = g.edges[id];
            if (deg[u] >= rho - tight_tol) weight[id] += 1.0;
            if (deg[v] >= rho - tight_tol) weight[id] += 1.0;
        }
        {
            std::vector<char> none(m, false);
            sweep_odd_sets(g, z, none,
                           [&](const std::vector<int>& members, const std::vector<char>& in_set,
                               double inside, int) {
                               double cap = rho * (double)(members.size() - 1) / 2.0;
                               if (inside < cap - tight_tol) return;
                               for (int id = 0; id < m; ++id) {
                                   auto [u, v] = g.edges[id];
                                   if (in_set[u] && in_set[v]) weight[id] += 1.0;
                               }
                           });
        }

        // maximum-weight maximum matching inside the support
        double w_max = 0.0;
        for (int sid = 0; sid < support.edge_count(); ++sid)
            w_max = std::max(w_max, weight[support_ids[sid]]);
        std::vector<double> cost(support.edge_count());
        for (int sid = 0; sid < support.edge_count(); ++sid)
            cost[sid] = w_max - weight[support_ids[sid]];
        Matching picked = min_cost_maximum_matching(support, cost);
        if ((int)picked.size() != size)
            throw infeasible_error("support no longer carries a maximum matching; input z was "
                                   "not a feasible fractional matching");
        Matching matching;
        for (int sid : picked) matching.push_back(support_ids[sid]);
        matching = normalize_matching(matching);

        std::vector<char> in_m(m, false);
        std::vector<char> vertex_matched(g.n, false);
        for (int id : matching) {
            in_m[id] = true;
            vertex_matched[g.edges[id].first] = true;
            vertex_matched[g.edges[id].second] = true;
        }

        // largest peel keeping (z - lambda chi)/(rho - lambda) feasible
        double lambda = rho;
        for (int id : matching) lambda = std::min(lambda, z[id]);
        for (int v = 0; v < g.n; ++v)
            if (!vertex_matched[v]) lambda = std::min(lambda, rho - deg[v]);
        sweep_odd_sets(g, z, in_m,
                       [&](const std::vector<int>& members, const std::vector<char>&,
                           double inside, int inside_m) {
                           double kappa = (double)(members.size() - 1) / 2.0;
                           if (inside_m < kappa) {
                               double bound = (kappa * rho - inside) / (kappa - inside_m);
                               lambda = std::min(lambda, bound);
                           }
                       });

        if (lambda <= 1e-12)
            throw infeasible_error("decomposition stalled: no positive peel exists (input z was "
                                   "not a feasible fractional matching)");

        out.matchings.push_back(matching);
        out.coefficients.push_back(lambda);
        for (int id : matching) {
            z[id] -= lambda;
            if (z[id] < 1e-12) z[id] = 0.0;
        }
        rho -= lambda;
    }

    // merge duplicates, deterministic order
    std::map<Matching, double> gamma;
    for (std::size_t k = 0; k < out.matchings.size(); ++k)
        gamma[out.matchings[k]] += out.coefficients[k];
    out.matchings.clear();
    out.coefficients.clear();
    for (auto& [matching, coeff] : gamma) {
        out.matchings.push_back(matching);
        out.coefficients.push_back(coeff);
    }
    return out;
}

std::vector<double> reconstruct_marginals(const Graph& g, const MatchingDecomposition& d) {
    std::vector<double> z(g.edge_count(), 0.0);
    for (std::size_t k = 0; k < d.matchings.size(); ++k)
        for (int id : d.matchings[k]) z[id] += d.coefficients[k];
    return z;
}

} // namespace flm
