#include "flm/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace flm {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;

// ---------------------------------------------------------------------------
// Two-phase simplex with an explicitly maintained dense basis inverse.
// ---------------------------------------------------------------------------
class Simplex {
public:
    explicit Simplex(const LinearProgram& lp) : lp_(lp) { build_standard_form(); }

    LpSolution solve() {
        // phase 1: minimize artificial sum
        if (has_artificials_) {
            run(phase1_cost_, /*allow_artificials=*/true);
            double infeas = current_objective(phase1_cost_);
            if (infeas > kFeasTol) {
                std::ostringstream os;
                os << "infeasible LP (artificial residual " << infeas << "); conflicting rows:";
                for (int r = 0; r < m_; ++r)
                    if (basis_[r] >= artificial_begin_ && xb_[r] > kFeasTol)
                        os << " " << lp_.constraints[r].name;
                throw infeasible_error(os.str());
            }
            drive_out_artificials();
        }
        run(cost_, /*allow_artificials=*/false);

        LpSolution out;
        out.x.assign(lp_.n_vars(), 0.0);
        for (int r = 0; r < m_; ++r)
            if (basis_[r] < lp_.n_vars()) out.x[basis_[r]] = xb_[r];
        for (double& v : out.x)
            if (v < 0.0 && v > -kFeasTol) v = 0.0;
        verify_feasible(out.x);
        out.objective = 0.0;
        for (int j = 0; j < lp_.n_vars(); ++j) out.objective += lp_.objective[j] * out.x[j];
        return out;
    }

private:
    const LinearProgram& lp_;
    int m_ = 0;                // rows
    int n_total_ = 0;          // structural + slack + artificial columns
    int artificial_begin_ = 0; // first artificial column (== n_total_ if none)
    bool has_artificials_ = false;
    std::vector<std::vector<double>> col_; // dense columns, col_[j][r]
    std::vector<double> b_;
    std::vector<double> cost_, phase1_cost_;
    std::vector<int> basis_;
    std::vector<std::vector<double>> binv_;
    std::vector<double> xb_;

    void build_standard_form() {
        m_ = (int)lp_.constraints.size();
        const int n = lp_.n_vars();

        std::vector<double> sign(m_, 1.0);
        std::vector<Relation> rel(m_);
        b_.resize(m_);
        for (int r = 0; r < m_; ++r) {
            rel[r] = lp_.constraints[r].relation;
            b_[r] = lp_.constraints[r].rhs;
            if (b_[r] < 0.0) {
                sign[r] = -1.0;
                b_[r] = -b_[r];
                if (rel[r] == Relation::le)
                    rel[r] = Relation::ge;
                else if (rel[r] == Relation::ge)
                    rel[r] = Relation::le;
            }
        }

        int n_slack = 0;
        for (int r = 0; r < m_; ++r)
            if (rel[r] != Relation::eq) ++n_slack;

        // column layout: structural | slack/surplus | artificial
        std::vector<int> slack_col(m_, -1), art_col(m_, -1);
        int next = n;
        for (int r = 0; r < m_; ++r)
            if (rel[r] != Relation::eq) slack_col[r] = next++;
        artificial_begin_ = next;
        for (int r = 0; r < m_; ++r)
            if (rel[r] != Relation::le) art_col[r] = next++; // ge and eq rows
        n_total_ = next;
        has_artificials_ = n_total_ > artificial_begin_;

        col_.assign(n_total_, std::vector<double>(m_, 0.0));
        for (int r = 0; r < m_; ++r) {
            for (auto [j, a] : lp_.constraints[r].terms) col_[j][r] += sign[r] * a;
            if (slack_col[r] >= 0) col_[slack_col[r]][r] = (rel[r] == Relation::le) ? 1.0 : -1.0;
            if (art_col[r] >= 0) col_[art_col[r]][r] = 1.0;
        }

        cost_.assign(n_total_, 0.0);
        for (int j = 0; j < n; ++j) cost_[j] = lp_.objective[j];
        phase1_cost_.assign(n_total_, 0.0);
        for (int j = artificial_begin_; j < n_total_; ++j) phase1_cost_[j] = 1.0;

        basis_.resize(m_);
        for (int r = 0; r < m_; ++r)
            basis_[r] = (rel[r] == Relation::le) ? slack_col[r] : art_col[r];
        refactorize();
    }

    void refactorize() {
        // invert the basis matrix by Gauss-Jordan
        std::vector<std::vector<double>> a(m_, std::vector<double>(2 * m_, 0.0));
        for (int r = 0; r < m_; ++r) {
            for (int i = 0; i < m_; ++i) a[i][r] = col_[basis_[r]][i];
            a[r][m_ + r] = 1.0;
        }
        for (int c = 0; c < m_; ++c) {
            int piv = -1;
            double best = kPivotTol;
            for (int r = c; r < m_; ++r)
                if (std::abs(a[r][c]) > best) {
                    best = std::abs(a[r][c]);
                    piv = r;
                }
            if (piv == -1) throw numeric_error("singular basis during refactorization");
            std::swap(a[c], a[piv]);
            double inv = 1.0 / a[c][c];
            for (int k = c; k < 2 * m_; ++k) a[c][k] *= inv;
            for (int r = 0; r < m_; ++r) {
                if (r == c || a[r][c] == 0.0) continue;
                double f = a[r][c];
                for (int k = c; k < 2 * m_; ++k) a[r][k] -= f * a[c][k];
            }
        }
        binv_.assign(m_, std::vector<double>(m_, 0.0));
        for (int r = 0; r < m_; ++r)
            for (int c = 0; c < m_; ++c) binv_[r][c] = a[r][m_ + c];
        compute_xb();
    }

    void compute_xb() {
        xb_.assign(m_, 0.0);
        for (int r = 0; r < m_; ++r) {
            double v = 0.0;
            for (int c = 0; c < m_; ++c) v += binv_[r][c] * b_[c];
            xb_[r] = v;
        }
    }

    double current_objective(const std::vector<double>& cost) const {
        double v = 0.0;
        for (int r = 0; r < m_; ++r) v += cost[basis_[r]] * xb_[r];
        return v;
    }

    void run(const std::vector<double>& cost, bool allow_artificials) {
        const long iter_cap = 2000L * (m_ + n_total_) + 20000L;
        long stall = 0;
        bool bland = false;
        double last_obj = current_objective(cost);
        std::vector<char> is_basic(n_total_, false);
        for (long iter = 0; iter < iter_cap; ++iter) {
            if (iter > 0 && iter % 512 == 0) refactorize();

            std::fill(is_basic.begin(), is_basic.end(), false);
            for (int r = 0; r < m_; ++r) is_basic[basis_[r]] = true;

            // duals y = c_B B^{-1}
            std::vector<double> y(m_, 0.0);
            for (int c = 0; c < m_; ++c) {
                double v = 0.0;
                for (int r = 0; r < m_; ++r) v += cost[basis_[r]] * binv_[r][c];
                y[c] = v;
            }

            int enter = -1;
            double best_red = -kPivotTol;
            int limit = allow_artificials ? n_total_ : artificial_begin_;
            for (int j = 0; j < limit; ++j) {
                if (is_basic[j]) continue;
                double red = cost[j];
                const auto& aj = col_[j];
                for (int r = 0; r < m_; ++r) red -= y[r] * aj[r];
                if (red < best_red) {
                    if (bland) {
                        enter = j;
                        break;
                    }
                    best_red = red;
                    enter = j;
                }
            }
            if (enter == -1) return; // optimal for this phase

            // direction w = B^{-1} A_enter
            std::vector<double> w(m_, 0.0);
            for (int r = 0; r < m_; ++r) {
                double v = 0.0;
                const auto& aj = col_[enter];
                for (int c = 0; c < m_; ++c) v += binv_[r][c] * aj[c];
                w[r] = v;
            }

            int leave = -1;
            double best_ratio = 0.0;
            for (int r = 0; r < m_; ++r) {
                if (w[r] <= kPivotTol) continue;
                double ratio = std::max(xb_[r], 0.0) / w[r];
                if (leave == -1 || ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && basis_[r] < basis_[leave])) {
                    best_ratio = ratio;
                    leave = r;
                }
            }
            if (leave == -1)
                throw Error(ErrorKind::infeasible,
                            "unbounded LP: improving ray on variable " +
                                (enter < lp_.n_vars() ? lp_.var_names[enter]
                                                      : "slack#" + std::to_string(enter)));

            pivot(leave, enter, w);

            double obj = current_objective(cost);
            if (obj > last_obj - 1e-12) {
                if (++stall > m_ + 20) bland = true; // cycling guard
            } else {
                stall = 0;
                bland = false;
            }
            last_obj = obj;
        }
        throw numeric_error("simplex iteration cap exceeded");
    }

    void pivot(int leave, int enter, const std::vector<double>& w) {
        basis_[leave] = enter;
        double inv = 1.0 / w[leave];
        for (int c = 0; c < m_; ++c) binv_[leave][c] *= inv;
        for (int r = 0; r < m_; ++r) {
            if (r == leave) continue;
            double f = w[r];
            if (f == 0.0) continue;
            for (int c = 0; c < m_; ++c) binv_[r][c] -= f * binv_[leave][c];
        }
        compute_xb();
    }

    void drive_out_artificials() {
        for (int r = 0; r < m_; ++r) {
            if (basis_[r] < artificial_begin_) continue;
            // basic artificial (at zero after a feasible phase 1): replace by
            // any non-artificial column with a usable pivot in this row
            int replacement = -1;
            for (int j = 0; j < artificial_begin_ && replacement == -1; ++j) {
                bool basic = false;
                for (int rr = 0; rr < m_; ++rr)
                    if (basis_[rr] == j) {
                        basic = true;
                        break;
                    }
                if (basic) continue;
                double wr = 0.0;
                for (int c = 0; c < m_; ++c) wr += binv_[r][c] * col_[j][c];
                if (std::abs(wr) > 1e-7) replacement = j;
            }
            if (replacement == -1) continue; // redundant row, artificial stays at 0
            std::vector<double> w(m_, 0.0);
            for (int rr = 0; rr < m_; ++rr) {
                double v = 0.0;
                for (int c = 0; c < m_; ++c) v += binv_[rr][c] * col_[replacement][c];
                w[rr] = v;
            }
            pivot(r, replacement, w);
        }
    }

    void verify_feasible(const std::vector<double>& x) const {
        for (const auto& con : lp_.constraints) {
            double lhs = 0.0;
            for (auto [j, a] : con.terms) lhs += a * x[j];
            double scale = std::max(1.0, std::abs(con.rhs));
            double resid = lhs - con.rhs;
            bool ok = true;
            if (con.relation == Relation::le) ok = resid <= kFeasTol * scale;
            if (con.relation == Relation::ge) ok = resid >= -kFeasTol * scale;
            if (con.relation == Relation::eq) ok = std::abs(resid) <= kFeasTol * scale;
            if (!ok)
                throw numeric_error("simplex lost feasibility on constraint " + con.name +
                                    " (residual " + std::to_string(resid) + ")");
        }
    }
};

std::string coeff_str(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    if (lp.constraints.empty()) {
        // all-zero vertex is optimal for min with x >= 0 and c >= 0; a
        // negative coefficient means the LP is unbounded
        for (int j = 0; j < lp.n_vars(); ++j)
            if (lp.objective[j] < 0.0)
                throw Error(ErrorKind::infeasible,
                            "unbounded LP: no constraints and negative cost on " + lp.var_names[j]);
        return LpSolution{std::vector<double>(lp.n_vars(), 0.0), 0.0};
    }
    Simplex s(lp);
    return s.solve();
}

std::string lp_to_text(const LinearProgram& lp) {
    std::ostringstream os;
    os << "Minimize\n obj:";
    bool first = true;
    for (int j = 0; j < lp.n_vars(); ++j) {
        if (lp.objective[j] == 0.0) continue;
        os << (first ? " " : " + ") << coeff_str(lp.objective[j]) << " " << lp.var_names[j];
        first = false;
    }
    if (first) os << " 0 " << (lp.n_vars() ? lp.var_names[0] : "x");
    os << "\nSubject To\n";
    for (const auto& con : lp.constraints) {
        os << " " << con.name << ":";
        bool f2 = true;
        for (auto [j, a] : con.terms) {
            if (a == 0.0) continue;
            if (f2) {
                os << " " << coeff_str(a) << " " << lp.var_names[j];
                f2 = false;
            } else if (a >= 0.0) {
                os << " + " << coeff_str(a) << " " << lp.var_names[j];
            } else {
                os << " - " << coeff_str(-a) << " " << lp.var_names[j];
            }
        }
        const char* rel = con.relation == Relation::le ? "<=" : con.relation == Relation::ge ? ">=" : "=";
        os << " " << rel << " " << coeff_str(con.rhs) << "\n";
    }
    os << "Bounds\n";
    for (const auto& name : lp.var_names) os << " 0 <= " << name << "\n";
    os << "End\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// LP_FLM
// ---------------------------------------------------------------------------

std::vector<double> flm_edge_marginals(const FractionalFlm& frac) {
    std::vector<double> z(frac.n_edges, 0.0);
    for (int i = 0; i < frac.n_facilities; ++i)
        for (int e = 0; e < frac.n_edges; ++e) z[e] += frac.x_at(i, e);
    return z;
}

double flm_client_mass(const FlmInstance& inst, const FractionalFlm& frac, int facility,
                       int client) {
    double v = 0.0;
    for (int e = 0; e < inst.compat.edge_count(); ++e) {
        auto [j, k] = inst.compat.edges[e];
        if (j == client || k == client) v += frac.x_at(facility, e);
    }
    return v;
}

namespace {

struct FlmLpLayout {
    LinearProgram lp;
    std::vector<int> y_var;                // per facility
    std::vector<std::vector<int>> x_var;   // [facility][edge]
    std::vector<int> xe_var;               // per edge
};

FlmLpLayout build_lp_flm(const FlmInstance& inst, LpFlmVariant variant, int size,
                         bool degree_equality, const std::vector<OddSetCut>& cuts) {
    FlmLpLayout lay;
    const int nf = inst.n_facilities;
    const int m = inst.compat.edge_count();
    auto inc = inst.compat.incidence();

    lay.y_var.resize(nf);
    for (int i = 0; i < nf; ++i)
        lay.y_var[i] = lay.lp.add_variable("y_" + std::to_string(i), inst.opening_cost[i]);
    lay.x_var.assign(nf, std::vector<int>(m));
    for (int i = 0; i < nf; ++i)
        for (int e = 0; e < m; ++e)
            lay.x_var[i][e] =
                lay.lp.add_variable("x_" + std::to_string(i) + "_" + std::to_string(e),
                                    pair_distance_by_id(inst, i, e));
    lay.xe_var.resize(m);
    for (int e = 0; e < m; ++e)
        lay.xe_var[e] = lay.lp.add_variable("xe_" + std::to_string(e), 0.0);

    // xe_e = sum_i x_{i,e}
    for (int e = 0; e < m; ++e) {
        std::vector<std::pair<int, double>> terms{{lay.xe_var[e], -1.0}};
        for (int i = 0; i < nf; ++i) terms.push_back({lay.x_var[i][e], 1.0});
        lay.lp.add_constraint("link_" + std::to_string(e), terms, Relation::eq, 0.0);
    }

    // degree constraints on the marginals
    for (int j = 0; j < inst.n_clients; ++j) {
        std::vector<std::pair<int, double>> terms;
        for (int e : inc[j]) terms.push_back({lay.xe_var[e], 1.0});
        if (terms.empty()) continue;
        lay.lp.add_constraint("degree_" + std::to_string(j), terms,
                              degree_equality ? Relation::eq : Relation::le, 1.0);
    }

    // total size (omitted for the degree-only counterexample LP)
    if (variant != LpFlmVariant::degree_only) {
        std::vector<std::pair<int, double>> terms;
        for (int e = 0; e < m; ++e) terms.push_back({lay.xe_var[e], 1.0});
        lay.lp.add_constraint("size", terms, Relation::eq, (double)size);
    }

    if (variant == LpFlmVariant::weakened_flow) {
        for (int i = 0; i < nf; ++i)
            for (int e = 0; e < m; ++e)
                lay.lp.add_constraint(
                    "weak_" + std::to_string(i) + "_" + std::to_string(e),
                    {{lay.x_var[i][e], 1.0}, {lay.y_var[i], -1.0}}, Relation::le, 0.0);
    } else {
        for (int i = 0; i < nf; ++i)
            for (int j = 0; j < inst.n_clients; ++j) {
                std::vector<std::pair<int, double>> terms;
                for (int e : inc[j]) terms.push_back({lay.x_var[i][e], 1.0});
                if (terms.empty()) continue;
                terms.push_back({lay.y_var[i], -1.0});
                lay.lp.add_constraint("flow_" + std::to_string(i) + "_" + std::to_string(j),
                                      terms, Relation::le, 0.0);
            }
    }

    int cut_no = 0;
    for (const auto& cut : cuts) {
        std::vector<char> in_u(inst.n_clients, false);
        for (int v : cut.vertices) in_u[v] = true;
        std::vector<std::pair<int, double>> terms;
        if (cut.mode == SeparationMode::general) {
            for (int e = 0; e < m; ++e) {
                auto [j, k] = inst.compat.edges[e];
                if (in_u[j] && in_u[k]) terms.push_back({lay.xe_var[e], 1.0});
            }
            lay.lp.add_constraint("oddset_" + std::to_string(cut_no++), terms, Relation::le,
                                  (double)(cut.vertices.size() - 1) / 2.0);
        } else {
            for (int e = 0; e < m; ++e) {
                auto [j, k] = inst.compat.edges[e];
                if (in_u[j] != in_u[k]) terms.push_back({lay.xe_var[e], 1.0});
            }
            lay.lp.add_constraint("oddcut_" + std::to_string(cut_no++), terms, Relation::ge, 1.0);
        }
    }
    return lay;
}

} // namespace

LpFlmResult solve_lp_flm(const FlmInstance& inst, LpFlmVariant variant) {
    LpFlmResult res;
    res.nu = nu(inst.compat);
    res.frac.n_facilities = inst.n_facilities;
    res.frac.n_edges = inst.compat.edge_count();
    res.frac.x.assign((std::size_t)inst.n_facilities * inst.compat.edge_count(), 0.0);
    res.frac.y.assign(inst.n_facilities, 0.0);
    if (res.nu == 0) return res; // nothing to match, optimum 0

    bool perfect = is_perfectly_matchable(inst.compat);
    if (variant == LpFlmVariant::degree_only && !perfect)
        throw precondition_error(
            "degree-only relaxation is defined for perfectly matchable graphs");
    bool degree_equality = perfect; // tight description when every client is matched

    std::vector<OddSetCut> cuts;
    const int max_rounds = 100000;
    for (int round = 0;; ++round) {
        if (round >= max_rounds) throw numeric_error("cutting-plane loop did not terminate");
        FlmLpLayout lay = build_lp_flm(inst, variant, res.nu, degree_equality, cuts);
        LpSolution sol = solve_lp(lay.lp);

        for (int i = 0; i < inst.n_facilities; ++i) {
            res.frac.y[i] = sol.x[lay.y_var[i]];
            for (int e = 0; e < inst.compat.edge_count(); ++e)
                res.frac.x_at(i, e) = sol.x[lay.x_var[i][e]];
        }
        res.value = sol.objective;

        if (variant == LpFlmVariant::degree_only) break; // no matching-polytope cuts by design

        FractionalMatching z{flm_edge_marginals(res.frac)};
        auto cut = separate_odd_set(inst.compat, z,
                                    perfect ? SeparationMode::perfect : SeparationMode::general);
        if (!cut) break;
        cuts.push_back(*cut);
        res.cuts_added = (int)cuts.size();
    }

    auto [open, conn] = flm_costs(inst, res.frac);
    res.open_cost = open;
    res.conn_cost = conn;
    return res;
}

std::pair<double, double> flm_costs(const FlmInstance& inst, const FractionalFlm& frac) {
    double open = 0.0, conn = 0.0;
    for (int i = 0; i < inst.n_facilities; ++i) {
        open += inst.opening_cost[i] * frac.y[i];
        for (int e = 0; e < inst.compat.edge_count(); ++e)
            conn += pair_distance_by_id(inst, i, e) * frac.x_at(i, e);
    }
    return {open, conn};
}

UflFractional project_to_ufl(const FlmInstance& inst, const FractionalFlm& frac) {
    if (!is_perfectly_matchable(inst.compat))
        throw precondition_error(
            "projection to LP_UFL requires a perfectly matchable compatibility graph");
    UflFractional out;
    out.n_facilities = inst.n_facilities;
    out.n_clients = inst.n_clients;
    out.x.assign((std::size_t)inst.n_facilities * inst.n_clients, 0.0);
    out.y = frac.y;
    for (int i = 0; i < inst.n_facilities; ++i)
        for (int j = 0; j < inst.n_clients; ++j)
            out.x_at(i, j) = flm_client_mass(inst, frac, i, j);
    return out;
}

std::vector<std::string> check_lp_flm_feasible(const FlmInstance& inst, const FractionalFlm& frac,
                                               double tol) {
    std::vector<std::string> out;
    const int nf = inst.n_facilities, m = inst.compat.edge_count();
    if (frac.n_facilities != nf || frac.n_edges != m) {
        out.push_back("fractional point has wrong shape");
        return out;
    }
    for (int i = 0; i < nf; ++i) {
        if (frac.y[i] < -tol) out.push_back("negative y_" + std::to_string(i));
        for (int e = 0; e < m; ++e)
            if (frac.x_at(i, e) < -tol)
                out.push_back("negative x_" + std::to_string(i) + "_" + std::to_string(e));
    }
    for (int i = 0; i < nf; ++i)
        for (int j = 0; j < inst.n_clients; ++j) {
            double mass = flm_client_mass(inst, frac, i, j);
            if (mass > frac.y[i] + tol)
                out.push_back("flow constraint violated at facility " + std::to_string(i) +
                              ", client " + std::to_string(j) + ": " + std::to_string(mass) +
                              " > " + std::to_string(frac.y[i]));
        }
    FractionalMatching z{flm_edge_marginals(frac)};
    for (const auto& v : check_pmm_feasible(inst.compat, z, tol)) out.push_back("marginals: " + v);
    return out;
}

} // namespace flm
