#include "attackimpact/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "lp_internal.hpp"

namespace attackimpact {

using lp_detail::BasisFactor;
using lp_detail::ColumnView;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Power-of-two scale bringing x into [0.5, 1), so scaling never rounds.
double pow2_scale(double x) {
    if (x <= 0.0) return 1.0;
    int e = 0;
    std::frexp(x, &e);
    return std::ldexp(1.0, -e);
}

struct ScaledProgram {
    int m = 0;
    int n = 0;
    bool maximize = false;
    std::vector<double> cost;  // min orientation, scaled
    std::vector<double> rhs;   // scaled
    std::vector<RowSense> sense;
    std::vector<int> col_start;
    std::vector<int> rows;
    std::vector<double> values;
    std::vector<double> row_scale;
    std::vector<double> col_scale;
};

ScaledProgram standardize(const LinearProgram& lp) {
    lp.validate();
    ScaledProgram s;
    s.m = lp.num_rows;
    s.n = lp.num_cols();
    s.maximize = lp.maximize;
    s.sense = lp.row_sense;
    s.col_start = lp.col_start;
    s.rows = lp.row_index;
    s.values = lp.value;

    s.row_scale.assign(s.m, 1.0);
    s.col_scale.assign(s.n, 1.0);
    std::vector<double> rowmax(s.m, 0.0);
    for (int j = 0; j < s.n; ++j)
        for (int t = s.col_start[j]; t < s.col_start[j + 1]; ++t)
            rowmax[s.rows[t]] = std::max(rowmax[s.rows[t]], std::abs(s.values[t]));
    for (int r = 0; r < s.m; ++r) s.row_scale[r] = pow2_scale(rowmax[r]);
    for (int j = 0; j < s.n; ++j) {
        double colmax = 0.0;
        for (int t = s.col_start[j]; t < s.col_start[j + 1]; ++t)
            colmax = std::max(colmax, std::abs(s.values[t]) * s.row_scale[s.rows[t]]);
        s.col_scale[j] = pow2_scale(colmax);
    }
    for (int j = 0; j < s.n; ++j)
        for (int t = s.col_start[j]; t < s.col_start[j + 1]; ++t)
            s.values[t] *= s.row_scale[s.rows[t]] * s.col_scale[j];

    s.rhs.resize(s.m);
    for (int r = 0; r < s.m; ++r) s.rhs[r] = lp.rhs[r] * s.row_scale[r];
    s.cost.resize(s.n);
    for (int j = 0; j < s.n; ++j) {
        const double c = lp.objective[j] * s.col_scale[j];
        s.cost[j] = lp.maximize ? -c : c;
    }
    return s;
}

// Internal column identifiers: [0, n) structural, [n, n+m) slack of row
// (valid only on LessEqual rows), [n+m, n+2m) artificial of row.
class Simplex {
  public:
    Simplex(const LinearProgram& lp, const LpOptions& opt)
        : opt_(opt), s_(standardize(lp)) {
        m_ = s_.m;
        n_ = s_.n;
        slack_base_ = n_;
        art_base_ = n_ + m_;
        max_iter_ = opt.max_iterations > 0 ? opt.max_iterations : 50L * (m_ + n_);
        art_sign_.assign(m_, 0);
        pos_of_.assign(n_ + 2 * m_, -1);
        cost_.assign(n_ + 2 * m_, 0.0);
    }

    LpSolution solve();
    LpSolution solve_from_basis(const std::vector<int>& user_basis);

  private:
    template <class F>
    void for_col(int id, F&& f) const {
        if (id < n_) {
            for (int t = s_.col_start[id]; t < s_.col_start[id + 1]; ++t)
                f(s_.rows[t], s_.values[t]);
        } else if (id < art_base_) {
            f(id - slack_base_, 1.0);
        } else {
            f(id - art_base_, static_cast<double>(art_sign_[id - art_base_]));
        }
    }

    double col_dot(const std::vector<double>& y, int id) const {
        double d = 0.0;
        for_col(id, [&](int r, double v) { d += y[r] * v; });
        return d;
    }

    bool slack_valid(int id) const {
        return s_.sense[id - slack_base_] == RowSense::LessEqual;
    }
    bool enterable(int id) const {
        if (pos_of_[id] >= 0) return false;
        if (id >= art_base_) return false;  // artificials never re-enter
        if (id >= slack_base_ && !slack_valid(id)) return false;
        return true;
    }

    bool refactor() {
        unit_rows_.resize(m_);
        std::vector<ColumnView> cols(m_);
        for (int k = 0; k < m_; ++k) {
            const int id = basis_[k];
            if (id < n_) {
                cols[k] = {s_.rows.data() + s_.col_start[id],
                           s_.values.data() + s_.col_start[id],
                           s_.col_start[id + 1] - s_.col_start[id]};
            } else if (id < art_base_) {
                unit_rows_[k] = id - slack_base_;
                cols[k] = {&unit_rows_[k], &kOne, 1};
            } else {
                unit_rows_[k] = id - art_base_;
                cols[k] = {&unit_rows_[k],
                           art_sign_[id - art_base_] > 0 ? &kOne : &kMinusOne, 1};
            }
        }
        if (!factor_.factor(cols)) return false;
        x_ = s_.rhs;
        factor_.ftran(x_);
        return true;
    }

    std::vector<double> dual_vector() {
        std::vector<double> y(m_);
        for (int k = 0; k < m_; ++k) y[k] = cost_[basis_[k]];
        factor_.btran(y);
        return y;
    }

    int price(const std::vector<double>& y, bool bland) const {
        int best = -1;
        double best_rc = -opt_.opt_tol;
        for (int id = 0; id < art_base_; ++id) {
            if (!enterable(id)) continue;
            const double rc = cost_[id] - col_dot(y, id);
            if (bland) {
                if (rc < -opt_.opt_tol) return id;
            } else if (rc < best_rc) {
                best_rc = rc;
                best = id;
            }
        }
        return best;
    }

    struct RatioPick {
        int pos = -1;
        double theta = kInf;
    };

    RatioPick ratio_test(const std::vector<double>& d, bool phase2) const {
        RatioPick pick;
        double best_piv = 0.0;
        bool best_art = false;
        auto consider = [&](int k, double theta, double piv, bool art) {
            if (pick.pos < 0) {
                pick = {k, theta};
                best_piv = piv;
                best_art = art;
                return;
            }
            const double tol = 1e-9 * (1.0 + std::abs(pick.theta));
            if (theta < pick.theta - tol) {
                pick = {k, theta};
                best_piv = piv;
                best_art = art;
            } else if (theta <= pick.theta + tol) {
                if ((art && !best_art) || (art == best_art && piv > best_piv)) {
                    pick = {k, std::min(theta, pick.theta)};
                    best_piv = piv;
                    best_art = art;
                }
            }
        };
        for (int k = 0; k < m_; ++k) {
            const double dk = d[k];
            const bool art = basis_[k] >= art_base_;
            if (phase2 && art) {
                // basic artificials are pinned at zero
                if (std::abs(dk) > opt_.pivot_tol)
                    consider(k, dk > 0 ? std::max(x_[k], 0.0) / dk : 0.0, std::abs(dk), true);
            } else if (dk > opt_.pivot_tol) {
                consider(k, std::max(x_[k], 0.0) / dk, dk, art);
            }
        }
        return pick;
    }

    void apply_pivot(int entering, int r, const std::vector<double>& d, double theta) {
        for (int k = 0; k < m_; ++k) x_[k] -= theta * d[k];
        x_[r] = theta;
        pos_of_[basis_[r]] = -1;
        basis_[r] = entering;
        pos_of_[entering] = r;
        factor_.push_eta(r, d, opt_.pivot_tol);
    }

    LpStatus primal_loop(bool phase2) {
        int streak = 0;
        bool bland = false;
        std::vector<double> d(m_);
        for (;;) {
            if (iter_ >= max_iter_) return LpStatus::IterationLimit;
            if (factor_.eta_count() >= opt_.refactor_interval && !refactor())
                return LpStatus::NumericalFailure;
            const auto y = dual_vector();
            const int q = price(y, bland);
            if (q < 0) return LpStatus::Optimal;
            ++iter_;

            std::fill(d.begin(), d.end(), 0.0);
            for_col(q, [&](int r, double v) { d[r] += v; });
            factor_.ftran(d);

            const RatioPick pick = ratio_test(d, phase2);
            if (pick.pos < 0)
                return phase2 ? LpStatus::Unbounded : LpStatus::NumericalFailure;
            apply_pivot(q, pick.pos, d, pick.theta);

            if (pick.theta <= opt_.feas_tol) {
                if (++streak > opt_.degeneracy_threshold) bland = true;
            } else {
                streak = 0;
                bland = false;
            }
        }
    }

    void set_phase_costs(bool phase1) {
        std::fill(cost_.begin(), cost_.end(), 0.0);
        if (phase1) {
            for (int r = 0; r < m_; ++r)
                if (art_sign_[r] != 0) cost_[art_base_ + r] = 1.0;
        } else {
            for (int j = 0; j < n_; ++j) cost_[j] = s_.cost[j];
        }
    }

    double artificial_mass() const {
        double total = 0.0;
        for (int k = 0; k < m_; ++k)
            if (basis_[k] >= art_base_) total += std::max(x_[k], 0.0);
        return total;
    }

    void drive_out_artificials() {
        std::vector<double> w(m_);
        for (int k = 0; k < m_; ++k) {
            if (basis_[k] < art_base_) continue;
            std::fill(w.begin(), w.end(), 0.0);
            w[k] = 1.0;
            factor_.btran(w);
            int entering = -1;
            double best = 1e-7;
            for (int id = 0; id < art_base_; ++id) {
                if (!enterable(id)) continue;
                const double alpha = std::abs(col_dot(w, id));
                if (alpha > best) {
                    best = alpha;
                    entering = id;
                }
            }
            if (entering < 0) continue;  // redundant row, artificial stays at zero
            std::vector<double> d(m_, 0.0);
            for_col(entering, [&](int r, double v) { d[r] += v; });
            factor_.ftran(d);
            if (std::abs(d[k]) < opt_.pivot_tol) continue;
            apply_pivot(entering, k, d, x_[k] / d[k]);
        }
    }

    LpSolution finish(LpStatus status) {
        LpSolution out;
        out.status = status;
        out.iterations = iter_;
        out.primal.assign(n_, 0.0);
        out.dual.assign(m_, 0.0);
        if (status != LpStatus::Optimal) return out;

        if (!refactor()) {
            out.status = LpStatus::NumericalFailure;
            return out;
        }
        set_phase_costs(false);
        const auto y = dual_vector();
        double obj = 0.0;
        for (int k = 0; k < m_; ++k) obj += cost_[basis_[k]] * x_[k];
        out.objective = s_.maximize ? -obj : obj;

        for (int j = 0; j < n_; ++j) {
            const int pos = pos_of_[j];
            if (pos >= 0) out.primal[j] = x_[pos] * s_.col_scale[j];
        }
        const double dual_sign = s_.maximize ? -1.0 : 1.0;
        for (int r = 0; r < m_; ++r) out.dual[r] = dual_sign * y[r] * s_.row_scale[r];
        out.basis = basis_;
        return out;
    }

    const LpOptions opt_;
    ScaledProgram s_;
    int m_ = 0, n_ = 0, slack_base_ = 0, art_base_ = 0;
    long iter_ = 0, max_iter_ = 0;
    std::vector<int> basis_;
    std::vector<int> pos_of_;
    std::vector<double> x_;
    std::vector<double> cost_;
    std::vector<int8_t> art_sign_;
    std::vector<int> unit_rows_;
    BasisFactor factor_;

    static const double kOne;
    static const double kMinusOne;
};

const double Simplex::kOne = 1.0;
const double Simplex::kMinusOne = -1.0;

LpSolution Simplex::solve() {
    basis_.resize(m_);
    bool any_artificial = false;
    for (int r = 0; r < m_; ++r) {
        if (s_.sense[r] == RowSense::LessEqual && s_.rhs[r] >= 0.0) {
            basis_[r] = slack_base_ + r;
        } else {
            art_sign_[r] = s_.rhs[r] >= 0.0 ? 1 : -1;
            basis_[r] = art_base_ + r;
            any_artificial = true;
        }
        pos_of_[basis_[r]] = r;
    }
    if (!refactor()) return finish(LpStatus::NumericalFailure);

    if (any_artificial) {
        set_phase_costs(true);
        const LpStatus phase1 = primal_loop(false);
        if (phase1 != LpStatus::Optimal) return finish(phase1);
        if (!refactor()) return finish(LpStatus::NumericalFailure);
        double bmax = 0.0;
        for (double b : s_.rhs) bmax = std::max(bmax, std::abs(b));
        if (artificial_mass() > 1e-7 * (1.0 + bmax)) return finish(LpStatus::Infeasible);
        drive_out_artificials();
    }

    set_phase_costs(false);
    return finish(primal_loop(true));
}

LpSolution Simplex::solve_from_basis(const std::vector<int>& user_basis) {
    if (static_cast<int>(user_basis.size()) != m_) return finish(LpStatus::NumericalFailure);
    basis_ = user_basis;
    for (int k = 0; k < m_; ++k) {
        const int id = basis_[k];
        const bool ok = (id >= 0 && id < n_) ||
                        (id >= slack_base_ && id < art_base_ && slack_valid(id));
        if (!ok || pos_of_[id] >= 0) return finish(LpStatus::NumericalFailure);
        pos_of_[id] = k;
    }
    if (!refactor()) return finish(LpStatus::NumericalFailure);
    set_phase_costs(false);

    {  // the caller promises dual feasibility; verify before trusting it
        const auto y = dual_vector();
        for (int id = 0; id < art_base_; ++id) {
            if (!enterable(id)) continue;
            if (cost_[id] - col_dot(y, id) < -1e-7) return finish(LpStatus::NumericalFailure);
        }
    }

    int streak = 0;
    bool bland = false;
    std::vector<double> w(m_), d(m_);
    for (;;) {
        if (iter_ >= max_iter_) return finish(LpStatus::IterationLimit);
        if (factor_.eta_count() >= opt_.refactor_interval && !refactor())
            return finish(LpStatus::NumericalFailure);

        int leave = -1;
        double most_negative = -opt_.feas_tol;
        for (int k = 0; k < m_; ++k) {
            if (bland) {
                if (x_[k] < -opt_.feas_tol &&
                    (leave < 0 || basis_[k] < basis_[leave]))
                    leave = k;
            } else if (x_[k] < most_negative) {
                most_negative = x_[k];
                leave = k;
            }
        }
        if (leave < 0) return finish(LpStatus::Optimal);
        ++iter_;

        std::fill(w.begin(), w.end(), 0.0);
        w[leave] = 1.0;
        factor_.btran(w);
        const auto y = dual_vector();

        int entering = -1;
        double best_ratio = kInf;
        double best_alpha = 0.0;
        for (int id = 0; id < art_base_; ++id) {
            if (!enterable(id)) continue;
            const double alpha = col_dot(w, id);
            if (alpha >= -opt_.pivot_tol) continue;
            const double rc = std::max(cost_[id] - col_dot(y, id), 0.0);
            const double ratio = rc / (-alpha);
            if (entering < 0) {
                entering = id;
                best_ratio = ratio;
                best_alpha = -alpha;
                continue;
            }
            const double tol = 1e-9 * (1.0 + best_ratio);
            if (ratio < best_ratio - tol) {
                entering = id;
                best_ratio = ratio;
                best_alpha = -alpha;
            } else if (ratio <= best_ratio + tol) {
                if (bland ? id < entering : -alpha > best_alpha) {
                    entering = id;
                    best_ratio = std::min(ratio, best_ratio);
                    best_alpha = -alpha;
                }
            }
        }
        if (entering < 0) return finish(LpStatus::Infeasible);

        std::fill(d.begin(), d.end(), 0.0);
        for_col(entering, [&](int r, double v) { d[r] += v; });
        factor_.ftran(d);
        if (std::abs(d[leave]) < opt_.pivot_tol) {
            if (factor_.eta_count() > 0) {
                if (!refactor()) return finish(LpStatus::NumericalFailure);
                continue;
            }
            return finish(LpStatus::NumericalFailure);
        }
        apply_pivot(entering, leave, d, x_[leave] / d[leave]);

        if (best_ratio <= opt_.opt_tol) {
            if (++streak > opt_.degeneracy_threshold) bland = true;
        } else {
            streak = 0;
            bland = false;
        }
    }
}

}  // namespace

const char* to_string(LpStatus status) {
    switch (status) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration-limit";
        case LpStatus::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

void LinearProgram::set_rows(std::vector<double> rhs_values, std::vector<RowSense> senses) {
    if (rhs_values.size() != senses.size())
        throw std::invalid_argument("LinearProgram: rhs/sense size mismatch");
    num_rows = static_cast<int>(rhs_values.size());
    rhs = std::move(rhs_values);
    row_sense = std::move(senses);
}

int LinearProgram::add_column(double objective_coeff,
                              const std::vector<std::pair<int, double>>& entries) {
    objective.push_back(objective_coeff);
    for (const auto& [r, v] : entries) {
        row_index.push_back(r);
        value.push_back(v);
    }
    col_start.push_back(static_cast<int>(row_index.size()));
    return num_cols() - 1;
}

void LinearProgram::validate() const {
    if (num_rows < 1) throw std::invalid_argument("LinearProgram: no rows");
    if (num_cols() < 1) throw std::invalid_argument("LinearProgram: no columns");
    if (static_cast<int>(rhs.size()) != num_rows ||
        static_cast<int>(row_sense.size()) != num_rows)
        throw std::invalid_argument("LinearProgram: row data size mismatch");
    if (static_cast<int>(objective.size()) != num_cols())
        throw std::invalid_argument("LinearProgram: objective size mismatch");
    for (double b : rhs)
        if (!std::isfinite(b)) throw std::invalid_argument("LinearProgram: non-finite rhs");
    for (double c : objective)
        if (!std::isfinite(c)) throw std::invalid_argument("LinearProgram: non-finite objective");
    std::vector<int> seen(num_rows, -1);
    for (int j = 0; j < num_cols(); ++j) {
        for (int t = col_start[j]; t < col_start[j + 1]; ++t) {
            const int r = row_index[t];
            if (r < 0 || r >= num_rows)
                throw std::invalid_argument("LinearProgram: row index out of range");
            if (seen[r] == j)
                throw std::invalid_argument("LinearProgram: duplicate entry in column");
            seen[r] = j;
            if (!std::isfinite(value[t]))
                throw std::invalid_argument("LinearProgram: non-finite coefficient");
        }
    }
}

void LinearProgram::dump(std::ostream& os) const {
    os << "lp " << num_rows << ' ' << num_cols() << ' ' << (maximize ? "max" : "min") << '\n';
    os << "senses ";
    for (RowSense s : row_sense) os << (s == RowSense::Equal ? 'E' : 'L');
    os << '\n';
    os.precision(17);
    for (int r = 0; r < num_rows; ++r) os << "rhs " << r << ' ' << rhs[r] << '\n';
    for (int j = 0; j < num_cols(); ++j)
        if (objective[j] != 0.0) os << "obj " << j << ' ' << objective[j] << '\n';
    for (int j = 0; j < num_cols(); ++j)
        for (int t = col_start[j]; t < col_start[j + 1]; ++t)
            os << "a " << row_index[t] << ' ' << j << ' ' << value[t] << '\n';
}

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
    Simplex simplex(lp, options);
    return simplex.solve();
}

LpSolution solve_lp_from_basis(const LinearProgram& lp, const std::vector<int>& basis,
                               const LpOptions& options) {
    Simplex simplex(lp, options);
    return simplex.solve_from_basis(basis);
}

ResidualReport check_solution(const LinearProgram& lp, const LpSolution& solution) {
    ResidualReport rep;
    const int m = lp.num_rows;
    const int n = lp.num_cols();
    const auto& x = solution.primal;
    const auto& y = solution.dual;

    std::vector<double> row_activity(m, 0.0);
    for (int j = 0; j < n; ++j)
        for (int t = lp.col_start[j]; t < lp.col_start[j + 1]; ++t)
            row_activity[lp.row_index[t]] += lp.value[t] * x[j];

    for (int r = 0; r < m; ++r) {
        const double resid = row_activity[r] - lp.rhs[r];
        const double viol = lp.row_sense[r] == RowSense::Equal ? std::abs(resid)
                                                               : std::max(resid, 0.0);
        rep.primal_residual = std::max(rep.primal_residual, viol);
        if (lp.row_sense[r] == RowSense::LessEqual) {
            const double sign_viol = lp.maximize ? std::max(-y[r], 0.0) : std::max(y[r], 0.0);
            rep.dual_residual = std::max(rep.dual_residual, sign_viol);
            rep.complementarity =
                std::max(rep.complementarity, std::abs(y[r] * (lp.rhs[r] - row_activity[r])));
        }
    }
    for (int j = 0; j < n; ++j) {
        rep.primal_residual = std::max(rep.primal_residual, std::max(-x[j], 0.0));
        double rc = lp.objective[j];
        for (int t = lp.col_start[j]; t < lp.col_start[j + 1]; ++t)
            rc -= lp.value[t] * y[lp.row_index[t]];
        const double viol = lp.maximize ? std::max(rc, 0.0) : std::max(-rc, 0.0);
        rep.dual_residual = std::max(rep.dual_residual, viol);
        rep.complementarity = std::max(rep.complementarity, std::abs(x[j] * rc));
    }

    double by = 0.0;
    for (int r = 0; r < m; ++r) by += lp.rhs[r] * y[r];
    rep.duality_gap = std::abs(solution.objective - by);
    return rep;
}

}  // namespace attackimpact
