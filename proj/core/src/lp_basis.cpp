#include "lp_internal.hpp"

#include <cmath>
#include <cstdlib>

namespace attackimpact::lp_detail {

bool BasisFactor::factor(const std::vector<ColumnView>& columns) {
    m_ = static_cast<int>(columns.size());
    lower_.assign(m_, {});
    upper_.assign(m_, {});
    diag_.assign(m_, 0.0);
    pivot_row_.assign(m_, -1);
    row_pos_.assign(m_, -1);
    etas_.clear();
    work_.assign(m_, 0.0);

    // L columns indexed by original row until every row has a position.
    std::vector<std::vector<std::pair<int, double>>> lrows(m_);
    std::vector<double> w(m_, 0.0);
    std::vector<int> mark(m_, -1);
    std::vector<int> topo;
    std::vector<int> stack;
    std::vector<int> edge;
    topo.reserve(64);

    for (int k = 0; k < m_; ++k) {
        const ColumnView& col = columns[k];

        // Nonzero pattern of L^-1 col: rows reachable from the column's
        // pattern through the columns eliminated so far (DFS, post-order).
        topo.clear();
        for (int t = 0; t < col.size; ++t) {
            const int root = col.rows[t];
            if (mark[root] == k) continue;
            mark[root] = k;
            stack.push_back(root);
            edge.push_back(0);
            while (!stack.empty()) {
                const int r = stack.back();
                const int j = row_pos_[r];
                bool descended = false;
                if (j >= 0) {
                    auto& lcol = lrows[j];
                    int& e = edge.back();
                    while (e < static_cast<int>(lcol.size())) {
                        const int child = lcol[e].first;
                        ++e;
                        if (mark[child] != k) {
                            mark[child] = k;
                            stack.push_back(child);
                            edge.push_back(0);
                            descended = true;
                            break;
                        }
                    }
                }
                if (!descended) {
                    topo.push_back(r);
                    stack.pop_back();
                    edge.pop_back();
                }
            }
        }

        for (int t = 0; t < col.size; ++t) w[col.rows[t]] += col.values[t];
        // Reverse post-order = dependencies first.
        for (int idx = static_cast<int>(topo.size()) - 1; idx >= 0; --idx) {
            const int r = topo[idx];
            const int j = row_pos_[r];
            if (j < 0) continue;
            const double alpha = w[r];
            if (alpha == 0.0) continue;
            for (const auto& [rr, vv] : lrows[j]) w[rr] -= alpha * vv;
        }

        // Partial pivoting over rows without a position yet.
        double best = 0.0;
        int best_row = -1;
        double reach_max = 0.0;
        for (const int r : topo) {
            const double v = std::abs(w[r]);
            if (v > reach_max) reach_max = v;
            if (row_pos_[r] >= 0) continue;
            if (v > std::abs(best) ||
                (v == std::abs(best) && best_row >= 0 && r < best_row && v > 0.0)) {
                best = w[r];
                best_row = r;
            }
        }
        if (best_row < 0 || best == 0.0 || std::abs(best) < 1e-12 * reach_max) {
            for (const int r : topo) w[r] = 0.0;
            return false;  // numerically singular
        }

        pivot_row_[k] = best_row;
        row_pos_[best_row] = k;
        diag_[k] = best;
        for (const int r : topo) {
            const double v = w[r];
            w[r] = 0.0;
            if (v == 0.0) continue;
            const int j = row_pos_[r];
            if (j == k) continue;  // the pivot itself
            if (j >= 0) {
                upper_[k].push_back({j, v});
            } else {
                lrows[k].push_back({r, v / best});
            }
        }
    }

    // Remap L rows to positions now that the permutation is complete.
    for (int k = 0; k < m_; ++k) {
        lower_[k].reserve(lrows[k].size());
        for (const auto& [r, v] : lrows[k]) lower_[k].push_back({row_pos_[r], v});
    }
    return true;
}

bool BasisFactor::push_eta(int r, const std::vector<double>& d, double pivot_tol) {
    if (std::abs(d[r]) < pivot_tol) return false;
    Eta eta;
    eta.pivot_pos = r;
    eta.pivot_value = d[r];
    for (int i = 0; i < m_; ++i) {
        if (i != r && d[i] != 0.0) {
            eta.index.push_back(i);
            eta.value.push_back(d[i]);
        }
    }
    etas_.push_back(std::move(eta));
    return true;
}

void BasisFactor::ftran(std::vector<double>& x) const {
    std::vector<double>& w = work_;
    for (int k = 0; k < m_; ++k) w[k] = x[pivot_row_[k]];

    for (int k = 0; k < m_; ++k) {
        const double alpha = w[k];
        if (alpha == 0.0) continue;
        for (const auto& [p, v] : lower_[k]) w[p] -= alpha * v;
    }
    for (int k = m_ - 1; k >= 0; --k) {
        double alpha = w[k];
        if (alpha != 0.0) {
            alpha /= diag_[k];
            for (const auto& [p, v] : upper_[k]) w[p] -= alpha * v;
        } else {
            alpha = 0.0;
        }
        w[k] = alpha;
    }
    for (const Eta& eta : etas_) {
        const double alpha = w[eta.pivot_pos] / eta.pivot_value;
        if (alpha != 0.0) {
            for (std::size_t i = 0; i < eta.index.size(); ++i)
                w[eta.index[i]] -= alpha * eta.value[i];
        }
        w[eta.pivot_pos] = alpha;
    }
    x = w;
}

void BasisFactor::btran(std::vector<double>& x) const {
    std::vector<double>& w = work_;
    w = x;

    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        const Eta& eta = *it;
        double dot = 0.0;
        for (std::size_t i = 0; i < eta.index.size(); ++i)
            dot += eta.value[i] * w[eta.index[i]];
        w[eta.pivot_pos] = (w[eta.pivot_pos] - dot) / eta.pivot_value;
    }

    // Solve U^T z = w (forward), then L^T v = z (backward).
    for (int k = 0; k < m_; ++k) {
        double acc = w[k];
        for (const auto& [p, v] : upper_[k]) acc -= v * w[p];
        w[k] = acc / diag_[k];
    }
    for (int k = m_ - 1; k >= 0; --k) {
        double acc = w[k];
        for (const auto& [p, v] : lower_[k]) acc -= v * w[p];
        w[k] = acc;
    }

    for (int k = 0; k < m_; ++k) x[pivot_row_[k]] = w[k];
}

}  // namespace attackimpact::lp_detail
