#pragma once

// Internals shared between the simplex driver and the basis factorization.

#include <vector>

namespace attackimpact::lp_detail {

// Column-major sparse matrix slice.
struct ColumnView {
    const int* rows = nullptr;
    const double* values = nullptr;
    int size = 0;
};

// LU factorization of a square basis matrix with threshold partial
// pivoting (Gilbert-Peierls left-looking elimination), plus a product-form
// eta file for pivots applied since the last refactorization.
//
// Position space: basis position k is the k-th column handed to factor();
// ftran results and btran inputs are indexed by position. Row space is the
// matrix's original row indexing; btran outputs live there.
class BasisFactor {
  public:
    // columns[k] is the k-th basis column. Returns false when the matrix
    // is numerically singular.
    bool factor(const std::vector<ColumnView>& columns);

    int dimension() const { return m_; }
    int eta_count() const { return static_cast<int>(etas_.size()); }
    void clear_etas() { etas_.clear(); }

    // Records the replacement of basis position r by a column whose ftran
    // image is d (dense, position space). Returns false when |d[r]| is
    // below pivot_tol.
    bool push_eta(int r, const std::vector<double>& d, double pivot_tol);

    // x := B^-1 x. Input indexed by row, output indexed by position.
    void ftran(std::vector<double>& x) const;
    // x := B^-T x. Input indexed by position, output indexed by row.
    void btran(std::vector<double>& x) const;

  private:
    struct Eta {
        int pivot_pos;
        double pivot_value;
        std::vector<int> index;     // positions with off-pivot entries
        std::vector<double> value;
    };

    int m_ = 0;
    // L: unit lower triangular, one column per elimination step, entries
    // strictly below the diagonal in position space.
    std::vector<std::vector<std::pair<int, double>>> lower_;
    // U: entries strictly above the diagonal per column, plus diagonal.
    std::vector<std::vector<std::pair<int, double>>> upper_;
    std::vector<double> diag_;
    std::vector<int> pivot_row_;   // position -> original row
    std::vector<int> row_pos_;     // original row -> position
    std::vector<Eta> etas_;

    mutable std::vector<double> work_;
};

}  // namespace attackimpact::lp_detail
