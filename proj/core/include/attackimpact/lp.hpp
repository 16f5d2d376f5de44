#pragma once

#include <iosfwd>
#include <vector>

namespace attackimpact {

enum class RowSense : char { Equal, LessEqual };

enum class LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    NumericalFailure,
};

const char* to_string(LpStatus status);

// Linear program over variables bounded below by zero:
//
//   max (or min)  objective . x
//   subject to    A x  {=, <=}  rhs   row-wise,   x >= 0
//
// The constraint matrix is stored column-major; build it by fixing the row
// side first (set_rows) and then appending columns (add_column).
struct LinearProgram {
    bool maximize = false;
    int num_rows = 0;
    std::vector<double> objective;
    std::vector<double> rhs;
    std::vector<RowSense> row_sense;

    std::vector<int> col_start{0};
    std::vector<int> row_index;
    std::vector<double> value;

    int num_cols() const { return static_cast<int>(col_start.size()) - 1; }

    void set_rows(std::vector<double> rhs_values, std::vector<RowSense> senses);
    // Returns the new column's index. Entries are (row, coefficient).
    int add_column(double objective_coeff, const std::vector<std::pair<int, double>>& entries);

    void validate() const;

    // Textual dump in a sparse triplet format, one value per line:
    //   lp <rows> <cols> <max|min>
    //   senses <one char per row: E or L>
    //   rhs <row> <value>        (all rows)
    //   obj <col> <value>        (nonzero objective entries)
    //   a <row> <col> <value>    (nonzero matrix entries)
    void dump(std::ostream& os) const;
};

struct LpOptions {
    double pivot_tol = 1e-10;   // smallest acceptable pivot magnitude
    double feas_tol = 1e-9;     // primal feasibility tolerance (scaled)
    double opt_tol = 1e-9;      // reduced-cost optimality tolerance (scaled)
    long max_iterations = 0;    // 0 selects 50 * (rows + cols)
    int refactor_interval = 100;
    // Consecutive degenerate pivots tolerated before switching to Bland's
    // rule; 0 switches immediately after the first degenerate step.
    int degeneracy_threshold = 25;
};

// Basis member identifiers: j < num_cols is the structural column j,
// num_cols + r is the slack of (LessEqual) row r.
struct LpSolution {
    LpStatus status = LpStatus::NumericalFailure;
    double objective = 0.0;
    std::vector<double> primal;  // structural variables
    // Row duals y with b . y equal to the objective at optimality. For a
    // maximization program, y on LessEqual rows is nonnegative and reduced
    // costs c_j - y . A_j are nonpositive; signs flip for minimization.
    std::vector<double> dual;
    std::vector<int> basis;
    long iterations = 0;
};

// Two-phase revised simplex with sparse LU basis factorization, product-form
// updates between refactorizations, Dantzig pricing and a Bland fallback
// after a degeneracy streak. Deterministic: identical programs produce
// identical pivot sequences.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

// Reoptimizes from a caller-supplied basis (one member per row, identifiers
// as in LpSolution::basis) using the dual simplex. The basis must be
// nonsingular and dual feasible; when it is not, the returned status is
// NumericalFailure and the caller should fall back to solve_lp.
LpSolution solve_lp_from_basis(const LinearProgram& lp, const std::vector<int>& basis,
                               const LpOptions& options = {});

// Post-solve diagnostics computed against the original, unscaled program.
struct ResidualReport {
    double primal_residual = 0.0;  // worst row violation / variable negativity
    double dual_residual = 0.0;    // worst reduced-cost sign violation
    double complementarity = 0.0;  // worst |x_j rc_j| or |y_i slack_i|
    double duality_gap = 0.0;      // |objective - rhs . dual|
};

ResidualReport check_solution(const LinearProgram& lp, const LpSolution& solution);

}  // namespace attackimpact
