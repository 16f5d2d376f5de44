#pragma once

#include <cstddef>
#include <vector>

#include "attackimpact/augment.hpp"
#include "attackimpact/lp.hpp"
#include "attackimpact/mdp.hpp"
#include "attackimpact/occupancy.hpp"

namespace attackimpact {

struct SolverOptions {
    LpOptions lp;
    // Start from the unconstrained-policy basis and reoptimize with the
    // dual simplex; disabled or failed warm starts fall back to the cold
    // two-phase solve.
    bool warm_start = true;
};

struct SolveReport {
    LpStatus status = LpStatus::NumericalFailure;
    double value = 0.0;               // LP optimum J*
    MarkovPolicy policy;              // augmented chain, all counter layers
    // Exact P(f_T >= i) of the extracted policy for i = 1..M, by forward
    // propagation (not read off the LP).
    std::vector<double> alarm_probabilities;
    ResidualReport residuals;
    long lp_iterations = 0;
    double solve_seconds = 0.0;

    bool feasible() const { return status == LpStatus::Optimal; }
};

// Full occupation-measure solve on the augmented chain (all counter layers
// are LP variables). The extracted policy is re-evaluated exactly; a
// mismatch beyond 1e-7 with the LP objective or a constraint violation
// beyond 1e-7 throws std::runtime_error.
SolveReport solve_constrained(const AugmentedMdp& aug, const ConstraintSpec& spec,
                              const SolverOptions& options = {});

// Reduced solve: the policy on the saturated counter layer f = M is pinned
// to the unconstrained optimum and its value function is absorbed as the
// continuation payoff of the mass entering that layer; the LP runs over
// layers f < M only. Returns a report on the full augmented chain.
SolveReport solve_reduced(const FiniteMdp& base, const AlarmRegion& alarms,
                          const ConstraintSpec& spec, int max_alarms,
                          const SolverOptions& options = {});

struct OracleValue {
    LpStatus status = LpStatus::NumericalFailure;
    double value = 0.0;
};

// Exact optimum over history-dependent randomized policies, via the
// occupation LP on the fully unfolded history tree with constraint rows
// counting alarm multiplicity along each leaf path. Ground truth for the
// augmented-chain solves.
OracleValue tree_oracle(const FiniteMdp& base, const AlarmRegion& alarms,
                        const ConstraintSpec& spec, int max_alarms,
                        std::size_t node_budget = kDefaultHistoryBudget,
                        const SolverOptions& options = {});

struct MarkovOracleOptions {
    int grid_resolution = 200;   // grid points per parameter is resolution+1
    int max_grid_parameters = 2; // grid search is skipped above this
    int max_sweeps = 100;        // coordinate-ascent sweep limit
};

struct MarkovOracleResult {
    LpStatus status = LpStatus::NumericalFailure;
    double value = 0.0;
    MarkovPolicy policy;  // base chain
};

// Best value over Markov policies on the unaugmented state space under the
// single constraint P(at least one alarm) <= delta.
//
// Exact when the constraint is vacuous (delta >= 1 or no alarm states) and
// when the alarm region is absorbing (then "ever in the region" equals
// "in the region at T" and the base occupation LP applies). Otherwise the
// problem is nonconvex in the policy; the search runs a dense parameter
// grid (when small enough) followed by exact per-coordinate LP ascent,
// which lands on the global optimum whenever a single decision epoch is
// binding.
MarkovOracleResult markov_restricted_oracle(const FiniteMdp& base, const AlarmRegion& alarms,
                                            double delta,
                                            const MarkovOracleOptions& options = {});

}  // namespace attackimpact
