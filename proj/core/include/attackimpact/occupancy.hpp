#pragma once

#include <cstddef>
#include <vector>

#include "attackimpact/augment.hpp"
#include "attackimpact/lp.hpp"
#include "attackimpact/mdp.hpp"

namespace attackimpact {

// Stealth budgets: delta[i-1] bounds P(f_T >= i) for i = 1..delta.size().
// The list may be shorter than the counter range M; higher counts are then
// unconstrained. No monotonicity across i is required.
struct ConstraintSpec {
    std::vector<double> delta;

    int size() const { return static_cast<int>(delta.size()); }
    void validate(int max_alarms) const;
};

// Time-indexed state-action visitation mass of a policy on the augmented
// chain: stage[t][s*A + a] for t = 0..T-1 plus the terminal state mass.
struct OccupancyMeasure {
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    std::vector<std::vector<double>> stage;
    std::vector<double> terminal;

    double stage_mass(int t) const;
    double terminal_mass() const;
    // Worst violation of the flow-conservation identities under the MDP's
    // kernel (including the terminal flow and the initial distribution).
    double max_flow_residual(const FiniteMdp& mdp) const;
};

// Occupation-measure LP for the constrained augmented problem:
//
//   max  sum_t rho_t . g_t + rho_T . g_T
//   s.t. sum_a rho_0(s,a) = p0(s)                                  per state
//        sum_a rho_t(s',a) = sum_{s,a} P(s'|s,a) rho_{t-1}(s,a)    per (t,s')
//        rho_T(s') = sum_{s,a} P(s'|s,a) rho_{T-1}(s,a)            per state
//        sum_{(s,f): f >= i} rho_T(s,f) <= delta_i                 per i
//        rho >= 0
//
// Columns are ordered stage-major (t, then state, then action), then the
// terminal block; rows are initial, flow (t = 1..T-1), terminal, chance.
struct OccupancyLp {
    LinearProgram lp;
    int horizon = 0;
    int num_states = 0;      // augmented
    int num_actions = 0;
    int num_constraints = 0;
    std::vector<int> stage_var;     // [t*S*A + s*A + a], -1 when the action is restricted
    std::vector<int> terminal_var;  // [s]

    int var_stage(int t, int s, int a) const {
        return stage_var[(static_cast<std::size_t>(t) * num_states + s) * num_actions + a];
    }
    int var_terminal(int s) const { return terminal_var[s]; }
    int row_initial(int s) const { return s; }
    int row_flow(int t, int s) const { return t * num_states + s; }
    int row_terminal(int s) const { return horizon * num_states + s; }
    int row_chance(int i) const { return (horizon + 1) * num_states + (i - 1); }
};

inline constexpr std::size_t kDefaultVariableBudget = 1'000'000;

// Throws std::length_error when the variable count would exceed the budget.
OccupancyLp build_occupancy_lp(const AugmentedMdp& aug, const ConstraintSpec& spec,
                               std::size_t variable_budget = kDefaultVariableBudget);

// Basis realizing a deterministic policy's occupation measure: the policy
// column per flow row, the terminal variables, and the chance slacks. When
// the policy is the unconstrained optimum this basis is dual feasible, which
// makes it a valid dual-simplex warm start.
std::vector<int> unconstrained_policy_basis(const OccupancyLp& olp,
                                            const std::vector<std::vector<int>>& greedy_action);

OccupancyMeasure occupancy_from_solution(const OccupancyLp& olp, const LpSolution& solution);

// Disintegrates an occupation measure into a Markov policy. States whose
// stage mass is below 1e-12 receive probability one on completion_action.
MarkovPolicy extract_policy(const OccupancyMeasure& occ,
                            const std::vector<std::vector<int>>& completion_action);

}  // namespace attackimpact
