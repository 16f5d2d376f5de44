#pragma once

#include <cstdint>
#include <vector>

namespace attackimpact {

// Tolerance used when validating that probability vectors sum to one.
inline constexpr double kProbTol = 1e-12;

// One sparse transition row p(. | s, a). Entries are kept in insertion
// order; duplicate successor indices are not allowed.
struct TransitionRow {
    std::vector<int> next;
    std::vector<double> prob;

    void add(int state, double probability) {
        next.push_back(state);
        prob.push_back(probability);
    }
    std::size_t size() const { return next.size(); }
    double sum() const;
};

// Finite-horizon MDP with decisions at t = 0, ..., horizon-1 and a terminal
// reward collected at t = horizon. Rewards are stored in maximization
// orientation (larger is better for the decision maker).
//
// The transition kernel and the stage rewards may either be time-invariant
// (a single stage stored and shared across all t) or fully time-indexed
// (one stage per decision step). Rows are addressed by s * num_actions + a.
//
// Actions may optionally be restricted per state via actions_per_state;
// when empty, every state has all num_actions actions.
class FiniteMdp {
  public:
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;

    std::vector<double> initial;              // p0, size num_states
    std::vector<int> actions_per_state;       // optional, size num_states

    // kernel[k][s * num_actions + a]; k ranges over 1 (time-invariant)
    // or horizon stages.
    std::vector<std::vector<TransitionRow>> kernel;
    // stage_reward[k][s * num_actions + a]; same staging convention.
    std::vector<std::vector<double>> stage_reward;
    std::vector<double> terminal_reward;      // size num_states

    int action_count(int s) const {
        return actions_per_state.empty() ? num_actions : actions_per_state[s];
    }
    const TransitionRow& transition(int t, int s, int a) const {
        const auto& stage = kernel.size() == 1 ? kernel[0] : kernel[t];
        return stage[static_cast<std::size_t>(s) * num_actions + a];
    }
    double reward(int t, int s, int a) const {
        const auto& stage =
            stage_reward.size() == 1 ? stage_reward[0] : stage_reward[t];
        return stage[static_cast<std::size_t>(s) * num_actions + a];
    }

    // Throws std::invalid_argument when any structural invariant fails:
    // kernel rows and p0 must sum to 1 within kProbTol with nonnegative
    // entries, rewards must be finite, sizes must be consistent.
    void validate() const;

    // Convenience constructors for the common cases.
    static FiniteMdp time_invariant(int horizon, int num_states, int num_actions);
};

// Time-indexed stochastic action rule pi_t(a | s) for t = 0..horizon-1.
// rules[t][s * num_actions + a].
struct MarkovPolicy {
    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    std::vector<std::vector<double>> rules;

    static MarkovPolicy zeros(int horizon, int num_states, int num_actions);
    // Deterministic policy: probability one on action[t][s].
    static MarkovPolicy deterministic(int horizon, int num_states, int num_actions,
                                      const std::vector<std::vector<int>>& action);

    double probability(int t, int s, int a) const {
        return rules[t][static_cast<std::size_t>(s) * num_actions + a];
    }
    void set_probability(int t, int s, int a, double p) {
        rules[t][static_cast<std::size_t>(s) * num_actions + a] = p;
    }

    // Validates shape against the MDP and that every rule over the valid
    // actions of its state is a probability vector within kProbTol.
    void validate(const FiniteMdp& mdp) const;
};

// Exact per-time distributions induced by a policy: state[t][s] for
// t = 0..T and state_action[t][s * A + a] for t = 0..T-1.
struct StateMarginals {
    int num_states = 0;
    int num_actions = 0;
    std::vector<std::vector<double>> state;
    std::vector<std::vector<double>> state_action;
};

// Exact forward recursion of the closed-loop distribution flow.
StateMarginals forward_marginals(const FiniteMdp& mdp, const MarkovPolicy& policy);

// J(pi) = sum_t E[g_t(x_t, a_t)] + E[g_T(x_T)], computed by the backward
// value recursion for the fixed policy.
double evaluate_policy(const FiniteMdp& mdp, const MarkovPolicy& policy);

// Per-(t, state) value function of a fixed Markov policy; index [t][s]
// with t = 0..T (row T holds the terminal reward).
std::vector<std::vector<double>> policy_value_function(const FiniteMdp& mdp,
                                                       const MarkovPolicy& policy);

struct BackwardInductionResult {
    MarkovPolicy policy;                            // deterministic
    double value = 0.0;                             // p0 . V_0
    std::vector<std::vector<double>> value_function; // [t][s], t = 0..T
    // greedy_action[t][s], the argmax realizing value_function.
    std::vector<std::vector<int>> greedy_action;
};

// Unconstrained finite-horizon dynamic programming. Ties in the argmax are
// broken towards the lowest action index, so the result is deterministic.
BackwardInductionResult backward_induction(const FiniteMdp& mdp);

}  // namespace attackimpact
