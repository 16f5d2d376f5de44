#include "attackimpact/mdp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace attackimpact {

double TransitionRow::sum() const {
    double s = 0.0;
    for (double p : prob) s += p;
    return s;
}

FiniteMdp FiniteMdp::time_invariant(int horizon, int num_states, int num_actions) {
    FiniteMdp mdp;
    mdp.horizon = horizon;
    mdp.num_states = num_states;
    mdp.num_actions = num_actions;
    mdp.initial.assign(num_states, 0.0);
    mdp.kernel.resize(1);
    mdp.kernel[0].resize(static_cast<std::size_t>(num_states) * num_actions);
    mdp.stage_reward.resize(1);
    mdp.stage_reward[0].assign(static_cast<std::size_t>(num_states) * num_actions, 0.0);
    mdp.terminal_reward.assign(num_states, 0.0);
    return mdp;
}

namespace {

void require(bool cond, const std::string& message) {
    if (!cond) throw std::invalid_argument(message);
}

void check_distribution(const std::vector<int>& idx, const std::vector<double>& val,
                        int num_states, const std::string& what) {
    double total = 0.0;
    for (std::size_t k = 0; k < val.size(); ++k) {
        require(idx[k] >= 0 && idx[k] < num_states, what + ": index out of range");
        require(std::isfinite(val[k]) && val[k] >= 0.0, what + ": negative or non-finite mass");
        total += val[k];
    }
    require(std::abs(total - 1.0) <= kProbTol, what + ": mass does not sum to 1");
}

}  // namespace

void FiniteMdp::validate() const {
    require(horizon >= 1, "FiniteMdp: horizon must be >= 1");
    require(num_states >= 1 && num_actions >= 1, "FiniteMdp: empty state or action set");
    require(static_cast<int>(initial.size()) == num_states, "FiniteMdp: p0 size mismatch");
    require(actions_per_state.empty() ||
                static_cast<int>(actions_per_state.size()) == num_states,
            "FiniteMdp: actions_per_state size mismatch");
    for (int s = 0; s < num_states; ++s) {
        require(action_count(s) >= 1 && action_count(s) <= num_actions,
                "FiniteMdp: invalid per-state action count");
    }

    double p0 = 0.0;
    for (double p : initial) {
        require(std::isfinite(p) && p >= 0.0, "FiniteMdp: invalid p0 entry");
        p0 += p;
    }
    require(std::abs(p0 - 1.0) <= kProbTol, "FiniteMdp: p0 does not sum to 1");

    require(kernel.size() == 1 || static_cast<int>(kernel.size()) == horizon,
            "FiniteMdp: kernel must have 1 or horizon stages");
    require(stage_reward.size() == 1 || static_cast<int>(stage_reward.size()) == horizon,
            "FiniteMdp: stage_reward must have 1 or horizon stages");

    const std::size_t rows = static_cast<std::size_t>(num_states) * num_actions;
    for (const auto& stage : kernel) {
        require(stage.size() == rows, "FiniteMdp: kernel stage size mismatch");
    }
    for (const auto& stage : stage_reward) {
        require(stage.size() == rows, "FiniteMdp: reward stage size mismatch");
        for (double g : stage) require(std::isfinite(g), "FiniteMdp: non-finite stage reward");
    }
    require(static_cast<int>(terminal_reward.size()) == num_states,
            "FiniteMdp: terminal reward size mismatch");
    for (double g : terminal_reward) require(std::isfinite(g), "FiniteMdp: non-finite terminal reward");

    // Only rows for valid (s, a) pairs need to be distributions.
    for (std::size_t k = 0; k < kernel.size(); ++k) {
        for (int s = 0; s < num_states; ++s) {
            for (int a = 0; a < action_count(s); ++a) {
                const TransitionRow& row = kernel[k][static_cast<std::size_t>(s) * num_actions + a];
                check_distribution(row.next, row.prob, num_states, "FiniteMdp kernel row");
            }
        }
    }
}

MarkovPolicy MarkovPolicy::zeros(int horizon, int num_states, int num_actions) {
    MarkovPolicy p;
    p.horizon = horizon;
    p.num_states = num_states;
    p.num_actions = num_actions;
    p.rules.assign(horizon, std::vector<double>(static_cast<std::size_t>(num_states) * num_actions, 0.0));
    return p;
}

MarkovPolicy MarkovPolicy::deterministic(int horizon, int num_states, int num_actions,
                                         const std::vector<std::vector<int>>& action) {
    MarkovPolicy p = zeros(horizon, num_states, num_actions);
    for (int t = 0; t < horizon; ++t)
        for (int s = 0; s < num_states; ++s)
            p.set_probability(t, s, action[t][s], 1.0);
    return p;
}

void MarkovPolicy::validate(const FiniteMdp& mdp) const {
    require(horizon == mdp.horizon, "MarkovPolicy: horizon mismatch");
    require(num_states == mdp.num_states && num_actions == mdp.num_actions,
            "MarkovPolicy: shape mismatch");
    require(static_cast<int>(rules.size()) == horizon, "MarkovPolicy: missing rules");
    for (int t = 0; t < horizon; ++t) {
        require(rules[t].size() == static_cast<std::size_t>(num_states) * num_actions,
                "MarkovPolicy: rule size mismatch");
        for (int s = 0; s < num_states; ++s) {
            double total = 0.0;
            for (int a = 0; a < num_actions; ++a) {
                double p = probability(t, s, a);
                require(std::isfinite(p) && p >= 0.0, "MarkovPolicy: negative probability");
                require(a < mdp.action_count(s) || p == 0.0,
                        "MarkovPolicy: mass on restricted action");
                total += p;
            }
            require(std::abs(total - 1.0) <= kProbTol, "MarkovPolicy: rule does not sum to 1");
        }
    }
}

StateMarginals forward_marginals(const FiniteMdp& mdp, const MarkovPolicy& policy) {
    policy.validate(mdp);

    StateMarginals m;
    m.num_states = mdp.num_states;
    m.num_actions = mdp.num_actions;
    m.state.assign(mdp.horizon + 1, std::vector<double>(mdp.num_states, 0.0));
    m.state_action.assign(
        mdp.horizon, std::vector<double>(static_cast<std::size_t>(mdp.num_states) * mdp.num_actions, 0.0));

    m.state[0] = mdp.initial;
    for (int t = 0; t < mdp.horizon; ++t) {
        for (int s = 0; s < mdp.num_states; ++s) {
            const double ps = m.state[t][s];
            if (ps == 0.0) continue;
            for (int a = 0; a < mdp.action_count(s); ++a) {
                const double mass = ps * policy.probability(t, s, a);
                if (mass == 0.0) continue;
                m.state_action[t][static_cast<std::size_t>(s) * mdp.num_actions + a] = mass;
                const TransitionRow& row = mdp.transition(t, s, a);
                for (std::size_t k = 0; k < row.size(); ++k)
                    m.state[t + 1][row.next[k]] += mass * row.prob[k];
            }
        }
    }
    return m;
}

std::vector<std::vector<double>> policy_value_function(const FiniteMdp& mdp,
                                                       const MarkovPolicy& policy) {
    policy.validate(mdp);
    std::vector<std::vector<double>> value(mdp.horizon + 1,
                                           std::vector<double>(mdp.num_states, 0.0));
    value[mdp.horizon] = mdp.terminal_reward;
    for (int t = mdp.horizon - 1; t >= 0; --t) {
        for (int s = 0; s < mdp.num_states; ++s) {
            double v = 0.0;
            for (int a = 0; a < mdp.action_count(s); ++a) {
                const double pa = policy.probability(t, s, a);
                if (pa == 0.0) continue;
                double q = mdp.reward(t, s, a);
                const TransitionRow& row = mdp.transition(t, s, a);
                for (std::size_t k = 0; k < row.size(); ++k)
                    q += row.prob[k] * value[t + 1][row.next[k]];
                v += pa * q;
            }
            value[t][s] = v;
        }
    }
    return value;
}

double evaluate_policy(const FiniteMdp& mdp, const MarkovPolicy& policy) {
    const auto value = policy_value_function(mdp, policy);
    double j = 0.0;
    for (int s = 0; s < mdp.num_states; ++s) j += mdp.initial[s] * value[0][s];
    return j;
}

BackwardInductionResult backward_induction(const FiniteMdp& mdp) {
    mdp.validate();

    BackwardInductionResult r;
    r.value_function.assign(mdp.horizon + 1, std::vector<double>(mdp.num_states, 0.0));
    r.value_function[mdp.horizon] = mdp.terminal_reward;
    r.greedy_action.assign(mdp.horizon, std::vector<int>(mdp.num_states, 0));

    for (int t = mdp.horizon - 1; t >= 0; --t) {
        for (int s = 0; s < mdp.num_states; ++s) {
            double best = 0.0;
            int best_action = -1;
            for (int a = 0; a < mdp.action_count(s); ++a) {
                double q = mdp.reward(t, s, a);
                const TransitionRow& row = mdp.transition(t, s, a);
                for (std::size_t k = 0; k < row.size(); ++k)
                    q += row.prob[k] * r.value_function[t + 1][row.next[k]];
                // strict improvement only: ties stay at the lowest index
                if (best_action < 0 || q > best) {
                    best = q;
                    best_action = a;
                }
            }
            r.value_function[t][s] = best;
            r.greedy_action[t][s] = best_action;
        }
    }

    r.policy = MarkovPolicy::deterministic(mdp.horizon, mdp.num_states, mdp.num_actions,
                                           r.greedy_action);
    r.value = 0.0;
    for (int s = 0; s < mdp.num_states; ++s)
        r.value += mdp.initial[s] * r.value_function[0][s];
    return r;
}

}  // namespace attackimpact
