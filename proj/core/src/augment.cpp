#include "attackimpact/augment.hpp"

#include <algorithm>
#include <stdexcept>

namespace attackimpact {

AlarmRegion AlarmRegion::of(int num_states, const std::vector<int>& states) {
    AlarmRegion r = none(num_states);
    for (int s : states) {
        if (s < 0 || s >= num_states)
            throw std::invalid_argument("AlarmRegion: state index out of range");
        r.mask[s] = 1;
    }
    return r;
}

bool AlarmRegion::empty() const {
    return std::all_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m == 0; });
}

AugmentedMdp augment(const FiniteMdp& base, const AlarmRegion& alarms, int max_alarms) {
    base.validate();
    if (max_alarms < 1) throw std::invalid_argument("augment: max_alarms must be >= 1");
    if (alarms.num_states() != base.num_states)
        throw std::invalid_argument("augment: alarm region size mismatch");

    AugmentedMdp aug;
    aug.base_states = base.num_states;
    aug.max_alarms = max_alarms;

    const int S = base.num_states;
    const int A = base.num_actions;
    const int layers = max_alarms + 1;

    FiniteMdp& mdp = aug.mdp;
    mdp.horizon = base.horizon;
    mdp.num_states = S * layers;
    mdp.num_actions = A;
    if (!base.actions_per_state.empty()) {
        mdp.actions_per_state.resize(mdp.num_states);
        for (int f = 0; f < layers; ++f)
            for (int s = 0; s < S; ++s)
                mdp.actions_per_state[aug.index(s, f)] = base.actions_per_state[s];
    }

    mdp.initial.assign(mdp.num_states, 0.0);
    for (int s = 0; s < S; ++s) {
        const int f0 = alarms.contains(s) ? 1 : 0;
        mdp.initial[aug.index(s, std::min(f0, max_alarms))] = base.initial[s];
    }

    const int stages = static_cast<int>(base.kernel.size());
    mdp.kernel.resize(stages);
    for (int k = 0; k < stages; ++k) {
        auto& stage = mdp.kernel[k];
        stage.resize(static_cast<std::size_t>(mdp.num_states) * A);
        for (int f = 0; f < layers; ++f) {
            for (int s = 0; s < S; ++s) {
                for (int a = 0; a < base.action_count(s); ++a) {
                    const TransitionRow& row = base.kernel[k][static_cast<std::size_t>(s) * A + a];
                    TransitionRow& out = stage[static_cast<std::size_t>(aug.index(s, f)) * A + a];
                    for (std::size_t i = 0; i < row.size(); ++i) {
                        const int sp = row.next[i];
                        const int fp = flag_step(f, alarms.contains(sp), max_alarms);
                        out.add(aug.index(sp, fp), row.prob[i]);
                    }
                }
            }
        }
    }

    const int reward_stages = static_cast<int>(base.stage_reward.size());
    mdp.stage_reward.resize(reward_stages);
    for (int k = 0; k < reward_stages; ++k) {
        auto& stage = mdp.stage_reward[k];
        stage.assign(static_cast<std::size_t>(mdp.num_states) * A, 0.0);
        for (int f = 0; f < layers; ++f)
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a)
                    stage[static_cast<std::size_t>(aug.index(s, f)) * A + a] =
                        base.stage_reward[k][static_cast<std::size_t>(s) * A + a];
    }

    mdp.terminal_reward.assign(mdp.num_states, 0.0);
    for (int f = 0; f < layers; ++f)
        for (int s = 0; s < S; ++s)
            mdp.terminal_reward[aug.index(s, f)] = base.terminal_reward[s];

    mdp.validate();
    return aug;
}

std::vector<int> consistent_flags(const std::vector<int>& states, const AlarmRegion& alarms,
                                  int max_alarms) {
    if (states.empty()) throw std::invalid_argument("consistent_flags: empty trajectory");
    std::vector<int> flags(states.size());
    int f = alarms.contains(states[0]) ? std::min(1, max_alarms) : 0;
    flags[0] = f;
    for (std::size_t t = 1; t < states.size(); ++t) {
        f = flag_step(f, alarms.contains(states[t]), max_alarms);
        flags[t] = f;
    }
    return flags;
}

std::vector<int> node_flags(const HistoryTree& tree, const AlarmRegion& alarms, int max_alarms) {
    std::vector<int> flags(tree.nodes.size(), 0);
    for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
        const auto& node = tree.nodes[n];
        const bool in_alarm = alarms.contains(node.state);
        if (node.parent < 0) {
            flags[n] = in_alarm ? std::min(1, max_alarms) : 0;
        } else {
            flags[n] = flag_step(flags[node.parent], in_alarm, max_alarms);
        }
    }
    return flags;
}

HistoryPolicy project_policy(const FiniteMdp& base, const AlarmRegion& alarms,
                             const MarkovPolicy& aug_policy, int max_alarms,
                             std::size_t node_budget) {
    if (alarms.num_states() != base.num_states)
        throw std::invalid_argument("project_policy: alarm region size mismatch");
    if (aug_policy.num_states != base.num_states * (max_alarms + 1))
        throw std::invalid_argument("project_policy: augmented policy shape mismatch");

    auto tree = std::make_shared<HistoryTree>(enumerate_history_tree(base, node_budget));
    const auto flags = node_flags(*tree, alarms, max_alarms);

    HistoryPolicy policy;
    policy.tree = tree;
    policy.rules.resize(tree->nodes.size());
    const int S = base.num_states;
    for (std::size_t n = 0; n < tree->nodes.size(); ++n) {
        const auto& node = tree->nodes[n];
        if (node.time == base.horizon) continue;
        const int aug_state = flags[n] * S + node.state;
        policy.rules[n].resize(base.num_actions);
        for (int a = 0; a < base.num_actions; ++a)
            policy.rules[n][a] = aug_policy.probability(node.time, aug_state, a);
    }
    return policy;
}

double alarm_event_probability(const FiniteMdp& base, const AlarmRegion& alarms,
                               const MarkovPolicy& policy, int count) {
    if (count <= 0) return 1.0;
    // Lift the base policy to the count-augmented chain (the rule ignores
    // the counter) and propagate; f_T >= count iff at least `count` visits.
    AugmentedMdp aug = augment(base, alarms, count);
    MarkovPolicy lifted = MarkovPolicy::zeros(base.horizon, aug.mdp.num_states, base.num_actions);
    for (int t = 0; t < base.horizon; ++t)
        for (int f = 0; f <= count; ++f)
            for (int s = 0; s < base.num_states; ++s)
                for (int a = 0; a < base.num_actions; ++a)
                    lifted.set_probability(t, aug.index(s, f), a, policy.probability(t, s, a));
    const StateMarginals m = forward_marginals(aug.mdp, lifted);
    double p = 0.0;
    for (int s = 0; s < base.num_states; ++s)
        p += m.state[base.horizon][aug.index(s, count)];
    return p;
}

double alarm_event_probability(const FiniteMdp& base, const AlarmRegion& alarms,
                               const HistoryPolicy& policy, int count) {
    if (count <= 0) return 1.0;
    policy.validate(base);
    const HistoryTree& tree = *policy.tree;
    const auto flags = node_flags(tree, alarms, count);
    const auto reach = node_reach_probabilities(policy);
    double p = 0.0;
    const auto [begin, end] = tree.level[base.horizon];
    for (int n = begin; n < end; ++n)
        if (flags[n] >= count) p += reach[n];
    return p;
}

}  // namespace attackimpact
