#include "attackimpact/history.hpp"

#include <cmath>
#include <stdexcept>

namespace attackimpact {

HistoryTree enumerate_history_tree(const FiniteMdp& mdp, std::size_t node_budget) {
    mdp.validate();

    HistoryTree tree;
    tree.horizon = mdp.horizon;
    tree.num_states = mdp.num_states;
    tree.num_actions = mdp.num_actions;
    tree.level.resize(mdp.horizon + 1);

    for (int s = 0; s < mdp.num_states; ++s) {
        if (mdp.initial[s] == 0.0) continue;
        tree.nodes.push_back({-1, -1, s, 0, mdp.initial[s]});
    }
    tree.level[0] = {0, static_cast<int>(tree.nodes.size())};

    for (int t = 0; t < mdp.horizon; ++t) {
        const auto [begin, end] = tree.level[t];
        for (int n = begin; n < end; ++n) {
            const int s = tree.nodes[n].state;
            for (int a = 0; a < mdp.action_count(s); ++a) {
                const TransitionRow& row = mdp.transition(t, s, a);
                for (std::size_t k = 0; k < row.size(); ++k) {
                    if (row.prob[k] == 0.0) continue;
                    if (tree.nodes.size() >= node_budget)
                        throw std::runtime_error("enumerate_history_tree: node budget exceeded");
                    tree.nodes.push_back({n, a, row.next[k], t + 1, row.prob[k]});
                }
            }
        }
        tree.level[t + 1] = {end, static_cast<int>(tree.nodes.size())};
    }

    tree.children.resize(tree.nodes.size());
    for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
        if (tree.nodes[n].parent >= 0)
            tree.children[tree.nodes[n].parent].push_back(static_cast<int>(n));
    }
    return tree;
}

void HistoryPolicy::validate(const FiniteMdp& mdp) const {
    if (!tree) throw std::invalid_argument("HistoryPolicy: missing tree");
    if (tree->horizon != mdp.horizon || tree->num_states != mdp.num_states ||
        tree->num_actions != mdp.num_actions)
        throw std::invalid_argument("HistoryPolicy: tree does not match MDP");
    if (rules.size() != tree->nodes.size())
        throw std::invalid_argument("HistoryPolicy: rule count mismatch");
    for (std::size_t n = 0; n < rules.size(); ++n) {
        const auto& node = tree->nodes[n];
        if (node.time == mdp.horizon) {
            if (!rules[n].empty())
                throw std::invalid_argument("HistoryPolicy: rule on terminal node");
            continue;
        }
        if (static_cast<int>(rules[n].size()) != mdp.num_actions)
            throw std::invalid_argument("HistoryPolicy: rule size mismatch");
        double total = 0.0;
        for (int a = 0; a < mdp.num_actions; ++a) {
            const double p = rules[n][a];
            if (!std::isfinite(p) || p < 0.0)
                throw std::invalid_argument("HistoryPolicy: negative probability");
            if (a >= mdp.action_count(node.state) && p != 0.0)
                throw std::invalid_argument("HistoryPolicy: mass on restricted action");
            total += p;
        }
        if (std::abs(total - 1.0) > kProbTol)
            throw std::invalid_argument("HistoryPolicy: rule does not sum to 1");
    }
}

std::vector<double> node_reach_probabilities(const HistoryPolicy& policy) {
    const HistoryTree& tree = *policy.tree;
    std::vector<double> reach(tree.nodes.size(), 0.0);
    for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
        const auto& node = tree.nodes[n];
        if (node.parent < 0) {
            reach[n] = node.step_prob;
        } else {
            reach[n] = reach[node.parent] * policy.rules[node.parent][node.action] *
                       node.step_prob;
        }
    }
    return reach;
}

StateMarginals forward_marginals(const FiniteMdp& mdp, const HistoryPolicy& policy) {
    policy.validate(mdp);
    const HistoryTree& tree = *policy.tree;
    const auto reach = node_reach_probabilities(policy);

    StateMarginals m;
    m.num_states = mdp.num_states;
    m.num_actions = mdp.num_actions;
    m.state.assign(mdp.horizon + 1, std::vector<double>(mdp.num_states, 0.0));
    m.state_action.assign(
        mdp.horizon,
        std::vector<double>(static_cast<std::size_t>(mdp.num_states) * mdp.num_actions, 0.0));

    for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
        const auto& node = tree.nodes[n];
        m.state[node.time][node.state] += reach[n];
        if (node.time < mdp.horizon) {
            for (int a = 0; a < mdp.action_count(node.state); ++a) {
                m.state_action[node.time]
                              [static_cast<std::size_t>(node.state) * mdp.num_actions + a] +=
                    reach[n] * policy.rules[n][a];
            }
        }
    }
    return m;
}

}  // namespace attackimpact
