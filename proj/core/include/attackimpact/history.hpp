#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "attackimpact/mdp.hpp"

namespace attackimpact {

// Fully unfolded history tree of a finite MDP. Level t holds one node per
// reachable history (x_0, a_0, ..., x_t); branches exist only for kernel
// entries with positive probability. Children of a node are ordered by
// action index first, then by the kernel row order of the successor.
struct HistoryTree {
    struct Node {
        int parent = -1;       // -1 for level-0 roots
        int action = -1;       // action at the parent that led here
        int state = 0;
        int time = 0;
        double step_prob = 0;  // p0(state) for roots, p(state | parent, action) otherwise
    };

    int horizon = 0;
    int num_states = 0;
    int num_actions = 0;
    std::vector<Node> nodes;                     // grouped by level
    std::vector<std::pair<int, int>> level;      // [t] -> [begin, end) into nodes
    std::vector<std::vector<int>> children;      // per node; empty at the last level

    std::size_t node_count() const { return nodes.size(); }
};

inline constexpr std::size_t kDefaultHistoryBudget = 1'000'000;

// Enumerates every history of the MDP. Throws std::runtime_error when the
// tree would exceed node_budget nodes.
HistoryTree enumerate_history_tree(const FiniteMdp& mdp,
                                   std::size_t node_budget = kDefaultHistoryBudget);

// History-dependent randomized policy, indexed by history tree node.
// rules[n] is the action distribution at node n; nodes at the final level
// carry no rule (empty vector).
struct HistoryPolicy {
    std::shared_ptr<const HistoryTree> tree;
    std::vector<std::vector<double>> rules;

    void validate(const FiniteMdp& mdp) const;
};

// Exact forward recursion over the history tree, marginalized per time step.
StateMarginals forward_marginals(const FiniteMdp& mdp, const HistoryPolicy& policy);

// Reach probability of every node under the policy (mass of the partial
// history including its action choices).
std::vector<double> node_reach_probabilities(const HistoryPolicy& policy);

}  // namespace attackimpact
