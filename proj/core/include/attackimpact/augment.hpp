#pragma once

#include <cstdint>
#include <vector>

#include "attackimpact/history.hpp"
#include "attackimpact/mdp.hpp"

namespace attackimpact {

// Subset of base states where the detector raises an alarm.
struct AlarmRegion {
    std::vector<std::uint8_t> mask;  // size num_states, 1 = alarm state

    static AlarmRegion none(int num_states) { return {std::vector<std::uint8_t>(num_states, 0)}; }
    static AlarmRegion of(int num_states, const std::vector<int>& states);

    bool contains(int s) const { return mask[s] != 0; }
    int num_states() const { return static_cast<int>(mask.size()); }
    bool empty() const;
};

// Deterministic alarm-count transition: the counter increments when the
// successor state is in the alarm region and saturates at max_alarms.
inline int flag_step(int flag, bool next_in_alarm, int max_alarms) {
    if (flag >= max_alarms) return max_alarms;
    return next_in_alarm ? flag + 1 : flag;
}

// Product of a base MDP with the alarm counter f in {0..M}. Augmented
// states are indexed f * base_states + s, so the counter layers are
// contiguous and "f >= i" is an index range. Rewards do not depend on f.
//
// The initial augmented distribution places base mass p0(s) at
// (s, f0) with f0 = 1 when s is an alarm state and f0 = 0 otherwise.
struct AugmentedMdp {
    FiniteMdp mdp;
    int base_states = 0;
    int max_alarms = 0;

    int index(int s, int f) const { return f * base_states + s; }
    int base_state(int idx) const { return idx % base_states; }
    int flag_of(int idx) const { return idx / base_states; }
};

// Builds the augmented MDP. max_alarms must be >= 1; the alarm region may
// be empty (the counter then never rises).
AugmentedMdp augment(const FiniteMdp& base, const AlarmRegion& alarms, int max_alarms);

// Alarm-count trajectory consistent with a base state trajectory:
// f_t = min(M, #{tau <= t : s_tau in alarm region}).
std::vector<int> consistent_flags(const std::vector<int>& states, const AlarmRegion& alarms,
                                  int max_alarms);

// Alarm counts per history-tree node (the consistent flag of each node's
// state path), clamped at max_alarms.
std::vector<int> node_flags(const HistoryTree& tree, const AlarmRegion& alarms, int max_alarms);

// Converts a Markov policy for the augmented system into a history-dependent
// policy on the base system: at a history ending in x_t, act according to
// the augmented rule at (x_t, f) where f is the consistent alarm count of
// the history. The result depends on the history only through (x_t, f).
HistoryPolicy project_policy(const FiniteMdp& base, const AlarmRegion& alarms,
                             const MarkovPolicy& aug_policy, int max_alarms,
                             std::size_t node_budget = kDefaultHistoryBudget);

// Exact probability that at least `count` distinct time steps visit the
// alarm region under the induced measure. count = 0 returns 1.
double alarm_event_probability(const FiniteMdp& base, const AlarmRegion& alarms,
                               const MarkovPolicy& policy, int count);
double alarm_event_probability(const FiniteMdp& base, const AlarmRegion& alarms,
                               const HistoryPolicy& policy, int count);

}  // namespace attackimpact
