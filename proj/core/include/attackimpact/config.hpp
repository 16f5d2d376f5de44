#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "attackimpact/augment.hpp"
#include "attackimpact/cascade.hpp"
#include "attackimpact/mdp.hpp"
#include "attackimpact/occupancy.hpp"

namespace attackimpact {

// One experiment: cascade constants, stealth budgets, grid resolution and
// simulation controls. Serialized as flat key = value text with section
// headers; see parse_config.
struct ExperimentConfig {
    int horizon = 15;        // T
    double sigma = 0.1;
    double bias = 0.8;       // b_d
    double threshold = 2.0;  // tau_d
    double z_ref = 1.5;

    std::vector<double> delta{0.5};
    int max_alarms = 1;      // M

    int num_z = 17;          // Nz
    double z_lo = -0.5;
    double z_hi = 2.5;
    int num_zd = 11;         // Nd
    double zd_hi = 2.2;
    int num_actions = 9;     // Na
    double action_min = -1.0;
    double action_max = 1.0;

    long rollouts = 100000;  // N
    std::uint64_t seed = 1;

    enum class Path { Full, Reduced };
    Path path = Path::Full;

    bool operator==(const ExperimentConfig&) const = default;

    CascadeModel cascade() const;
    Grid grid() const;
    ConstraintSpec constraints() const { return ConstraintSpec{delta}; }
    void validate() const;
};

// Accepted keys: T, sigma, b_d, tau_d, z_ref, delta (comma list), M, Nz,
// z_lo, z_hi, Nd, zd_hi, Na, a_min, a_max, N, seed, path (full|reduced).
// Section headers [..] and # comments are skipped; unknown keys throw.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& config);

// Compiled-in presets reproducing the built-in experiments:
// "paper-exp1" (single alarm budget 0.5) and "paper-exp2"
// (budgets 0.5/0.3/0.1 on one, two and three alarms).
ExperimentConfig preset_config(const std::string& name);

// Built-in six-state counterexample where history-dependent policies beat
// every Markov policy. State order: 0 = start (safe), 1 = start (alarm),
// 2 = decision state, 3 = safe outcome (payoff 1), 4 = risky success
// (payoff 10), 5 = risky failure (alarm, payoff 0). Two actions at the
// decision state: 0 plays safe, 1 gambles.
FiniteMdp appendix_mdp();
AlarmRegion appendix_alarm_region();
inline constexpr double kAppendixDelta = 0.5;

}  // namespace attackimpact
