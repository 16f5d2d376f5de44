#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "attackimpact/augment.hpp"
#include "attackimpact/cascade.hpp"
#include "attackimpact/mdp.hpp"

namespace attackimpact {

// Deterministic seeded generator. Uniforms take the top 53 bits of
// mt19937_64 output; gaussians are Box-Muller pairs with the sine partner
// discarded, so every draw consumes a fixed number of engine steps.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(engine_() >> 11) * 0x1p-53;
    }
    double gaussian();

  private:
    std::mt19937_64 engine_;
};

// splitmix64 mix of (seed, index); used to derive independent per-path
// streams so paths can be generated in any grouping.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

struct Trajectory {
    std::vector<double> z;       // length T+1
    std::vector<double> zd;      // length T+1
    std::vector<double> action;  // length T
    std::vector<int> flag;       // length T+1, clamped at max_alarms
    int alarm_count = 0;         // unclamped number of alarm time steps
};

struct RolloutBatch {
    std::vector<Trajectory> paths;
    std::uint64_t seed = 0;
    int max_alarms = 1;
    std::string policy_label;

    int horizon() const { return paths.empty() ? 0 : static_cast<int>(paths[0].action.size()); }
};

// Seeded Monte Carlo on the continuous cascade under a grid policy: the
// continuous state is snapped to its nearest cell for the policy lookup,
// the sampled action node is applied exactly, and the noise is N(0, sigma^2).
// policy is a Markov policy on the augmented chain of `disc`.
RolloutBatch rollout(const CascadeModel& model, const DiscretizedModel& disc,
                     const MarkovPolicy& policy, int max_alarms, int num_paths,
                     std::uint64_t seed, std::string policy_label = "");

// Seeded Monte Carlo on the discretized augmented chain itself (states move
// by the chain kernel, not the continuous dynamics). Coordinates in the
// returned batch are the node values of the visited cells.
RolloutBatch rollout_chain(const DiscretizedModel& disc, const AugmentedMdp& aug,
                           const MarkovPolicy& policy, int num_paths, std::uint64_t seed,
                           std::string policy_label = "");

struct EmpiricalReport {
    int horizon = 0;
    long sample_count = 0;
    // Per-time conditional means given that the run triggered at least one
    // alarm / no alarm; NaN marks an empty conditioning set.
    std::vector<double> mean_z_alarm;
    std::vector<double> mean_z_noalarm;
    std::vector<double> mean_zd_alarm;
    std::vector<double> mean_zd_noalarm;
    std::vector<long> alarm_histogram;    // index = total alarms, 0..T+1
    std::vector<double> prob_at_least;    // P(#alarms >= i), i = 1..M
    std::vector<double> stderr_at_least;  // sqrt(p(1-p)/N)
};

EmpiricalReport empirical_report(const RolloutBatch& batch, int max_alarms);

// Exact P(f_t >= i) for every t = 0..T and i = 1..M by forward propagation
// on the augmented chain; result[t][i-1].
std::vector<std::vector<double>> exact_chain_statistics(const AugmentedMdp& aug,
                                                        const MarkovPolicy& policy);

}  // namespace attackimpact
