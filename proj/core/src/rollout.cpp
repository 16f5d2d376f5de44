#include "attackimpact/rollout.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace attackimpact {

double Rng::gaussian() {
    const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1p-53;  // (0, 1]
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

namespace {

int sample_index(const std::vector<double>& probs, double u) {
    double cum = 0.0;
    int last = -1;
    for (std::size_t a = 0; a < probs.size(); ++a) {
        if (probs[a] <= 0.0) continue;
        cum += probs[a];
        last = static_cast<int>(a);
        if (u < cum) return last;
    }
    return last;  // rounding slack lands on the final supported entry
}

int sample_row(const TransitionRow& row, double u) {
    double cum = 0.0;
    int last = -1;
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (row.prob[k] <= 0.0) continue;
        cum += row.prob[k];
        last = row.next[k];
        if (u < cum) return last;
    }
    return last;
}

}  // namespace

RolloutBatch rollout(const CascadeModel& model, const DiscretizedModel& disc,
                     const MarkovPolicy& policy, int max_alarms, int num_paths,
                     std::uint64_t seed, std::string policy_label) {
    if (num_paths < 1) throw std::invalid_argument("rollout: need at least one path");
    const int base_states = disc.mdp.num_states;
    if (policy.num_states != base_states * (max_alarms + 1) ||
        policy.num_actions != static_cast<int>(disc.action_nodes.size()))
        throw std::invalid_argument("rollout: policy does not match the grid");
    const int T = policy.horizon;

    RolloutBatch batch;
    batch.seed = seed;
    batch.max_alarms = max_alarms;
    batch.policy_label = std::move(policy_label);
    batch.paths.resize(num_paths);

    std::vector<double> rule(policy.num_actions);
    for (int i = 0; i < num_paths; ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        Trajectory& path = batch.paths[i];
        path.z.reserve(T + 1);
        path.zd.reserve(T + 1);
        path.action.reserve(T);
        path.flag.reserve(T + 1);

        double z = 0.0, zd = 0.0;
        int flag = 0;
        path.z.push_back(z);
        path.zd.push_back(zd);
        path.flag.push_back(flag);
        path.alarm_count = zd >= model.threshold ? 1 : 0;

        for (int t = 0; t < T; ++t) {
            const int cell = disc.nearest_cell(z, zd);
            for (int a = 0; a < policy.num_actions; ++a)
                rule[a] = policy.probability(t, flag * base_states + cell, a);
            const int ai = sample_index(rule, rng.uniform());
            if (ai < 0) throw std::invalid_argument("rollout: policy rule has no support");
            const double action = disc.action_nodes[ai];
            const double noise = model.sigma * rng.gaussian();
            const auto [z_next, zd_next] = rollout_step(model, z, zd, action, noise);
            z = z_next;
            zd = zd_next;
            const bool alarm = zd >= model.threshold;
            if (alarm) ++path.alarm_count;
            flag = flag_step(flag, alarm, max_alarms);
            path.action.push_back(action);
            path.z.push_back(z);
            path.zd.push_back(zd);
            path.flag.push_back(flag);
        }
    }
    return batch;
}

RolloutBatch rollout_chain(const DiscretizedModel& disc, const AugmentedMdp& aug,
                           const MarkovPolicy& policy, int num_paths, std::uint64_t seed,
                           std::string policy_label) {
    if (num_paths < 1) throw std::invalid_argument("rollout_chain: need at least one path");
    policy.validate(aug.mdp);
    if (aug.base_states != disc.mdp.num_states)
        throw std::invalid_argument("rollout_chain: chain does not match the grid");
    const int T = aug.mdp.horizon;
    const int nd = disc.num_zd();

    RolloutBatch batch;
    batch.seed = seed;
    batch.max_alarms = aug.max_alarms;
    batch.policy_label = std::move(policy_label);
    batch.paths.resize(num_paths);

    // initial distribution as a pseudo transition row for sampling
    TransitionRow init;
    for (int s = 0; s < aug.mdp.num_states; ++s)
        if (aug.mdp.initial[s] > 0.0) init.add(s, aug.mdp.initial[s]);

    std::vector<double> rule(policy.num_actions);
    for (int i = 0; i < num_paths; ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        Trajectory& path = batch.paths[i];

        int state = sample_row(init, rng.uniform());
        auto record = [&](int st) {
            const int cell = aug.base_state(st);
            path.z.push_back(disc.z_nodes[cell / nd]);
            path.zd.push_back(disc.zd_nodes[cell % nd]);
            path.flag.push_back(aug.flag_of(st));
            if (disc.alarms.contains(cell)) ++path.alarm_count;
        };
        record(state);

        for (int t = 0; t < T; ++t) {
            for (int a = 0; a < policy.num_actions; ++a)
                rule[a] = policy.probability(t, state, a);
            const int ai = sample_index(rule, rng.uniform());
            if (ai < 0) throw std::invalid_argument("rollout_chain: policy rule has no support");
            path.action.push_back(disc.action_nodes[ai]);
            state = sample_row(aug.mdp.transition(t, state, ai), rng.uniform());
            record(state);
        }
    }
    return batch;
}

EmpiricalReport empirical_report(const RolloutBatch& batch, int max_alarms) {
    if (batch.paths.empty()) throw std::invalid_argument("empirical_report: empty batch");
    const int T = batch.horizon();
    const long n = static_cast<long>(batch.paths.size());

    EmpiricalReport rep;
    rep.horizon = T;
    rep.sample_count = n;
    rep.alarm_histogram.assign(T + 2, 0);

    std::vector<double> sum_z_alarm(T + 1, 0.0), sum_z_no(T + 1, 0.0);
    std::vector<double> sum_zd_alarm(T + 1, 0.0), sum_zd_no(T + 1, 0.0);
    long alarmed_paths = 0;

    for (const Trajectory& path : batch.paths) {
        const bool alarmed = path.alarm_count >= 1;
        if (alarmed) ++alarmed_paths;
        rep.alarm_histogram[std::min(path.alarm_count, T + 1)] += 1;
        for (int t = 0; t <= T; ++t) {
            (alarmed ? sum_z_alarm : sum_z_no)[t] += path.z[t];
            (alarmed ? sum_zd_alarm : sum_zd_no)[t] += path.zd[t];
        }
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.mean_z_alarm.assign(T + 1, nan);
    rep.mean_z_noalarm.assign(T + 1, nan);
    rep.mean_zd_alarm.assign(T + 1, nan);
    rep.mean_zd_noalarm.assign(T + 1, nan);
    for (int t = 0; t <= T; ++t) {
        if (alarmed_paths > 0) {
            rep.mean_z_alarm[t] = sum_z_alarm[t] / alarmed_paths;
            rep.mean_zd_alarm[t] = sum_zd_alarm[t] / alarmed_paths;
        }
        if (alarmed_paths < n) {
            rep.mean_z_noalarm[t] = sum_z_no[t] / (n - alarmed_paths);
            rep.mean_zd_noalarm[t] = sum_zd_no[t] / (n - alarmed_paths);
        }
    }

    rep.prob_at_least.assign(max_alarms, 0.0);
    rep.stderr_at_least.assign(max_alarms, 0.0);
    for (int i = 1; i <= max_alarms; ++i) {
        long count = 0;
        for (const Trajectory& path : batch.paths)
            if (path.alarm_count >= i) ++count;
        const double p = static_cast<double>(count) / static_cast<double>(n);
        rep.prob_at_least[i - 1] = p;
        rep.stderr_at_least[i - 1] = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    }
    return rep;
}

std::vector<std::vector<double>> exact_chain_statistics(const AugmentedMdp& aug,
                                                        const MarkovPolicy& policy) {
    const StateMarginals m = forward_marginals(aug.mdp, policy);
    std::vector<std::vector<double>> result(aug.mdp.horizon + 1,
                                            std::vector<double>(aug.max_alarms, 0.0));
    for (int t = 0; t <= aug.mdp.horizon; ++t)
        for (int i = 1; i <= aug.max_alarms; ++i) {
            double total = 0.0;
            for (int idx = i * aug.base_states; idx < aug.mdp.num_states; ++idx)
                total += m.state[t][idx];
            result[t][i - 1] = total;
        }
    return result;
}

}  // namespace attackimpact
