#include "attackimpact/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace attackimpact {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

LpSolution run_lp(const LinearProgram& lp, const std::vector<int>& warm_basis,
                  const SolverOptions& options) {
    if (options.warm_start && !warm_basis.empty()) {
        LpSolution sol = solve_lp_from_basis(lp, warm_basis, options.lp);
        if (sol.status == LpStatus::Optimal || sol.status == LpStatus::Infeasible) return sol;
    }
    return solve_lp(lp, options.lp);
}

std::vector<double> exact_alarm_profile(const AugmentedMdp& aug, const MarkovPolicy& policy) {
    const StateMarginals m = forward_marginals(aug.mdp, policy);
    std::vector<double> profile(aug.max_alarms, 0.0);
    const auto& final_state = m.state[aug.mdp.horizon];
    for (int i = 1; i <= aug.max_alarms; ++i) {
        double total = 0.0;
        for (int idx = i * aug.base_states; idx < aug.mdp.num_states; ++idx)
            total += final_state[idx];
        profile[i - 1] = total;
    }
    return profile;
}

void check_extraction(const char* where, const AugmentedMdp& aug, const ConstraintSpec& spec,
                      SolveReport& report, double lp_objective) {
    const double exact_value = evaluate_policy(aug.mdp, report.policy);
    if (std::abs(exact_value - lp_objective) > 1e-7 * (1.0 + std::abs(lp_objective)))
        throw std::runtime_error(std::string(where) +
                                 ": extracted policy value disagrees with the LP objective");
    for (int i = 1; i <= spec.size(); ++i)
        if (report.alarm_probabilities[i - 1] > spec.delta[i - 1] + 1e-7)
            throw std::runtime_error(std::string(where) +
                                     ": extracted policy violates a stealth constraint");
}

}  // namespace

SolveReport solve_constrained(const AugmentedMdp& aug, const ConstraintSpec& spec,
                              const SolverOptions& options) {
    const auto start = Clock::now();
    spec.validate(aug.max_alarms);

    const BackwardInductionResult unconstrained = backward_induction(aug.mdp);
    const OccupancyLp olp = build_occupancy_lp(aug, spec);
    const LpSolution sol =
        run_lp(olp.lp, unconstrained_policy_basis(olp, unconstrained.greedy_action), options);

    SolveReport report;
    report.status = sol.status;
    report.lp_iterations = sol.iterations;
    if (sol.status == LpStatus::Optimal) {
        report.value = sol.objective;
        report.residuals = check_solution(olp.lp, sol);
        const OccupancyMeasure occ = occupancy_from_solution(olp, sol);
        report.policy = extract_policy(occ, unconstrained.greedy_action);
        report.alarm_probabilities = exact_alarm_profile(aug, report.policy);
        check_extraction("solve_constrained", aug, spec, report, sol.objective);
    }
    report.solve_seconds = seconds_since(start);
    return report;
}

namespace {

// Layout of the reduced LP: counter layers f < M keep their occupation
// variables (reduced state rs = f * S + s); mass entering the saturated
// layer at time t in base state s becomes an entry variable whose objective
// coefficient is the unconstrained value-to-go there.
struct ReducedLp {
    LinearProgram lp;
    int horizon = 0;
    int base_states = 0;
    int reduced_states = 0;  // M * S
    int num_actions = 0;
    int num_constraints = 0;
    std::vector<int> alarm_states;
    std::vector<int> alarm_pos;     // base state -> index in alarm_states, or -1
    std::vector<int> stage_var;     // [(t*R + rs)*A + a]
    std::vector<int> terminal_var;  // [rs]
    std::vector<int> entry_var;     // [t*|Xa| + ai], t = 0..T

    int row_initial(int rs) const { return rs; }
    int row_flow(int t, int rs) const { return t * reduced_states + rs; }
    int row_terminal(int rs) const { return horizon * reduced_states + rs; }
    int row_entry(int t, int ai) const {
        return (horizon + 1) * reduced_states + t * static_cast<int>(alarm_states.size()) + ai;
    }
    int row_chance(int i) const {
        return (horizon + 1) * (reduced_states + static_cast<int>(alarm_states.size())) + (i - 1);
    }
};

ReducedLp build_reduced_lp(const FiniteMdp& base, const AlarmRegion& alarms,
                           const ConstraintSpec& spec, int max_alarms,
                           const std::vector<std::vector<double>>& unconstrained_value) {
    const int T = base.horizon;
    const int S = base.num_states;
    const int A = base.num_actions;
    const int M = max_alarms;
    const int R = M * S;
    const int K = spec.size();

    ReducedLp r;
    r.horizon = T;
    r.base_states = S;
    r.reduced_states = R;
    r.num_actions = A;
    r.num_constraints = K;
    r.alarm_pos.assign(S, -1);
    for (int s = 0; s < S; ++s) {
        if (alarms.contains(s)) {
            r.alarm_pos[s] = static_cast<int>(r.alarm_states.size());
            r.alarm_states.push_back(s);
        }
    }
    const int nA = static_cast<int>(r.alarm_states.size());

    LinearProgram& lp = r.lp;
    lp.maximize = true;
    {
        const int rows = (T + 1) * (R + nA) + K;
        std::vector<double> rhs(rows, 0.0);
        std::vector<RowSense> sense(rows, RowSense::Equal);
        for (int s = 0; s < S; ++s) {
            if (base.initial[s] == 0.0) continue;
            if (!alarms.contains(s)) {
                rhs[r.row_initial(s)] = base.initial[s];  // layer 0
            } else if (M >= 2) {
                rhs[r.row_initial(S + s)] = base.initial[s];  // layer 1
            } else {
                rhs[r.row_entry(0, r.alarm_pos[s])] = base.initial[s];
            }
        }
        for (int i = 1; i <= K; ++i) {
            rhs[r.row_chance(i)] = spec.delta[i - 1];
            sense[r.row_chance(i)] = RowSense::LessEqual;
        }
        lp.set_rows(std::move(rhs), std::move(sense));
    }

    r.stage_var.assign(static_cast<std::size_t>(T) * R * A, -1);
    r.terminal_var.assign(R, -1);
    r.entry_var.assign(static_cast<std::size_t>(T + 1) * nA, -1);

    std::vector<std::pair<int, double>> entries;
    for (int t = 0; t < T; ++t) {
        for (int f = 0; f < M; ++f) {
            for (int s = 0; s < S; ++s) {
                const int rs = f * S + s;
                for (int a = 0; a < base.action_count(s); ++a) {
                    entries.clear();
                    entries.push_back({t == 0 ? r.row_initial(rs) : r.row_flow(t, rs), 1.0});
                    const TransitionRow& row = base.transition(t, s, a);
                    for (std::size_t k = 0; k < row.size(); ++k) {
                        const int sp = row.next[k];
                        const int fp = flag_step(f, alarms.contains(sp), M);
                        int rr;
                        if (fp == M) {
                            rr = r.row_entry(t + 1, r.alarm_pos[sp]);
                        } else if (t + 1 == T) {
                            rr = r.row_terminal(fp * S + sp);
                        } else {
                            rr = r.row_flow(t + 1, fp * S + sp);
                        }
                        entries.push_back({rr, -row.prob[k]});
                    }
                    r.stage_var[(static_cast<std::size_t>(t) * R + rs) * A + a] =
                        lp.add_column(base.reward(t, s, a), entries);
                }
            }
        }
    }
    for (int rs = 0; rs < R; ++rs) {
        entries.clear();
        entries.push_back({r.row_terminal(rs), 1.0});
        const int f = rs / S;
        for (int i = 1; i <= std::min(f, K); ++i) entries.push_back({r.row_chance(i), 1.0});
        r.terminal_var[rs] = lp.add_column(base.terminal_reward[rs % S], entries);
    }
    for (int t = 0; t <= T; ++t) {
        for (int ai = 0; ai < nA; ++ai) {
            entries.clear();
            entries.push_back({r.row_entry(t, ai), 1.0});
            for (int i = 1; i <= K; ++i) entries.push_back({r.row_chance(i), 1.0});
            r.entry_var[static_cast<std::size_t>(t) * nA + ai] =
                lp.add_column(unconstrained_value[t][r.alarm_states[ai]], entries);
        }
    }
    return r;
}

std::vector<int> reduced_policy_basis(const ReducedLp& r,
                                      const std::vector<std::vector<int>>& base_greedy) {
    std::vector<int> basis(r.lp.num_rows, -1);
    const int S = r.base_states;
    const int A = r.num_actions;
    for (int t = 0; t < r.horizon; ++t)
        for (int rs = 0; rs < r.reduced_states; ++rs)
            basis[t == 0 ? r.row_initial(rs) : r.row_flow(t, rs)] =
                r.stage_var[(static_cast<std::size_t>(t) * r.reduced_states + rs) * A +
                            base_greedy[t][rs % S]];
    for (int rs = 0; rs < r.reduced_states; ++rs)
        basis[r.row_terminal(rs)] = r.terminal_var[rs];
    const int nA = static_cast<int>(r.alarm_states.size());
    for (int t = 0; t <= r.horizon; ++t)
        for (int ai = 0; ai < nA; ++ai)
            basis[r.row_entry(t, ai)] = r.entry_var[static_cast<std::size_t>(t) * nA + ai];
    for (int i = 1; i <= r.num_constraints; ++i)
        basis[r.row_chance(i)] = r.lp.num_cols() + r.row_chance(i);
    return basis;
}

}  // namespace

SolveReport solve_reduced(const FiniteMdp& base, const AlarmRegion& alarms,
                          const ConstraintSpec& spec, int max_alarms,
                          const SolverOptions& options) {
    const auto start = Clock::now();
    base.validate();
    spec.validate(max_alarms);
    if (alarms.num_states() != base.num_states)
        throw std::invalid_argument("solve_reduced: alarm region size mismatch");

    const BackwardInductionResult ubase = backward_induction(base);
    const ReducedLp rlp = build_reduced_lp(base, alarms, spec, max_alarms, ubase.value_function);
    const LpSolution sol =
        run_lp(rlp.lp, reduced_policy_basis(rlp, ubase.greedy_action), options);

    SolveReport report;
    report.status = sol.status;
    report.lp_iterations = sol.iterations;
    if (sol.status != LpStatus::Optimal) {
        report.solve_seconds = seconds_since(start);
        return report;
    }
    report.value = sol.objective;
    report.residuals = check_solution(rlp.lp, sol);

    // Occupation over the reduced layers, completed by the unconstrained
    // greedy action, then the pinned unconstrained rule on layer M.
    OccupancyMeasure occ;
    occ.horizon = rlp.horizon;
    occ.num_states = rlp.reduced_states;
    occ.num_actions = rlp.num_actions;
    occ.stage.assign(occ.horizon,
                     std::vector<double>(static_cast<std::size_t>(occ.num_states) * occ.num_actions, 0.0));
    occ.terminal.assign(occ.num_states, 0.0);
    for (int t = 0; t < occ.horizon; ++t)
        for (int rs = 0; rs < occ.num_states; ++rs)
            for (int a = 0; a < occ.num_actions; ++a) {
                const int var =
                    rlp.stage_var[(static_cast<std::size_t>(t) * occ.num_states + rs) * occ.num_actions + a];
                if (var >= 0)
                    occ.stage[t][static_cast<std::size_t>(rs) * occ.num_actions + a] =
                        std::max(sol.primal[var], 0.0);
            }

    std::vector<std::vector<int>> completion(base.horizon,
                                             std::vector<int>(rlp.reduced_states, 0));
    for (int t = 0; t < base.horizon; ++t)
        for (int rs = 0; rs < rlp.reduced_states; ++rs)
            completion[t][rs] = ubase.greedy_action[t][rs % base.num_states];
    const MarkovPolicy reduced_policy = extract_policy(occ, completion);

    const AugmentedMdp aug = augment(base, alarms, max_alarms);
    MarkovPolicy full = MarkovPolicy::zeros(base.horizon, aug.mdp.num_states, base.num_actions);
    for (int t = 0; t < base.horizon; ++t) {
        for (int rs = 0; rs < rlp.reduced_states; ++rs)
            for (int a = 0; a < base.num_actions; ++a)
                full.set_probability(t, rs, a, reduced_policy.probability(t, rs, a));
        for (int s = 0; s < base.num_states; ++s)
            full.set_probability(t, aug.index(s, max_alarms), ubase.greedy_action[t][s], 1.0);
    }
    report.policy = std::move(full);
    report.alarm_probabilities = exact_alarm_profile(aug, report.policy);
    check_extraction("solve_reduced", aug, spec, report, sol.objective);
    report.solve_seconds = seconds_since(start);
    return report;
}

OracleValue tree_oracle(const FiniteMdp& base, const AlarmRegion& alarms,
                        const ConstraintSpec& spec, int max_alarms, std::size_t node_budget,
                        const SolverOptions& options) {
    spec.validate(max_alarms);
    const HistoryTree tree = enumerate_history_tree(base, node_budget);
    const std::vector<int> flags = node_flags(tree, alarms, max_alarms);
    const int N = static_cast<int>(tree.node_count());
    const int K = spec.size();
    const int A = base.num_actions;

    LinearProgram lp;
    lp.maximize = true;
    {
        std::vector<double> rhs(N + K, 0.0);
        std::vector<RowSense> sense(N + K, RowSense::Equal);
        for (int n = tree.level[0].first; n < tree.level[0].second; ++n)
            rhs[n] = tree.nodes[n].step_prob;
        for (int i = 1; i <= K; ++i) {
            rhs[N + i - 1] = spec.delta[i - 1];
            sense[N + i - 1] = RowSense::LessEqual;
        }
        lp.set_rows(std::move(rhs), std::move(sense));
    }

    // Variables: one per (internal node, valid action), then one per leaf.
    std::vector<int> action_var(static_cast<std::size_t>(N) * A, -1);
    std::vector<int> leaf_var(N, -1);
    std::vector<std::pair<int, double>> entries;
    for (int n = 0; n < N; ++n) {
        const auto& node = tree.nodes[n];
        if (node.time == base.horizon) continue;
        for (int a = 0; a < base.action_count(node.state); ++a) {
            entries.clear();
            entries.push_back({n, 1.0});
            for (const int c : tree.children[n])
                if (tree.nodes[c].action == a)
                    entries.push_back({c, -tree.nodes[c].step_prob});
            action_var[static_cast<std::size_t>(n) * A + a] =
                lp.add_column(base.reward(node.time, node.state, a), entries);
        }
    }
    for (int n = tree.level[base.horizon].first; n < tree.level[base.horizon].second; ++n) {
        entries.clear();
        entries.push_back({n, 1.0});
        for (int i = 1; i <= std::min(flags[n], K); ++i) entries.push_back({N + i - 1, 1.0});
        leaf_var[n] = lp.add_column(base.terminal_reward[tree.nodes[n].state], entries);
    }

    // Warm start from backward induction on the tree.
    std::vector<int> basis(lp.num_rows, -1);
    {
        std::vector<double> value(N, 0.0);
        for (int t = base.horizon; t >= 0; --t) {
            for (int n = tree.level[t].first; n < tree.level[t].second; ++n) {
                const auto& node = tree.nodes[n];
                if (t == base.horizon) {
                    value[n] = base.terminal_reward[node.state];
                    basis[n] = leaf_var[n];
                    continue;
                }
                double best = 0.0;
                int best_action = -1;
                for (int a = 0; a < base.action_count(node.state); ++a) {
                    double q = base.reward(t, node.state, a);
                    for (const int c : tree.children[n])
                        if (tree.nodes[c].action == a) q += tree.nodes[c].step_prob * value[c];
                    if (best_action < 0 || q > best) {
                        best = q;
                        best_action = a;
                    }
                }
                value[n] = best;
                basis[n] = action_var[static_cast<std::size_t>(n) * A + best_action];
            }
        }
        for (int i = 1; i <= K; ++i) basis[N + i - 1] = lp.num_cols() + N + i - 1;
    }

    const LpSolution sol = run_lp(lp, basis, options);
    return {sol.status, sol.status == LpStatus::Optimal ? sol.objective : 0.0};
}

namespace {

bool alarm_region_absorbing(const FiniteMdp& base, const AlarmRegion& alarms) {
    for (std::size_t k = 0; k < base.kernel.size(); ++k)
        for (int s = 0; s < base.num_states; ++s) {
            if (!alarms.contains(s)) continue;
            for (int a = 0; a < base.action_count(s); ++a) {
                const TransitionRow& row = base.kernel[k][static_cast<std::size_t>(s) * base.num_actions + a];
                for (std::size_t i = 0; i < row.size(); ++i)
                    if (row.prob[i] > 0.0 && !alarms.contains(row.next[i])) return false;
            }
        }
    return true;
}

// Occupation LP on the base chain with the single terminal-mass constraint;
// exact for Markov policies when the alarm region is absorbing.
MarkovOracleResult absorbing_markov_lp(const FiniteMdp& base, const AlarmRegion& alarms,
                                       double delta, const BackwardInductionResult& ubase) {
    const int T = base.horizon;
    const int S = base.num_states;
    const int A = base.num_actions;

    LinearProgram lp;
    lp.maximize = true;
    {
        std::vector<double> rhs((T + 1) * S + 1, 0.0);
        std::vector<RowSense> sense((T + 1) * S + 1, RowSense::Equal);
        for (int s = 0; s < S; ++s) rhs[s] = base.initial[s];
        rhs.back() = delta;
        sense.back() = RowSense::LessEqual;
        lp.set_rows(std::move(rhs), std::move(sense));
    }
    std::vector<int> stage_var(static_cast<std::size_t>(T) * S * A, -1);
    std::vector<std::pair<int, double>> entries;
    for (int t = 0; t < T; ++t)
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < base.action_count(s); ++a) {
                entries.clear();
                entries.push_back({t * S + s, 1.0});
                const TransitionRow& row = base.transition(t, s, a);
                for (std::size_t k = 0; k < row.size(); ++k)
                    entries.push_back({(t + 1) * S + row.next[k], -row.prob[k]});
                stage_var[(static_cast<std::size_t>(t) * S + s) * A + a] =
                    lp.add_column(base.reward(t, s, a), entries);
            }
    std::vector<int> terminal_var(S);
    for (int s = 0; s < S; ++s) {
        entries.clear();
        entries.push_back({T * S + s, 1.0});
        if (alarms.contains(s)) entries.push_back({(T + 1) * S, 1.0});
        terminal_var[s] = lp.add_column(base.terminal_reward[s], entries);
    }

    std::vector<int> basis(lp.num_rows, -1);
    for (int t = 0; t < T; ++t)
        for (int s = 0; s < S; ++s)
            basis[t * S + s] =
                stage_var[(static_cast<std::size_t>(t) * S + s) * A + ubase.greedy_action[t][s]];
    for (int s = 0; s < S; ++s) basis[T * S + s] = terminal_var[s];
    basis[(T + 1) * S] = lp.num_cols() + (T + 1) * S;

    const LpSolution sol = run_lp(lp, basis, SolverOptions{});
    MarkovOracleResult res;
    res.status = sol.status;
    if (sol.status != LpStatus::Optimal) return res;
    res.value = sol.objective;

    OccupancyMeasure occ;
    occ.horizon = T;
    occ.num_states = S;
    occ.num_actions = A;
    occ.stage.assign(T, std::vector<double>(static_cast<std::size_t>(S) * A, 0.0));
    occ.terminal.assign(S, 0.0);
    for (int t = 0; t < T; ++t)
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a) {
                const int var = stage_var[(static_cast<std::size_t>(t) * S + s) * A + a];
                if (var >= 0)
                    occ.stage[t][static_cast<std::size_t>(s) * A + a] =
                        std::max(sol.primal[var], 0.0);
            }
    for (int s = 0; s < S; ++s) occ.terminal[s] = std::max(sol.primal[terminal_var[s]], 0.0);
    res.policy = extract_policy(occ, ubase.greedy_action);
    return res;
}

// Maximal no-alarm probability over all policies (taboo dynamic program)
// together with its greedy Markov policy.
std::pair<MarkovPolicy, double> taboo_max_policy(const FiniteMdp& base,
                                                 const AlarmRegion& alarms) {
    const int T = base.horizon;
    const int S = base.num_states;
    std::vector<std::vector<double>> survive(T + 1, std::vector<double>(S, 0.0));
    std::vector<std::vector<int>> greedy(T, std::vector<int>(S, 0));
    for (int s = 0; s < S; ++s) survive[T][s] = alarms.contains(s) ? 0.0 : 1.0;
    for (int t = T - 1; t >= 0; --t) {
        for (int s = 0; s < S; ++s) {
            if (alarms.contains(s)) {
                // dead branch: the continuation choice does not matter for
                // survival, keep the lowest action
                survive[t][s] = 0.0;
                continue;
            }
            double best = -1.0;
            for (int a = 0; a < base.action_count(s); ++a) {
                double q = 0.0;
                const TransitionRow& row = base.transition(t, s, a);
                for (std::size_t k = 0; k < row.size(); ++k)
                    q += row.prob[k] * survive[t + 1][row.next[k]];
                if (q > best) {
                    best = q;
                    greedy[t][s] = a;
                }
            }
            survive[t][s] = best;
        }
    }
    double p_never = 0.0;
    for (int s = 0; s < S; ++s) p_never += base.initial[s] * survive[0][s];
    return {MarkovPolicy::deterministic(T, S, base.num_actions, greedy), p_never};
}

struct CoordinateContext {
    const FiniteMdp& base;
    const AlarmRegion& alarms;
    double delta;
};

double alarm_probability(const CoordinateContext& ctx, const MarkovPolicy& policy) {
    return alarm_event_probability(ctx.base, ctx.alarms, policy, 1);
}

// One pass of exact per-coordinate improvement: with every other rule held
// fixed, both the value and the alarm probability are linear in the rule at
// (t, s), so the best rule is a tiny LP. Returns true when some coordinate
// strictly improved.
bool coordinate_sweep(const CoordinateContext& ctx, MarkovPolicy& policy,
                      const std::vector<std::vector<char>>& reachable,
                      const LpOptions& lp_options) {
    const FiniteMdp& base = ctx.base;
    const int T = base.horizon;
    const int S = base.num_states;
    bool improved = false;

    for (int t = 0; t < T; ++t) {
        for (int s = 0; s < S; ++s) {
            if (!reachable[t][s] || base.action_count(s) < 2) continue;

            const StateMarginals marg = forward_marginals(base, policy);
            const auto value = policy_value_function(base, policy);
            const double reach = marg.state[t][s];

            // Taboo quantities under the current policy: forward no-alarm
            // mass and backward no-alarm continuation.
            std::vector<std::vector<double>> survive(T + 1, std::vector<double>(S, 0.0));
            for (int ss = 0; ss < S; ++ss)
                survive[T][ss] = ctx.alarms.contains(ss) ? 0.0 : 1.0;
            for (int tt = T - 1; tt >= 0; --tt)
                for (int ss = 0; ss < S; ++ss) {
                    if (ctx.alarms.contains(ss)) continue;
                    double q = 0.0;
                    for (int a = 0; a < base.action_count(ss); ++a) {
                        const double pa = policy.probability(tt, ss, a);
                        if (pa == 0.0) continue;
                        const TransitionRow& row = base.transition(tt, ss, a);
                        double qa = 0.0;
                        for (std::size_t k = 0; k < row.size(); ++k)
                            qa += row.prob[k] * survive[tt + 1][row.next[k]];
                        q += pa * qa;
                    }
                    survive[tt][ss] = q;
                }
            std::vector<double> taboo(S, 0.0);
            for (int ss = 0; ss < S; ++ss)
                if (!ctx.alarms.contains(ss)) taboo[ss] = base.initial[ss];
            for (int tt = 0; tt < t; ++tt) {
                std::vector<double> next(S, 0.0);
                for (int ss = 0; ss < S; ++ss) {
                    if (taboo[ss] == 0.0) continue;
                    for (int a = 0; a < base.action_count(ss); ++a) {
                        const double mass = taboo[ss] * policy.probability(tt, ss, a);
                        if (mass == 0.0) continue;
                        const TransitionRow& row = base.transition(tt, ss, a);
                        for (std::size_t k = 0; k < row.size(); ++k)
                            if (!ctx.alarms.contains(row.next[k]))
                                next[row.next[k]] += mass * row.prob[k];
                    }
                }
                taboo = std::move(next);
            }

            const int na = base.action_count(s);
            std::vector<double> value_coeff(na, 0.0), alarm_coeff(na, 0.0);
            for (int a = 0; a < na; ++a) {
                double q = base.reward(t, s, a);
                double u = 0.0;
                const TransitionRow& row = base.transition(t, s, a);
                for (std::size_t k = 0; k < row.size(); ++k) {
                    q += row.prob[k] * value[t + 1][row.next[k]];
                    if (!ctx.alarms.contains(row.next[k]))
                        u += row.prob[k] * survive[t + 1][row.next[k]];
                }
                value_coeff[a] = reach * q;
                // alarm prob = const - taboo_mass * survive-through-(s,a)
                alarm_coeff[a] = -(ctx.alarms.contains(s) ? 0.0 : taboo[s]) * u;
            }

            double cur_value = 0.0, cur_alarm_part = 0.0;
            for (int a = 0; a < na; ++a) {
                cur_value += value_coeff[a] * policy.probability(t, s, a);
                cur_alarm_part += alarm_coeff[a] * policy.probability(t, s, a);
            }
            const double alarm_const = alarm_probability(ctx, policy) - cur_alarm_part;

            LinearProgram clp;
            clp.maximize = true;
            clp.set_rows({ctx.delta - alarm_const, 1.0}, {RowSense::LessEqual, RowSense::Equal});
            for (int a = 0; a < na; ++a)
                clp.add_column(value_coeff[a], {{0, alarm_coeff[a]}, {1, 1.0}});
            const LpSolution csol = solve_lp(clp, lp_options);
            if (csol.status != LpStatus::Optimal) continue;
            if (csol.objective <= cur_value + 1e-12 * (1.0 + std::abs(cur_value))) continue;

            for (int a = 0; a < na; ++a) policy.set_probability(t, s, a, csol.primal[a]);
            for (int a = na; a < base.num_actions; ++a) policy.set_probability(t, s, a, 0.0);
            improved = true;
        }
    }
    return improved;
}

}  // namespace

MarkovOracleResult markov_restricted_oracle(const FiniteMdp& base, const AlarmRegion& alarms,
                                            double delta, const MarkovOracleOptions& options) {
    base.validate();
    if (!(delta >= 0.0 && delta <= 1.0))
        throw std::invalid_argument("markov_restricted_oracle: delta outside [0, 1]");
    if (alarms.num_states() != base.num_states)
        throw std::invalid_argument("markov_restricted_oracle: alarm region size mismatch");

    const BackwardInductionResult ubase = backward_induction(base);
    if (delta >= 1.0 || alarms.empty())
        return {LpStatus::Optimal, ubase.value, ubase.policy};

    if (alarm_region_absorbing(base, alarms))
        return absorbing_markov_lp(base, alarms, delta, ubase);

    const CoordinateContext ctx{base, alarms, delta};

    // Least achievable alarm probability over any policy; decides feasibility.
    auto [taboo_policy, p_never] = taboo_max_policy(base, alarms);
    if (1.0 - p_never > delta + 1e-12) return {LpStatus::Infeasible, 0.0, {}};

    // Potential reachability (under some policy), for coordinate selection.
    std::vector<std::vector<char>> reachable(base.horizon, std::vector<char>(base.num_states, 0));
    {
        std::vector<char> cur(base.num_states, 0);
        for (int s = 0; s < base.num_states; ++s) cur[s] = base.initial[s] > 0.0 ? 1 : 0;
        for (int t = 0; t < base.horizon; ++t) {
            reachable[t] = cur;
            std::vector<char> next(base.num_states, 0);
            for (int s = 0; s < base.num_states; ++s) {
                if (!cur[s]) continue;
                for (int a = 0; a < base.action_count(s); ++a) {
                    const TransitionRow& row = base.transition(t, s, a);
                    for (std::size_t k = 0; k < row.size(); ++k)
                        if (row.prob[k] > 0.0) next[row.next[k]] = 1;
                }
            }
            cur = std::move(next);
        }
    }

    std::vector<MarkovPolicy> seeds;
    seeds.push_back(taboo_policy);
    if (alarm_probability(ctx, ubase.policy) <= delta + 1e-12) seeds.push_back(ubase.policy);

    // Dense grid multistart over binary coordinates, when small enough.
    {
        std::vector<std::pair<int, int>> coords;
        bool all_binary = true;
        for (int t = 0; t < base.horizon; ++t)
            for (int s = 0; s < base.num_states; ++s)
                if (reachable[t][s] && base.action_count(s) >= 2) {
                    coords.push_back({t, s});
                    if (base.action_count(s) != 2) all_binary = false;
                }
        if (all_binary && !coords.empty() &&
            static_cast<int>(coords.size()) <= options.max_grid_parameters) {
            const int res = options.grid_resolution;
            MarkovPolicy point = taboo_policy;
            double best_value = -std::numeric_limits<double>::infinity();
            MarkovPolicy best_point;
            std::vector<int> idx(coords.size(), 0);
            for (;;) {
                for (std::size_t c = 0; c < coords.size(); ++c) {
                    const double gamma = static_cast<double>(idx[c]) / res;
                    point.set_probability(coords[c].first, coords[c].second, 0, 1.0 - gamma);
                    point.set_probability(coords[c].first, coords[c].second, 1, gamma);
                }
                if (alarm_probability(ctx, point) <= delta + 1e-12) {
                    const double v = evaluate_policy(base, point);
                    if (v > best_value) {
                        best_value = v;
                        best_point = point;
                    }
                }
                std::size_t c = 0;
                while (c < coords.size() && ++idx[c] > res) idx[c++] = 0;
                if (c == coords.size()) break;
            }
            if (best_point.horizon > 0) seeds.push_back(best_point);
        }
    }

    LpOptions coordinate_lp;
    MarkovOracleResult best{LpStatus::Optimal, -std::numeric_limits<double>::infinity(), {}};
    for (const MarkovPolicy& seed : seeds) {
        MarkovPolicy cur = seed;
        for (int sweep = 0; sweep < options.max_sweeps; ++sweep)
            if (!coordinate_sweep(ctx, cur, reachable, coordinate_lp)) break;
        const double value = evaluate_policy(base, cur);
        if (value > best.value && alarm_probability(ctx, cur) <= delta + 1e-9) {
            best.value = value;
            best.policy = cur;
        }
    }
    return best;
}

}  // namespace attackimpact
