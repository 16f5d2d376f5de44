#include "attackimpact/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace attackimpact {

void ConstraintSpec::validate(int max_alarms) const {
    if (delta.empty()) throw std::invalid_argument("ConstraintSpec: empty delta list");
    if (size() > max_alarms)
        throw std::invalid_argument("ConstraintSpec: more constraints than counted alarms");
    for (double d : delta)
        if (!(d >= 0.0 && d <= 1.0))
            throw std::invalid_argument("ConstraintSpec: delta outside [0, 1]");
}

double OccupancyMeasure::stage_mass(int t) const {
    double total = 0.0;
    for (double v : stage[t]) total += v;
    return total;
}

double OccupancyMeasure::terminal_mass() const {
    double total = 0.0;
    for (double v : terminal) total += v;
    return total;
}

double OccupancyMeasure::max_flow_residual(const FiniteMdp& mdp) const {
    std::vector<double> inflow(num_states, 0.0);
    double worst = 0.0;
    for (int t = 0; t <= horizon; ++t) {
        if (t == 0) {
            inflow = mdp.initial;
        } else {
            std::fill(inflow.begin(), inflow.end(), 0.0);
            for (int s = 0; s < num_states; ++s) {
                for (int a = 0; a < mdp.action_count(s); ++a) {
                    const double mass = stage[t - 1][static_cast<std::size_t>(s) * num_actions + a];
                    if (mass == 0.0) continue;
                    const TransitionRow& row = mdp.transition(t - 1, s, a);
                    for (std::size_t k = 0; k < row.size(); ++k)
                        inflow[row.next[k]] += mass * row.prob[k];
                }
            }
        }
        for (int s = 0; s < num_states; ++s) {
            double outflow = 0.0;
            if (t < horizon) {
                for (int a = 0; a < num_actions; ++a)
                    outflow += stage[t][static_cast<std::size_t>(s) * num_actions + a];
            } else {
                outflow = terminal[s];
            }
            worst = std::max(worst, std::abs(outflow - inflow[s]));
        }
    }
    return worst;
}

OccupancyLp build_occupancy_lp(const AugmentedMdp& aug, const ConstraintSpec& spec,
                               std::size_t variable_budget) {
    spec.validate(aug.max_alarms);
    const FiniteMdp& mdp = aug.mdp;
    const int T = mdp.horizon;
    const int S = mdp.num_states;
    const int A = mdp.num_actions;
    const int K = spec.size();

    const std::size_t var_estimate =
        static_cast<std::size_t>(T) * S * A + static_cast<std::size_t>(S);
    if (var_estimate > variable_budget)
        throw std::length_error("build_occupancy_lp: variable budget exceeded");

    OccupancyLp olp;
    olp.horizon = T;
    olp.num_states = S;
    olp.num_actions = A;
    olp.num_constraints = K;
    olp.stage_var.assign(static_cast<std::size_t>(T) * S * A, -1);
    olp.terminal_var.assign(S, -1);

    LinearProgram& lp = olp.lp;
    lp.maximize = true;
    {
        const int rows = (T + 1) * S + K;
        std::vector<double> rhs(rows, 0.0);
        std::vector<RowSense> sense(rows, RowSense::Equal);
        for (int s = 0; s < S; ++s) rhs[s] = mdp.initial[s];
        for (int i = 1; i <= K; ++i) {
            rhs[olp.row_chance(i)] = spec.delta[i - 1];
            sense[olp.row_chance(i)] = RowSense::LessEqual;
        }
        lp.set_rows(std::move(rhs), std::move(sense));
    }

    std::vector<std::pair<int, double>> entries;
    for (int t = 0; t < T; ++t) {
        for (int s = 0; s < S; ++s) {
            for (int a = 0; a < mdp.action_count(s); ++a) {
                entries.clear();
                entries.push_back({t == 0 ? olp.row_initial(s) : olp.row_flow(t, s), 1.0});
                const TransitionRow& row = mdp.transition(t, s, a);
                for (std::size_t k = 0; k < row.size(); ++k) {
                    const int rr = t + 1 == T ? olp.row_terminal(row.next[k])
                                              : olp.row_flow(t + 1, row.next[k]);
                    entries.push_back({rr, -row.prob[k]});
                }
                olp.stage_var[(static_cast<std::size_t>(t) * S + s) * A + a] =
                    lp.add_column(mdp.reward(t, s, a), entries);
            }
        }
    }
    for (int s = 0; s < S; ++s) {
        entries.clear();
        entries.push_back({olp.row_terminal(s), 1.0});
        const int flag = aug.flag_of(s);
        for (int i = 1; i <= std::min(flag, K); ++i)
            entries.push_back({olp.row_chance(i), 1.0});
        olp.terminal_var[s] = lp.add_column(mdp.terminal_reward[s], entries);
    }
    return olp;
}

std::vector<int> unconstrained_policy_basis(const OccupancyLp& olp,
                                            const std::vector<std::vector<int>>& greedy_action) {
    std::vector<int> basis(olp.lp.num_rows, -1);
    for (int t = 0; t < olp.horizon; ++t)
        for (int s = 0; s < olp.num_states; ++s)
            basis[t == 0 ? olp.row_initial(s) : olp.row_flow(t, s)] =
                olp.var_stage(t, s, greedy_action[t][s]);
    for (int s = 0; s < olp.num_states; ++s) basis[olp.row_terminal(s)] = olp.var_terminal(s);
    for (int i = 1; i <= olp.num_constraints; ++i)
        basis[olp.row_chance(i)] = olp.lp.num_cols() + olp.row_chance(i);  // slack
    return basis;
}

OccupancyMeasure occupancy_from_solution(const OccupancyLp& olp, const LpSolution& solution) {
    OccupancyMeasure occ;
    occ.horizon = olp.horizon;
    occ.num_states = olp.num_states;
    occ.num_actions = olp.num_actions;
    occ.stage.assign(olp.horizon,
                     std::vector<double>(static_cast<std::size_t>(olp.num_states) * olp.num_actions, 0.0));
    occ.terminal.assign(olp.num_states, 0.0);
    for (int t = 0; t < olp.horizon; ++t)
        for (int s = 0; s < olp.num_states; ++s)
            for (int a = 0; a < olp.num_actions; ++a) {
                const int var = olp.var_stage(t, s, a);
                if (var >= 0)
                    occ.stage[t][static_cast<std::size_t>(s) * olp.num_actions + a] =
                        std::max(solution.primal[var], 0.0);
            }
    for (int s = 0; s < olp.num_states; ++s)
        occ.terminal[s] = std::max(solution.primal[olp.var_terminal(s)], 0.0);
    return occ;
}

MarkovPolicy extract_policy(const OccupancyMeasure& occ,
                            const std::vector<std::vector<int>>& completion_action) {
    MarkovPolicy policy = MarkovPolicy::zeros(occ.horizon, occ.num_states, occ.num_actions);
    for (int t = 0; t < occ.horizon; ++t) {
        for (int s = 0; s < occ.num_states; ++s) {
            double mass = 0.0;
            for (int a = 0; a < occ.num_actions; ++a)
                mass += occ.stage[t][static_cast<std::size_t>(s) * occ.num_actions + a];
            if (mass > 1e-12) {
                for (int a = 0; a < occ.num_actions; ++a)
                    policy.set_probability(
                        t, s, a,
                        occ.stage[t][static_cast<std::size_t>(s) * occ.num_actions + a] / mass);
            } else {
                policy.set_probability(t, s, completion_action[t][s], 1.0);
            }
        }
    }
    return policy;
}

}  // namespace attackimpact
