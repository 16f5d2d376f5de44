#include "attackimpact/cascade.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace attackimpact {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Nearest index on the uniform grid lo + k * spacing, ties to the lower
// index, clamped to [0, count-1].
int nearest_uniform(double x, double lo, double spacing, int count) {
    const double u = (x - lo) / spacing;
    int k = static_cast<int>(std::ceil(u - 0.5));
    if (k < 0) k = 0;
    if (k > count - 1) k = count - 1;
    return k;
}

}  // namespace

void CascadeModel::validate() const {
    if (!(sigma > 0.0)) throw std::invalid_argument("CascadeModel: sigma must be > 0");
    if (!(bias > 0.0)) throw std::invalid_argument("CascadeModel: bias must be > 0");
    if (!(threshold > 0.0)) throw std::invalid_argument("CascadeModel: threshold must be > 0");
    if (!(action_min < action_max))
        throw std::invalid_argument("CascadeModel: empty action range");
}

void Grid::validate(const CascadeModel& model) const {
    model.validate();
    if (num_z < 2 || num_zd < 2 || num_actions < 2)
        throw std::invalid_argument("Grid: node counts must be >= 2");
    if (!(z_lo < z_hi)) throw std::invalid_argument("Grid: z range is empty");
    if (!(zd_hi >= model.threshold))
        throw std::invalid_argument("Grid: zd_hi must reach the alarm threshold");
}

int DiscretizedModel::nearest_z(double z) const {
    const double spacing = (z_nodes.back() - z_nodes.front()) / (num_z() - 1);
    return nearest_uniform(z, z_nodes.front(), spacing, num_z());
}

int DiscretizedModel::nearest_zd(double zd) const {
    const double spacing = (zd_nodes.back() - zd_nodes.front()) / (num_zd() - 1);
    return nearest_uniform(zd, zd_nodes.front(), spacing, num_zd());
}

int DiscretizedModel::nearest_cell(double z, double zd) const {
    return state_index(nearest_z(z), nearest_zd(zd));
}

double cusum_step(double zd, double z, double bias) {
    return std::max(0.0, zd + std::abs(z) - bias);
}

double plant_step(double z, double a, double w) { return z + a + w; }

double gaussian_cell_mass(double mean, double sigma, double lower, double upper) {
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_cell_mass: sigma must be > 0");
    if (!(lower < upper)) throw std::invalid_argument("gaussian_cell_mass: empty interval");
    if (lower == -kInf && upper == kInf) return 1.0;

    const double inv = 1.0 / (sigma * std::sqrt(2.0));
    const double xl = (lower - mean) * inv;  // lower bound in erfc units
    const double xu = (upper - mean) * inv;
    // Two algebraically equal forms; pick the one whose erfc arguments lie
    // in the decaying tail so the subtraction does not cancel.
    if (xl + xu >= 0.0) return 0.5 * (std::erfc(xl) - std::erfc(xu));
    return 0.5 * (std::erfc(-xu) - std::erfc(-xl));
}

DiscretizedModel discretize(const CascadeModel& model, const Grid& grid, int horizon) {
    grid.validate(model);
    if (horizon < 1) throw std::invalid_argument("discretize: horizon must be >= 1");

    DiscretizedModel out;
    const int nz = grid.num_z;
    const int nd = grid.num_zd;
    const int na = grid.num_actions;
    const double dz = (grid.z_hi - grid.z_lo) / (nz - 1);
    const double dzd = grid.zd_hi / (nd - 1);
    const double da = (model.action_max - model.action_min) / (na - 1);

    out.z_nodes.resize(nz);
    for (int i = 0; i < nz; ++i) out.z_nodes[i] = grid.z_lo + i * dz;
    out.zd_nodes.resize(nd);
    for (int j = 0; j < nd; ++j) out.zd_nodes[j] = j * dzd;
    out.action_nodes.resize(na);
    for (int k = 0; k < na; ++k) out.action_nodes[k] = model.action_min + k * da;

    const int S = nz * nd;
    out.mdp = FiniteMdp::time_invariant(horizon, S, na);
    FiniteMdp& mdp = out.mdp;

    out.alarms = AlarmRegion::none(S);
    for (int i = 0; i < nz; ++i)
        for (int j = 0; j < nd; ++j)
            if (out.zd_nodes[j] >= model.threshold) out.alarms.mask[out.state_index(i, j)] = 1;

    mdp.initial.assign(S, 0.0);
    mdp.initial[out.nearest_cell(0.0, 0.0)] = 1.0;

    // Voronoi boundaries of the z nodes; edge cells absorb the tails.
    std::vector<double> z_cut(nz + 1);
    z_cut[0] = -kInf;
    z_cut[nz] = kInf;
    for (int i = 1; i < nz; ++i) z_cut[i] = 0.5 * (out.z_nodes[i - 1] + out.z_nodes[i]);

    for (int i = 0; i < nz; ++i) {
        const double track = out.z_nodes[i] - model.z_ref;
        for (int j = 0; j < nd; ++j) {
            const int s = out.state_index(i, j);
            mdp.terminal_reward[s] = -track * track;
            for (int k = 0; k < na; ++k) {
                mdp.stage_reward[0][static_cast<std::size_t>(s) * na + k] = -track * track;
                const double mean = out.z_nodes[i] + out.action_nodes[k];
                TransitionRow& row = mdp.kernel[0][static_cast<std::size_t>(s) * na + k];
                for (int m = 0; m < nz; ++m) {
                    const double mass =
                        gaussian_cell_mass(mean, model.sigma, z_cut[m], z_cut[m + 1]);
                    if (mass == 0.0) continue;
                    const double zd_next =
                        std::min(cusum_step(out.zd_nodes[j], out.z_nodes[m], model.bias),
                                 grid.zd_hi);
                    row.add(out.state_index(m, out.nearest_zd(zd_next)), mass);
                }
            }
        }
    }

    mdp.validate();
    return out;
}

std::pair<double, double> rollout_step(const CascadeModel& model, double z, double zd,
                                       double action, double noise) {
    if (action < model.action_min - 1e-9 || action > model.action_max + 1e-9)
        throw std::invalid_argument("rollout_step: action out of range");
    const double z_next = plant_step(z, action, noise);
    const double zd_next = cusum_step(zd, z_next, model.bias);
    return {z_next, zd_next};
}

}  // namespace attackimpact
