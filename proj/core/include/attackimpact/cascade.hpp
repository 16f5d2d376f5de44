#pragma once

#include <utility>
#include <vector>

#include "attackimpact/augment.hpp"
#include "attackimpact/mdp.hpp"

namespace attackimpact {

// Scalar integrator plant in cascade with a CUSUM detector:
//   z_{t+1}  = z_t + a_t + w_t,                   w_t ~ N(0, sigma^2)
//   zd_{t+1} = max(0, zd_t + |z_{t+1}| - bias)
// with an alarm whenever zd >= threshold. Initial conditions are
// z_0 = zd_0 = 0. The adversary tracks z_ref; the stage payoff is
// -(z - z_ref)^2.
struct CascadeModel {
    double sigma = 0.1;
    double bias = 0.8;        // CUSUM drift correction
    double threshold = 2.0;   // alarm level
    double z_ref = 1.5;
    double action_min = -1.0;
    double action_max = 1.0;

    void validate() const;
};

// Uniform node counts for the product grid. Plant nodes span [z_lo, z_hi],
// detector nodes span [0, zd_hi], action nodes span the model's range.
struct Grid {
    int num_z = 17;
    double z_lo = -0.5;
    double z_hi = 2.5;
    int num_zd = 11;
    double zd_hi = 2.2;
    int num_actions = 9;

    void validate(const CascadeModel& model) const;
};

// Finite-MDP snapshot of the cascade on a grid. States are (z node,
// zd node) pairs indexed zi * num_zd + dj; the alarm region is exactly the
// set of cells whose zd node is at or above the detector threshold.
struct DiscretizedModel {
    FiniteMdp mdp;
    AlarmRegion alarms;
    std::vector<double> z_nodes;
    std::vector<double> zd_nodes;
    std::vector<double> action_nodes;

    int num_z() const { return static_cast<int>(z_nodes.size()); }
    int num_zd() const { return static_cast<int>(zd_nodes.size()); }
    int state_index(int zi, int dj) const { return zi * num_zd() + dj; }

    int nearest_z(double z) const;
    int nearest_zd(double zd) const;
    // Nearest cell under per-axis distance scaled by cell width; on the
    // uniform product grid this separates, with ties to the lower index.
    int nearest_cell(double z, double zd) const;
};

// max(0, zd + |z| - bias); the detector statistic recursion.
double cusum_step(double zd, double z, double bias);

// z + a + w; the integrator recursion.
double plant_step(double z, double a, double w);

// Mass of N(mean, sigma^2) on [lower, upper]; +-infinity bounds allowed.
double gaussian_cell_mass(double mean, double sigma, double lower, double upper);

// Builds the finite MDP: plant mass is spread over the Voronoi intervals
// of the z nodes around mean z + a (edge cells absorb the tails), the
// detector update is deterministic per successor z node and snapped to the
// nearest zd node (clamped at zd_hi).
DiscretizedModel discretize(const CascadeModel& model, const Grid& grid, int horizon);

// One exact step of the continuous cascade. The detector consumes the
// updated plant state, so alarm membership of the successor matches the
// discrete alarm test. Throws when the action is outside the admissible
// range.
std::pair<double, double> rollout_step(const CascadeModel& model, double z, double zd,
                                       double action, double noise);

}  // namespace attackimpact
