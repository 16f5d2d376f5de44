#pragma once

#include <vector>

namespace attackimpact {

// Reference-tracking feedback a_t = -gain[t] * (z - z_ref) for the scalar
// integrator z' = z + a + w under cost sum q (z_t - z_ref)^2 + r a_t^2
// (terminal weight q). With r = 0 the gain is 1 at every step (dead-beat).
struct LqrPolicy {
    std::vector<double> gain;  // one entry per decision step
    double z_ref = 0.0;

    double action(int t, double z) const { return -gain[t] * (z - z_ref); }
};

// Scalar Riccati backward recursion; requires q > 0 or r > 0.
LqrPolicy lqr_policy(double q_weight, double r_weight, double z_ref, int horizon);

}  // namespace attackimpact
