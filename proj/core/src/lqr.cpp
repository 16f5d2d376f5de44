#include "attackimpact/lqr.hpp"

#include <stdexcept>

namespace attackimpact {

LqrPolicy lqr_policy(double q_weight, double r_weight, double z_ref, int horizon) {
    if (q_weight < 0.0 || r_weight < 0.0)
        throw std::invalid_argument("lqr_policy: negative weight");
    if (q_weight == 0.0 && r_weight == 0.0)
        throw std::invalid_argument("lqr_policy: both weights zero");
    if (horizon < 1) throw std::invalid_argument("lqr_policy: horizon must be >= 1");

    LqrPolicy policy;
    policy.z_ref = z_ref;
    policy.gain.assign(horizon, 0.0);
    // Error dynamics e' = e + a + w; cost-to-go P_t e^2 + const.
    double p_next = q_weight;
    for (int t = horizon - 1; t >= 0; --t) {
        const double k = p_next / (r_weight + p_next);
        policy.gain[t] = k;
        p_next = q_weight + r_weight * p_next / (r_weight + p_next);
    }
    return policy;
}

}  // namespace attackimpact
