#pragma once

// Test-only oracles, independent of the solver implementation: exhaustive
// finite-horizon policy-tree evaluation by direct recursion over Bayes
// posteriors.

#include <limits>
#include <vector>

#include "mope/enumerated_pomdp.hpp"

namespace mope::testing {

// V_0 = 0; V_h(b) = max_a [ sum_s b(s) R(s,a) + gamma * sum_o p(o|b,a) V_{h-1}(b_o^a) ].
inline double policy_tree_value(const EnumeratedPomdp& p, const std::vector<double>& b, int horizon) {
    if (horizon == 0) return 0.0;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> post;
    for (int a = 0; a < p.num_actions(); ++a) {
        double q = 0.0;
        for (int s = 0; s < p.num_states(); ++s)
            if (b[s] != 0.0) q += b[s] * p.reward(s, a);
        const int n_obs = static_cast<int>(p.observations(a).size());
        for (int k = 0; k < n_obs; ++k) {
            const double po = p.posterior(b, a, k, post);
            if (po > 0.0) q += p.discount() * po * policy_tree_value(p, post, horizon - 1);
        }
        if (q > best) best = q;
    }
    return best;
}

}  // namespace mope::testing
