#pragma once

#include <span>
#include <vector>

#include "mope/market_model.hpp"

namespace mope {

// Default guard on flat enumeration size (5 * 2^10 global states at W=10
// still fit).
constexpr int kDefaultStateCap = 1 << 13;

// Flat-enumerated view of a MarketModel: dense successor/reward tables plus
// per-action observation tables. Transitions are deterministic in this
// domain, so T is stored as one successor index per (s, a); terminal states
// are absorbing with zero reward.
class EnumeratedPomdp {
  public:
    explicit EnumeratedPomdp(MarketModel model, int state_cap = kDefaultStateCap);

    const MarketModel& model() const { return model_; }
    int num_states() const { return n_states_; }
    int num_active_states() const { return n_active_; }
    int num_actions() const { return n_actions_; }
    double discount() const { return model_.discount(); }

    int successor(int s, int a) const { return succ_[static_cast<size_t>(s) * n_actions_ + a]; }
    double reward(int s, int a) const { return rew_[static_cast<size_t>(s) * n_actions_ + a]; }
    bool terminal(int s) const { return s >= n_active_; }

    // Legal observation symbols for action a (size 1 or 2).
    const std::vector<Obs>& observations(int a) const { return obs_syms_[a]; }
    // P(o | a, s') where o is observations(a)[k].
    double obs_prob(int a, int next_state, int k) const {
        const double p = obs_head_[static_cast<size_t>(a) * n_states_ + next_state];
        return k == 0 ? p : 1.0 - p;
    }
    double obs_prob(int a, int next_state, Obs o) const;

    // Uniform distribution over active states.
    std::vector<double> uniform_belief() const;

    // Bayes posterior for (a, o); returns p(o | b, a) and writes the
    // normalized posterior to `out` when that probability is positive.
    double posterior(std::span<const double> b, int a, int obs_k, std::vector<double>& out) const;

  private:
    MarketModel model_;
    int n_states_;
    int n_active_;
    int n_actions_;
    std::vector<int> succ_;                   // [s * A + a]
    std::vector<double> rew_;                 // [s * A + a]
    std::vector<std::vector<Obs>> obs_syms_;  // per action
    std::vector<double> obs_head_;            // [a * S + s'] = P(obs_syms_[a][0] | a, s')
};

}  // namespace mope
