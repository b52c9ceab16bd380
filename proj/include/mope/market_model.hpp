#pragma once

#include <cstdint>
#include <vector>

#include "mope/types.hpp"

namespace mope {

// A full factor assignment: one quality bit per seller/advisor plus the
// transaction status. Bit j (j < n_s) is 1 iff q_j = high; bit n_s + i is
// 1 iff u_i = trustworthy.
struct State {
    uint32_t quality = 0;
    Sat sat = Sat::NotStarted;

    friend bool operator==(const State&, const State&) = default;
};

// The factored SALE POMDP over n_s sellers and n_a advisors: action
// enumeration, (deterministic) transitions, observation probabilities and
// rewards. Immutable after construction; all operations are pure.
class MarketModel {
  public:
    MarketModel(int n_s, int n_a, ObservationParams obs = {}, RewardParams rew = {});

    int num_sellers() const { return n_s_; }
    int num_advisors() const { return n_a_; }
    int num_quality_factors() const { return n_s_ + n_a_; }
    const ObservationParams& obs_params() const { return obs_; }
    const RewardParams& reward_params() const { return rew_; }
    double discount() const { return rew_.discount; }

    // --- actions ---------------------------------------------------------

    // All SellerQuery pairs sorted by (i,j), all ordered AdvisorQuery pairs
    // (i != i') sorted by (i,i'), all Buy actions by j, DoNotBuy last.
    static std::vector<Action> enumerate_actions(int n_s, int n_a);

    const std::vector<Action>& actions() const { return actions_; }
    int num_actions() const { return static_cast<int>(actions_.size()); }
    const Action& action(int idx) const { return actions_[idx]; }
    // index of an action in the enumeration; throws if the action references
    // agents outside the model
    int action_index(const Action& a) const;

    // --- state enumeration ------------------------------------------------

    int num_active_states() const { return 1 << num_quality_factors(); }
    int num_states() const { return kNumSat * num_active_states(); }
    int state_index(const State& s) const { return static_cast<int>(s.sat) * num_active_states() + static_cast<int>(s.quality); }
    State state_of(int index) const {
        return State{static_cast<uint32_t>(index % num_active_states()), static_cast<Sat>(index / num_active_states())};
    }
    bool seller_high(uint32_t quality, int j) const { return (quality >> j) & 1u; }
    bool advisor_trustworthy(uint32_t quality, int i) const { return (quality >> (n_s_ + i)) & 1u; }

    // --- dynamics ---------------------------------------------------------

    // Deterministic successor; the transition distribution is a point mass on
    // it. Throws std::domain_error on terminal input (callers must treat
    // terminal states as absorbing with zero reward).
    State transition(const State& s, const Action& a) const;

    // P(s' | s, a) of the point-mass distribution above.
    double transition_prob(const State& s, const Action& a, const State& next) const {
        return transition(s, a) == next ? 1.0 : 0.0;
    }

    // Legal observation symbols for an action kind, in a fixed order.
    static std::vector<Obs> legal_observations(ActionKind kind);

    // P(o | a, s'); throws std::invalid_argument for an illegal (action, obs)
    // pairing. Depends only on the quality factors of s'.
    double observation_prob(const Action& a, const State& next, Obs o) const;

    // Immediate reward R(s, a); terminal states yield 0 for every action.
    // DoNotBuy is rewarded relative to this model's own sellers.
    double reward(const State& s, const Action& a) const;

  private:
    void check_action(const Action& a) const;

    int n_s_;
    int n_a_;
    ObservationParams obs_;
    RewardParams rew_;
    std::vector<Action> actions_;
};

}  // namespace mope
