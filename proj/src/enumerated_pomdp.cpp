#include "mope/enumerated_pomdp.hpp"

#include <stdexcept>
#include <string>

namespace mope {

EnumeratedPomdp::EnumeratedPomdp(MarketModel model, int state_cap) : model_(std::move(model)) {
    n_states_ = model_.num_states();
    n_active_ = model_.num_active_states();
    n_actions_ = model_.num_actions();
    if (n_states_ > state_cap)
        throw std::invalid_argument("enumerated state space too large: " + std::to_string(n_states_) + " > cap " +
                                    std::to_string(state_cap));

    succ_.resize(static_cast<size_t>(n_states_) * n_actions_);
    rew_.resize(static_cast<size_t>(n_states_) * n_actions_);
    for (int s = 0; s < n_states_; ++s) {
        const State st = model_.state_of(s);
        for (int a = 0; a < n_actions_; ++a) {
            if (is_terminal(st.sat)) {
                succ_[static_cast<size_t>(s) * n_actions_ + a] = s;  // absorbing
                rew_[static_cast<size_t>(s) * n_actions_ + a] = 0.0;
            } else {
                succ_[static_cast<size_t>(s) * n_actions_ + a] = model_.state_index(model_.transition(st, model_.action(a)));
                rew_[static_cast<size_t>(s) * n_actions_ + a] = model_.reward(st, model_.action(a));
            }
        }
    }

    obs_syms_.resize(n_actions_);
    obs_head_.resize(static_cast<size_t>(n_actions_) * n_states_);
    for (int a = 0; a < n_actions_; ++a) {
        obs_syms_[a] = MarketModel::legal_observations(model_.action(a).kind);
        for (int s = 0; s < n_states_; ++s)
            obs_head_[static_cast<size_t>(a) * n_states_ + s] =
                model_.observation_prob(model_.action(a), model_.state_of(s), obs_syms_[a][0]);
    }
}

double EnumeratedPomdp::obs_prob(int a, int next_state, Obs o) const {
    const auto& syms = obs_syms_[a];
    for (size_t k = 0; k < syms.size(); ++k)
        if (syms[k] == o) return obs_prob(a, next_state, static_cast<int>(k));
    throw std::invalid_argument("illegal observation for action");
}

std::vector<double> EnumeratedPomdp::uniform_belief() const {
    std::vector<double> b(n_states_, 0.0);
    const double p = 1.0 / n_active_;
    for (int s = 0; s < n_active_; ++s) b[s] = p;
    return b;
}

double EnumeratedPomdp::posterior(std::span<const double> b, int a, int obs_k, std::vector<double>& out) const {
    out.assign(n_states_, 0.0);
    const double* oh = &obs_head_[static_cast<size_t>(a) * n_states_];
    const int* sc = &succ_[a];
    double norm = 0.0;
    for (int s = 0; s < n_states_; ++s) {
        const double m = b[s];
        if (m == 0.0) continue;
        const int sp = sc[static_cast<size_t>(s) * n_actions_];
        const double po = obs_k == 0 ? oh[sp] : 1.0 - oh[sp];
        out[sp] += m * po;
        norm += m * po;
    }
    if (norm > 0.0) {
        const double inv = 1.0 / norm;
        for (double& v : out) v *= inv;
    }
    return norm;
}

}  // namespace mope
