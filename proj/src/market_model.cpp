#include "mope/market_model.hpp"

#include <stdexcept>

namespace mope {

MarketModel::MarketModel(int n_s, int n_a, ObservationParams obs, RewardParams rew)
    : n_s_(n_s), n_a_(n_a), obs_(obs), rew_(rew) {
    if (n_s < 0 || n_a < 0) throw std::invalid_argument("agent counts must be non-negative");
    if (n_s + n_a > 26) throw std::invalid_argument("too many quality factors to enumerate");
    obs_.validate();
    rew_.validate();
    actions_ = enumerate_actions(n_s, n_a);
}

std::vector<Action> MarketModel::enumerate_actions(int n_s, int n_a) {
    std::vector<Action> out;
    out.reserve(static_cast<size_t>(n_a) * n_s + static_cast<size_t>(n_a) * (n_a > 0 ? n_a - 1 : 0) + n_s + 1);
    for (int i = 0; i < n_a; ++i)
        for (int j = 0; j < n_s; ++j) out.push_back(Action::seller_query(i, j));
    for (int i = 0; i < n_a; ++i)
        for (int j = 0; j < n_a; ++j)
            if (i != j) out.push_back(Action::advisor_query(i, j));
    for (int j = 0; j < n_s; ++j) out.push_back(Action::buy(j));
    out.push_back(Action::do_not_buy());
    return out;
}

int MarketModel::action_index(const Action& a) const {
    check_action(a);
    switch (a.kind) {
        case ActionKind::SellerQuery:
            return a.i * n_s_ + a.j;
        case ActionKind::AdvisorQuery:
            // ordered pairs (i, j), i != j, j skips i
            return n_a_ * n_s_ + a.i * (n_a_ - 1) + (a.j < a.i ? a.j : a.j - 1);
        case ActionKind::Buy:
            return n_a_ * n_s_ + n_a_ * (n_a_ - 1) + a.j;
        case ActionKind::DoNotBuy:
            return num_actions() - 1;
    }
    throw std::logic_error("unreachable");
}

void MarketModel::check_action(const Action& a) const {
    auto in_range = [](int v, int n) { return v >= 0 && v < n; };
    switch (a.kind) {
        case ActionKind::SellerQuery:
            if (!in_range(a.i, n_a_) || !in_range(a.j, n_s_)) throw std::invalid_argument("SellerQuery references unknown agent");
            return;
        case ActionKind::AdvisorQuery:
            if (!in_range(a.i, n_a_) || !in_range(a.j, n_a_) || a.i == a.j)
                throw std::invalid_argument("AdvisorQuery references unknown agent or queries itself");
            return;
        case ActionKind::Buy:
            if (!in_range(a.j, n_s_)) throw std::invalid_argument("Buy references unknown seller");
            return;
        case ActionKind::DoNotBuy:
            return;
    }
}

State MarketModel::transition(const State& s, const Action& a) const {
    if (is_terminal(s.sat)) throw std::domain_error("transition from terminal state");
    check_action(a);
    switch (a.kind) {
        case ActionKind::SellerQuery:
        case ActionKind::AdvisorQuery:
            return s;  // queries never change the state
        case ActionKind::Buy:
            return State{s.quality, seller_high(s.quality, a.j) ? Sat::Satisfactory : Sat::Unsatisfactory};
        case ActionKind::DoNotBuy:
            return State{s.quality, Sat::GaveUp};
    }
    throw std::logic_error("unreachable");
}

std::vector<Obs> MarketModel::legal_observations(ActionKind kind) {
    switch (kind) {
        case ActionKind::SellerQuery: return {Obs::Good, Obs::Bad};
        case ActionKind::AdvisorQuery: return {Obs::Trustworthy, Obs::Untrustworthy};
        case ActionKind::Buy: return {Obs::OutcomeSatisfactory, Obs::OutcomeUnsatisfactory};
        case ActionKind::DoNotBuy: return {Obs::None};
    }
    return {};
}

double MarketModel::observation_prob(const Action& a, const State& next, Obs o) const {
    check_action(a);
    switch (a.kind) {
        case ActionKind::SellerQuery: {
            if (o != Obs::Good && o != Obs::Bad) throw std::invalid_argument("illegal observation for SellerQuery");
            const double p_true = advisor_trustworthy(next.quality, a.i) ? obs_.p_true_report_trustworthy
                                                                         : obs_.p_true_report_untrustworthy;
            const bool truthful = (o == Obs::Good) == seller_high(next.quality, a.j);
            return truthful ? p_true : 1.0 - p_true;
        }
        case ActionKind::AdvisorQuery: {
            if (o != Obs::Trustworthy && o != Obs::Untrustworthy)
                throw std::invalid_argument("illegal observation for AdvisorQuery");
            const double p_true = advisor_trustworthy(next.quality, a.i) ? obs_.p_true_report_trustworthy
                                                                         : obs_.p_true_report_untrustworthy;
            const bool truthful = (o == Obs::Trustworthy) == advisor_trustworthy(next.quality, a.j);
            return truthful ? p_true : 1.0 - p_true;
        }
        case ActionKind::Buy: {
            if (o != Obs::OutcomeSatisfactory && o != Obs::OutcomeUnsatisfactory)
                throw std::invalid_argument("illegal observation for Buy");
            const bool matches = (o == Obs::OutcomeSatisfactory) == seller_high(next.quality, a.j);
            return matches ? obs_.p_buy_obs_correct : 1.0 - obs_.p_buy_obs_correct;
        }
        case ActionKind::DoNotBuy:
            if (o != Obs::None) throw std::invalid_argument("illegal observation for DoNotBuy");
            return 1.0;
    }
    throw std::logic_error("unreachable");
}

double MarketModel::reward(const State& s, const Action& a) const {
    if (is_terminal(s.sat)) return 0.0;
    check_action(a);
    switch (a.kind) {
        case ActionKind::AdvisorQuery:
            return -rew_.cost_advisor_query;
        case ActionKind::SellerQuery:
            return -rew_.cost_seller_query;
        case ActionKind::Buy:
            return seller_high(s.quality, a.j) ? rew_.reward_success : rew_.penalty_failure;
        case ActionKind::DoNotBuy: {
            for (int j = 0; j < n_s_; ++j)
                if (seller_high(s.quality, j)) return rew_.penalty_failure;
            return rew_.reward_success;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace mope
