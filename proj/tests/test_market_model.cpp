#include <doctest.h>

#include "mope/market_model.hpp"
#include "mope/simulator.hpp"

using namespace mope;

TEST_CASE("action enumeration matches the size table") {
    // W=10: 2 sellers, 8 advisors
    CHECK(MarketModel::enumerate_actions(2, 8).size() == 75);
    // W=6: 1 seller, 5 advisors
    CHECK(MarketModel::enumerate_actions(1, 5).size() == 27);
    // no advisors: only Buy_0 and DNB
    CHECK(MarketModel::enumerate_actions(1, 0).size() == 2);

    const int ws[] = {6, 7, 8, 9, 10, 25, 50, 75, 100};
    const int expected[] = {27, 38, 45, 59, 75, 486, 1971, 4456, 7941};
    for (int k = 0; k < 9; ++k) {
        const int n_s = sellers_for(ws[k]);
        CHECK(MarketModel::enumerate_actions(n_s, ws[k] - n_s).size() == static_cast<size_t>(expected[k]));
    }
}

TEST_CASE("action ordering is queries, buys, DNB") {
    const MarketModel m(2, 3);
    const auto& acts = m.actions();
    // SQ block sorted by (i, j)
    CHECK(acts[0] == Action::seller_query(0, 0));
    CHECK(acts[1] == Action::seller_query(0, 1));
    CHECK(acts[2] == Action::seller_query(1, 0));
    // AQ block after all SQ
    CHECK(acts[6] == Action::advisor_query(0, 1));
    CHECK(acts[7] == Action::advisor_query(0, 2));
    CHECK(acts[8] == Action::advisor_query(1, 0));
    // Buys then DNB last
    CHECK(acts[acts.size() - 3] == Action::buy(0));
    CHECK(acts[acts.size() - 2] == Action::buy(1));
    CHECK(acts.back() == Action::do_not_buy());
    // index lookup is the inverse of enumeration
    for (size_t k = 0; k < acts.size(); ++k) CHECK(m.action_index(acts[k]) == static_cast<int>(k));
    CHECK_THROWS_AS(m.action_index(Action::advisor_query(1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(m.action_index(Action::buy(5)), std::invalid_argument);
}

TEST_CASE("transitions: queries freeze the state, buy and DNB terminate") {
    const MarketModel m(4, 4);
    const State s{0b00001100u /* seller 2,3 high */, Sat::NotStarted};
    CHECK(m.transition(s, Action::seller_query(0, 0)) == s);
    CHECK(m.transition(s, Action::advisor_query(1, 2)) == s);
    CHECK(m.transition(s, Action::buy(3)) == State{s.quality, Sat::Satisfactory});
    CHECK(m.transition(s, Action::buy(0)) == State{s.quality, Sat::Unsatisfactory});
    CHECK(m.transition(s, Action::do_not_buy()) == State{s.quality, Sat::GaveUp});
    CHECK_THROWS_AS(m.transition(State{0, Sat::Satisfactory}, Action::buy(0)), std::domain_error);

    // quality factors never change under any action
    for (int mask = 0; mask < m.num_active_states(); ++mask)
        for (const auto& a : m.actions())
            CHECK(m.transition(State{static_cast<uint32_t>(mask), Sat::NotStarted}, a).quality ==
                  static_cast<uint32_t>(mask));
}

TEST_CASE("observation probabilities") {
    ObservationParams op;
    op.p_true_report_trustworthy = 0.8;
    op.p_true_report_untrustworthy = 0.3;
    const MarketModel m(1, 2, op);

    // advisor 0 trustworthy (bit 1), seller 0 high (bit 0)
    const State st{0b011u, Sat::NotStarted};
    CHECK(m.observation_prob(Action::seller_query(0, 0), st, Obs::Good) == doctest::Approx(0.8));
    CHECK(m.observation_prob(Action::seller_query(0, 0), st, Obs::Bad) == doctest::Approx(0.2));
    // untrustworthy advisor 1 reporting on trustworthy advisor 0
    CHECK(m.observation_prob(Action::advisor_query(1, 0), st, Obs::Trustworthy) == doctest::Approx(0.3));
    CHECK(m.observation_prob(Action::do_not_buy(), st, Obs::None) == 1.0);
    CHECK_THROWS_AS(m.observation_prob(Action::do_not_buy(), st, Obs::Good), std::invalid_argument);
    CHECK_THROWS_AS(m.observation_prob(Action::buy(0), st, Obs::Good), std::invalid_argument);

    // legal symbol set sums to one for every (action, next state)
    for (const auto& a : m.actions())
        for (int s = 0; s < m.num_states(); ++s) {
            double sum = 0.0;
            for (Obs o : MarketModel::legal_observations(a.kind)) sum += m.observation_prob(a, m.state_of(s), o);
            CHECK(sum == doctest::Approx(1.0));
        }
}

TEST_CASE("rewards") {
    const MarketModel m(2, 3);
    const State both_low{0b00000u, Sat::NotStarted};
    const State s1_high{0b00010u, Sat::NotStarted};
    CHECK(m.reward(both_low, Action::advisor_query(0, 1)) == -1.0);
    CHECK(m.reward(both_low, Action::seller_query(0, 0)) == -10.0);
    CHECK(m.reward(s1_high, Action::buy(1)) == 100.0);
    CHECK(m.reward(s1_high, Action::buy(0)) == -100.0);
    CHECK(m.reward(both_low, Action::do_not_buy()) == 100.0);
    CHECK(m.reward(s1_high, Action::do_not_buy()) == -100.0);
    // terminal states yield 0 for every action
    for (const auto& a : m.actions()) CHECK(m.reward(State{1, Sat::GaveUp}, a) == 0.0);
}

TEST_CASE("parameter validation") {
    ObservationParams op;
    op.p_true_report_trustworthy = 0.4;  // must exceed 0.5
    CHECK_THROWS_AS(MarketModel(1, 1, op), std::invalid_argument);
    op.p_true_report_trustworthy = 0.8;
    op.p_true_report_untrustworthy = 0.9;  // must stay below the trustworthy rate
    CHECK_THROWS_AS(MarketModel(1, 1, op), std::invalid_argument);
    RewardParams rp;
    rp.discount = 1.0;
    CHECK_THROWS_AS(MarketModel(1, 1, ObservationParams{}, rp), std::invalid_argument);
}
