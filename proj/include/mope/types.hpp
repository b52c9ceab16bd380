#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mope {

enum class Role { Seller, Advisor };

struct AgentId {
    Role role;
    int index;  // unique within role

    friend bool operator==(const AgentId&, const AgentId&) = default;
};

// Transaction status factor. NotStarted is the only active value; the other
// four are absorbing terminals with zero reward.
enum class Sat : int {
    NotStarted = 0,
    Satisfactory = 1,
    Unsatisfactory = 2,
    GaveUp = 3,
    Finished = 4,
};
constexpr int kNumSat = 5;

inline bool is_terminal(Sat s) { return s != Sat::NotStarted; }

enum class ActionKind { SellerQuery, AdvisorQuery, Buy, DoNotBuy };

// SellerQuery(i,j): ask advisor i about seller j.
// AdvisorQuery(i,j): ask advisor i about advisor j (i != j).
// Buy(j): buy from seller j.  DoNotBuy: give up.
struct Action {
    ActionKind kind;
    int i = -1;  // querying advisor
    int j = -1;  // queried seller (SQ, Buy) or queried advisor (AQ)

    static Action seller_query(int advisor, int seller) { return {ActionKind::SellerQuery, advisor, seller}; }
    static Action advisor_query(int advisor, int about) { return {ActionKind::AdvisorQuery, advisor, about}; }
    static Action buy(int seller) { return {ActionKind::Buy, -1, seller}; }
    static Action do_not_buy() { return {ActionKind::DoNotBuy, -1, -1}; }

    friend bool operator==(const Action&, const Action&) = default;

    std::string str() const {
        switch (kind) {
            case ActionKind::SellerQuery: return "SQ(a" + std::to_string(i) + ",s" + std::to_string(j) + ")";
            case ActionKind::AdvisorQuery: return "AQ(a" + std::to_string(i) + ",a" + std::to_string(j) + ")";
            case ActionKind::Buy: return "BUY(s" + std::to_string(j) + ")";
            case ActionKind::DoNotBuy: return "DNB";
        }
        return "?";
    }
};

enum class Obs : int {
    Good = 0,
    Bad = 1,
    Trustworthy = 2,
    Untrustworthy = 3,
    OutcomeSatisfactory = 4,
    OutcomeUnsatisfactory = 5,
    None = 6,
};

inline const char* obs_name(Obs o) {
    switch (o) {
        case Obs::Good: return "good";
        case Obs::Bad: return "bad";
        case Obs::Trustworthy: return "trustworthy";
        case Obs::Untrustworthy: return "untrustworthy";
        case Obs::OutcomeSatisfactory: return "sat";
        case Obs::OutcomeUnsatisfactory: return "unsat";
        case Obs::None: return "none";
    }
    return "?";
}

struct ObservationParams {
    // probability a trustworthy advisor reports the true quality of the
    // queried agent; must exceed the untrustworthy probability
    double p_true_report_trustworthy = 0.8;
    double p_true_report_untrustworthy = 0.3;
    // probability the sat outcome observed after Buy reflects the true quality
    double p_buy_obs_correct = 0.95;

    void validate() const {
        if (!(p_true_report_trustworthy > 0.5 && p_true_report_trustworthy <= 1.0))
            throw std::invalid_argument("p_true_report_trustworthy must be in (0.5, 1]");
        if (!(p_true_report_untrustworthy >= 0.0 && p_true_report_untrustworthy < 1.0))
            throw std::invalid_argument("p_true_report_untrustworthy must be in [0, 1)");
        if (!(p_true_report_trustworthy > p_true_report_untrustworthy))
            throw std::invalid_argument("trustworthy advisors must report more accurately than untrustworthy ones");
        if (!(p_buy_obs_correct > 0.5 && p_buy_obs_correct <= 1.0))
            throw std::invalid_argument("p_buy_obs_correct must be in (0.5, 1]");
    }

    friend bool operator==(const ObservationParams&, const ObservationParams&) = default;
};

struct RewardParams {
    double cost_advisor_query = 1.0;
    double cost_seller_query = 10.0;
    double reward_success = 100.0;
    double penalty_failure = -100.0;
    double discount = 0.95;

    void validate() const {
        if (cost_advisor_query < 0 || cost_seller_query < 0) throw std::invalid_argument("query costs must be >= 0");
        if (!(discount > 0.0 && discount < 1.0)) throw std::invalid_argument("discount must be in (0,1)");
    }

    friend bool operator==(const RewardParams&, const RewardParams&) = default;
};

// Raised when a belief update is conditioned on an observation with
// (approximately) zero probability.
struct ImpossibleEvidence : std::runtime_error {
    explicit ImpossibleEvidence(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mope
