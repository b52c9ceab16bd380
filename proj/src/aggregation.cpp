#include "mope/aggregation.hpp"

#include <limits>
#include <stdexcept>

namespace mope {

std::string AbstractAction::str() const {
    using P = Pattern;
    switch (pattern) {
        case P::SqAboutSeller: return "SQ(X,s" + std::to_string(arg) + ")";
        case P::SqByAdvisor: return "SQ(a" + std::to_string(arg) + ",Y)";
        case P::AqAboutAdvisor: return "AQ(X,a" + std::to_string(arg) + ")";
        case P::AqByAdvisor: return "AQ(a" + std::to_string(arg) + ",Y)";
        case P::SqAny: return "SQ(X,Y)";
        case P::AqAny: return "AQ(X,Y)";
        case P::BuyAny: return "BUY(Y)";
        case P::Dnb: return "DNB";
        case P::Others: return "OTHERS";
    }
    return "?";
}

std::vector<AbstractAction> abstract_actions(const Action& a, int level) {
    using P = AbstractAction::Pattern;
    if (level < 1 || level > 3) throw std::invalid_argument("abstraction level must be 1, 2 or 3");
    switch (a.kind) {
        case ActionKind::SellerQuery:
            if (level == 1) return {{1, P::SqAboutSeller, a.j}, {1, P::SqByAdvisor, a.i}};
            if (level == 2) return {{2, P::SqAny, -1}};
            return {{3, P::Others, -1}};
        case ActionKind::AdvisorQuery:
            if (level == 1) return {{1, P::AqAboutAdvisor, a.j}, {1, P::AqByAdvisor, a.i}};
            if (level == 2) return {{2, P::AqAny, -1}};
            return {{3, P::Others, -1}};
        case ActionKind::Buy:
            if (level == 3) return {{3, P::Others, -1}};
            return {{level, P::BuyAny, -1}};
        case ActionKind::DoNotBuy:
            return {{level, P::Dnb, -1}};
    }
    throw std::logic_error("unreachable");
}

bool consistent(const Action& a, const AbstractAction& p) {
    using P = AbstractAction::Pattern;
    switch (p.pattern) {
        case P::SqAboutSeller: return a.kind == ActionKind::SellerQuery && a.j == p.arg;
        case P::SqByAdvisor: return a.kind == ActionKind::SellerQuery && a.i == p.arg;
        case P::AqAboutAdvisor: return a.kind == ActionKind::AdvisorQuery && a.j == p.arg;
        case P::AqByAdvisor: return a.kind == ActionKind::AdvisorQuery && a.i == p.arg;
        case P::SqAny: return a.kind == ActionKind::SellerQuery;
        case P::AqAny: return a.kind == ActionKind::AdvisorQuery;
        case P::BuyAny: return a.kind == ActionKind::Buy;
        case P::Dnb: return a.kind == ActionKind::DoNotBuy;
        case P::Others: return a.kind != ActionKind::DoNotBuy;
    }
    return false;
}

bool consistent(const AbstractAction& child, const AbstractAction& parent) {
    using P = AbstractAction::Pattern;
    if (child.level != parent.level - 1) return false;
    switch (parent.pattern) {
        case P::SqAny: return child.pattern == P::SqAboutSeller || child.pattern == P::SqByAdvisor;
        case P::AqAny: return child.pattern == P::AqAboutAdvisor || child.pattern == P::AqByAdvisor;
        case P::BuyAny: return child.pattern == P::BuyAny;
        case P::Dnb: return child.pattern == P::Dnb;
        case P::Others:
            return child.pattern == P::SqAny || child.pattern == P::AqAny || child.pattern == P::BuyAny;
        default:
            return false;  // L1 patterns have no abstract children
    }
}

VoteTally VoteTally::build(const std::vector<Vote>& votes, const MarketModel& model) {
    VoteTally t;
    for (const auto& v : votes) {
        auto& e = t.concrete[v.action];
        e.count += 1;
        e.qsum += v.q;
        const Action& a = model.action(v.action);
        for (int level = 1; level <= 3; ++level) {
            for (const auto& aa : abstract_actions(a, level)) {
                auto& ae = t.abstract[aa];
                ae.count += 1;
                ae.qsum += v.q;
            }
        }
    }
    return t;
}

int max_q_vote(const std::vector<Vote>& votes, Rng& rng) {
    if (votes.empty()) throw std::invalid_argument("no votes");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : votes) best = std::max(best, v.q);
    std::vector<int> tied;
    for (size_t i = 0; i < votes.size(); ++i)
        if (votes[i].q == best) tied.push_back(static_cast<int>(i));
    return tied[rng.uniform_int(static_cast<int>(tied.size()))];
}

int aggregate_majority(const std::vector<Vote>& votes, Hierarchy h, const MarketModel& model, MajorityDecision* log) {
    if (votes.empty()) throw std::invalid_argument("no votes");
    const VoteTally tally = VoteTally::build(votes, model);
    const int top = h == Hierarchy::H1 ? 1 : h == Hierarchy::H2 ? 2 : 3;

    auto best_concrete_overall = [&]() {
        int best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (const auto& [a, e] : tally.concrete)
            if (e.score() > best_score) {
                best_score = e.score();
                best = a;
            }
        return best;
    };

    MajorityDecision dec;
    dec.tally = tally;

    // pick the best abstraction at the top level, then refine level by level
    bool have = false;
    AbstractAction chosen;
    for (int level = top; level >= 1; --level) {
        const AbstractAction* best = nullptr;
        double best_score = -std::numeric_limits<double>::infinity();
        for (const auto& [aa, e] : tally.abstract) {
            if (aa.level != level) continue;
            if (have && !consistent(aa, chosen)) continue;
            if (e.score() > best_score) {  // map order breaks ties by lowest key
                best_score = e.score();
                best = &aa;
            }
        }
        if (!best) {
            dec.fallback = true;
            dec.action = best_concrete_overall();
            if (log) *log = std::move(dec);
            return dec.action;
        }
        chosen = *best;
        have = true;
        dec.path.push_back(chosen);
    }

    int best_action = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const auto& [a, e] : tally.concrete) {
        if (!consistent(model.action(a), chosen)) continue;
        if (e.score() > best_score) {  // ties go to the lowest action index
            best_score = e.score();
            best_action = a;
        }
    }
    if (best_action < 0) {
        dec.fallback = true;
        best_action = best_concrete_overall();
    }
    dec.action = best_action;
    if (log) *log = std::move(dec);
    return best_action;
}

Vote vote_from_sp(const EnumeratedPomdp& local_pomdp, const ValueFunction& vf, const JointBelief& local_belief,
                  const MarketModel& global, const SubPomdp& sp, const MarketModel& local, int sp_index,
                  QWorkspace& ws) {
    double active_mass = 0.0;
    for (int s = 0; s < local_pomdp.num_active_states(); ++s) active_mass += local_belief[s];
    if (active_mass < 1e-12) {
        // transaction already over in this SP; vote the null action
        return Vote{global.action_index(Action::do_not_buy()), 0.0, sp_index};
    }

    int best_a = 0;
    double best_q = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < local_pomdp.num_actions(); ++a) {
        const double q = q_value(local_pomdp, vf, local_belief, a, ws);
        if (q > best_q) {  // local enumeration order matches global order, so
            best_q = q;    // first-wins equals the lowest global action index
            best_a = a;
        }
    }
    return Vote{local_to_global_action(global, sp, local, best_a), best_q, sp_index};
}

}  // namespace mope
