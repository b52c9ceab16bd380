#include "mope/belief.hpp"

#include <stdexcept>

namespace mope {

namespace {

// Posterior of a (reporter, target) quality pair given one report, starting
// from the product of the two marginals. `p_target` is the prior of the
// target being in its "good" value, `truthful` says whether the observation
// names that value.
struct PairPosterior {
    double target;    // posterior P(target good)
    double reporter;  // posterior P(reporter trustworthy)
    double prob;      // evidence probability
};

PairPosterior pair_update(double p_reporter_trust, double p_target, bool truthful, const ObservationParams& op) {
    const double pt = op.p_true_report_trustworthy;
    const double pu = op.p_true_report_untrustworthy;
    const double lt_good = truthful ? pt : 1.0 - pt;   // reporter trustworthy, target good
    const double lt_bad = truthful ? 1.0 - pt : pt;    // reporter trustworthy, target bad
    const double lu_good = truthful ? pu : 1.0 - pu;
    const double lu_bad = truthful ? 1.0 - pu : pu;

    const double w_tg = p_reporter_trust * p_target * lt_good;
    const double w_tb = p_reporter_trust * (1.0 - p_target) * lt_bad;
    const double w_ug = (1.0 - p_reporter_trust) * p_target * lu_good;
    const double w_ub = (1.0 - p_reporter_trust) * (1.0 - p_target) * lu_bad;
    const double z = w_tg + w_tb + w_ug + w_ub;
    if (z < kEvidenceFloor) throw ImpossibleEvidence("zero-probability report");
    return {(w_tg + w_ug) / z, (w_tg + w_tb) / z, z};
}

}  // namespace

FactoredBelief FactoredBelief::uniform(const MarketModel& model) {
    FactoredBelief fb;
    fb.q_high.assign(model.num_sellers(), 0.5);
    fb.u_trustworthy.assign(model.num_advisors(), 0.5);
    fb.sat.fill(0.0);
    fb.sat[static_cast<int>(Sat::NotStarted)] = 1.0;
    return fb;
}

JointBelief exact_update(const EnumeratedPomdp& pomdp, const JointBelief& b, int action, Obs o) {
    const auto& syms = pomdp.observations(action);
    int k = -1;
    for (size_t t = 0; t < syms.size(); ++t)
        if (syms[t] == o) k = static_cast<int>(t);
    if (k < 0) throw std::invalid_argument("illegal observation for action");
    JointBelief out;
    const double p = pomdp.posterior(b, action, k, out);
    if (p < kEvidenceFloor)
        throw ImpossibleEvidence(std::string("impossible evidence: ") + obs_name(o) + " after " +
                                 pomdp.model().action(action).str());
    return out;
}

double ff_obs_prob(const MarketModel& model, const FactoredBelief& fb, const Action& a, Obs o) {
    const auto& op = model.obs_params();
    switch (a.kind) {
        case ActionKind::SellerQuery: {
            if (o != Obs::Good && o != Obs::Bad) throw std::invalid_argument("illegal observation for SellerQuery");
            return pair_update(fb.u_trustworthy[a.i], fb.q_high[a.j], o == Obs::Good, op).prob;
        }
        case ActionKind::AdvisorQuery: {
            if (o != Obs::Trustworthy && o != Obs::Untrustworthy)
                throw std::invalid_argument("illegal observation for AdvisorQuery");
            return pair_update(fb.u_trustworthy[a.i], fb.u_trustworthy[a.j], o == Obs::Trustworthy, op).prob;
        }
        case ActionKind::Buy: {
            if (o != Obs::OutcomeSatisfactory && o != Obs::OutcomeUnsatisfactory)
                throw std::invalid_argument("illegal observation for Buy");
            const double bh = fb.q_high[a.j];
            const double lh = o == Obs::OutcomeSatisfactory ? op.p_buy_obs_correct : 1.0 - op.p_buy_obs_correct;
            const double ll = o == Obs::OutcomeSatisfactory ? 1.0 - op.p_buy_obs_correct : op.p_buy_obs_correct;
            return bh * lh + (1.0 - bh) * ll;
        }
        case ActionKind::DoNotBuy:
            if (o != Obs::None) throw std::invalid_argument("illegal observation for DoNotBuy");
            return 1.0;
    }
    throw std::logic_error("unreachable");
}

FactoredBelief ff_update(const MarketModel& model, const FactoredBelief& fb, const Action& a, Obs o) {
    const auto& op = model.obs_params();
    FactoredBelief out = fb;
    switch (a.kind) {
        case ActionKind::SellerQuery: {
            if (o != Obs::Good && o != Obs::Bad) throw std::invalid_argument("illegal observation for SellerQuery");
            const auto post = pair_update(fb.u_trustworthy[a.i], fb.q_high[a.j], o == Obs::Good, op);
            out.q_high[a.j] = post.target;
            out.u_trustworthy[a.i] = post.reporter;
            return out;  // sat untouched by queries
        }
        case ActionKind::AdvisorQuery: {
            if (o != Obs::Trustworthy && o != Obs::Untrustworthy)
                throw std::invalid_argument("illegal observation for AdvisorQuery");
            const auto post = pair_update(fb.u_trustworthy[a.i], fb.u_trustworthy[a.j], o == Obs::Trustworthy, op);
            out.u_trustworthy[a.j] = post.target;
            out.u_trustworthy[a.i] = post.reporter;
            return out;
        }
        case ActionKind::Buy: {
            if (o != Obs::OutcomeSatisfactory && o != Obs::OutcomeUnsatisfactory)
                throw std::invalid_argument("illegal observation for Buy");
            const double bh = fb.q_high[a.j];
            const double lh = o == Obs::OutcomeSatisfactory ? op.p_buy_obs_correct : 1.0 - op.p_buy_obs_correct;
            const double ll = o == Obs::OutcomeSatisfactory ? 1.0 - op.p_buy_obs_correct : op.p_buy_obs_correct;
            const double z = bh * lh + (1.0 - bh) * ll;
            if (z < kEvidenceFloor) throw ImpossibleEvidence("zero-probability buy outcome");
            out.q_high[a.j] = bh * lh / z;
            // the not_started mass splits into the outcome matching q_j;
            // terminal mass is carried through unchanged
            const double active = fb.sat[static_cast<int>(Sat::NotStarted)];
            out.sat[static_cast<int>(Sat::NotStarted)] = 0.0;
            out.sat[static_cast<int>(Sat::Satisfactory)] += active * (bh * lh / z);
            out.sat[static_cast<int>(Sat::Unsatisfactory)] += active * ((1.0 - bh) * ll / z);
            return out;
        }
        case ActionKind::DoNotBuy: {
            if (o != Obs::None) throw std::invalid_argument("illegal observation for DoNotBuy");
            const double active = fb.sat[static_cast<int>(Sat::NotStarted)];
            out.sat[static_cast<int>(Sat::NotStarted)] = 0.0;
            out.sat[static_cast<int>(Sat::GaveUp)] += active;
            return out;
        }
    }
    throw std::logic_error("unreachable");
}

JointBelief extract_local(const FactoredBelief& fb, const SubPomdp& sp, const MarketModel& local) {
    const int nf = local.num_quality_factors();
    const int n_ls = local.num_sellers();
    JointBelief out(local.num_states(), 0.0);
    for (int mask = 0; mask < (1 << nf); ++mask) {
        double p = 1.0;
        for (int k = 0; k < n_ls; ++k) {
            const double ph = fb.q_high[sp.sellers[k]];
            p *= ((mask >> k) & 1) ? ph : 1.0 - ph;
        }
        for (int k = 0; k < static_cast<int>(sp.advisors.size()); ++k) {
            const double pt = fb.u_trustworthy[sp.advisors[k]];
            p *= ((mask >> (n_ls + k)) & 1) ? pt : 1.0 - pt;
        }
        for (int sat = 0; sat < kNumSat; ++sat)
            out[static_cast<size_t>(sat) * (1 << nf) + mask] = p * fb.sat[sat];
    }
    return out;
}

JointBelief extract_local(const JointBelief& global_b, const MarketModel& global, const SubPomdp& sp,
                          const MarketModel& local) {
    const int n_ls = local.num_sellers();
    const int n_active_local = local.num_active_states();
    JointBelief out(local.num_states(), 0.0);
    for (int gs = 0; gs < global.num_states(); ++gs) {
        const double m = global_b[gs];
        if (m == 0.0) continue;
        const State st = global.state_of(gs);
        uint32_t mask = 0;
        for (int k = 0; k < n_ls; ++k)
            if (global.seller_high(st.quality, sp.sellers[k])) mask |= 1u << k;
        for (int k = 0; k < static_cast<int>(sp.advisors.size()); ++k)
            if (global.advisor_trustworthy(st.quality, sp.advisors[k])) mask |= 1u << (n_ls + k);
        out[static_cast<size_t>(st.sat) * n_active_local + mask] += m;
    }
    return out;
}

LocalBeliefSet uniform_local_beliefs(const Decomposition& d, const EnumeratedPomdp& shared_local) {
    LocalBeliefSet B;
    B.beliefs.assign(d.sps.size(), shared_local.uniform_belief());
    return B;
}

void parallel_update(LocalBeliefSet& B, int global_action, Obs o, const Decomposition& d, const MarketModel& global,
                     const MarketModel& local, const EnumeratedPomdp& local_pomdp) {
    for (int k = 0; k < d.size(); ++k) {
        const int la = global_to_local_action(global, d.sps[k], local, global_action);
        if (la < 0) continue;
        B.beliefs[k] = exact_update(local_pomdp, B.beliefs[k], la, o);
    }
}

JointBelief compose_product(const LocalBeliefSet& B, const Decomposition& d, const MarketModel& global,
                            const MarketModel& local) {
    const int n_ls = local.num_sellers();
    const int n_active_local = local.num_active_states();
    JointBelief out(global.num_states(), 0.0);
    for (int gs = 0; gs < global.num_states(); ++gs) {
        const State st = global.state_of(gs);
        double p = 1.0;
        for (int k = 0; k < d.size() && p != 0.0; ++k) {
            const auto& sp = d.sps[k];
            uint32_t mask = 0;
            for (int t = 0; t < n_ls; ++t)
                if (global.seller_high(st.quality, sp.sellers[t])) mask |= 1u << t;
            for (int t = 0; t < static_cast<int>(sp.advisors.size()); ++t)
                if (global.advisor_trustworthy(st.quality, sp.advisors[t])) mask |= 1u << (n_ls + t);
            p *= B.beliefs[k][static_cast<size_t>(st.sat) * n_active_local + mask];
        }
        out[gs] = p;
    }
    return out;
}

}  // namespace mope
