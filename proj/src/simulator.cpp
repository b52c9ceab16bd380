#include "mope/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mope {

uint32_t GroundTruth::quality_mask(const MarketModel& model) const {
    uint32_t mask = 0;
    for (int j = 0; j < model.num_sellers(); ++j)
        if (seller_high[j]) mask |= 1u << j;
    for (int i = 0; i < model.num_advisors(); ++i)
        if (advisor_trustworthy[i]) mask |= 1u << (model.num_sellers() + i);
    return mask;
}

bool GroundTruth::any_seller_high() const {
    for (uint8_t h : seller_high)
        if (h) return true;
    return false;
}

GroundTruth sample_ground_truth(const MarketModel& model, const PopulationConfig& pop, uint64_t seed) {
    Rng rng(mix_seed(seed, 0x67726f756e64ULL));
    GroundTruth gt;
    gt.seller_high.resize(model.num_sellers());
    gt.advisor_trustworthy.resize(model.num_advisors());
    for (int j = 0; j < model.num_sellers(); ++j) gt.seller_high[j] = rng.bernoulli(pop.pct_good_sellers);
    for (int i = 0; i < model.num_advisors(); ++i) gt.advisor_trustworthy[i] = !rng.bernoulli(pop.pct_untrustworthy);
    return gt;
}

std::pair<MarketModel, GroundTruth> generate_market(int W, const PopulationConfig& pop, ObservationParams obs,
                                                    RewardParams rew, uint64_t seed) {
    if (W < 2) throw std::invalid_argument("need at least two agents");
    const int n_s = sellers_for(W, pop.pct_sellers);
    MarketModel model(n_s, W - n_s, obs, rew);
    GroundTruth gt = sample_ground_truth(model, pop, seed);
    return {std::move(model), std::move(gt)};
}

Obs sample_observation(const MarketModel& model, const GroundTruth& gt, const Action& a, Rng& rng) {
    const auto& op = model.obs_params();
    switch (a.kind) {
        case ActionKind::SellerQuery: {
            const double p_true = gt.advisor_trustworthy[a.i] ? op.p_true_report_trustworthy : op.p_true_report_untrustworthy;
            const bool truthful = rng.bernoulli(p_true);
            return (truthful == static_cast<bool>(gt.seller_high[a.j])) ? Obs::Good : Obs::Bad;
        }
        case ActionKind::AdvisorQuery: {
            const double p_true = gt.advisor_trustworthy[a.i] ? op.p_true_report_trustworthy : op.p_true_report_untrustworthy;
            const bool truthful = rng.bernoulli(p_true);
            return (truthful == static_cast<bool>(gt.advisor_trustworthy[a.j])) ? Obs::Trustworthy : Obs::Untrustworthy;
        }
        case ActionKind::Buy: {
            const bool matches = rng.bernoulli(op.p_buy_obs_correct);
            return (matches == static_cast<bool>(gt.seller_high[a.j])) ? Obs::OutcomeSatisfactory
                                                                       : Obs::OutcomeUnsatisfactory;
        }
        case ActionKind::DoNotBuy:
            return Obs::None;
    }
    throw std::logic_error("unreachable");
}

// --- MOPE -------------------------------------------------------------------

MopeContext::MopeContext(const MarketModel& global_model, DecompositionConfig decomp_cfg, Aggregator agg,
                         Hierarchy hier, BeliefMode mode, std::shared_ptr<const ValueFunction> vf_in, int state_cap)
    : global(global_model),
      aggregator(agg),
      hierarchy(hier),
      belief_mode(mode),
      decomposition(build_decomposition(global_model, decomp_cfg)),
      local(local_model(global_model, decomposition.sps.front())),
      local_pomdp(local, state_cap),
      vf(std::move(vf_in)) {
    if (belief_mode == BeliefMode::Exact) global_pomdp.emplace(global_model, state_cap);
}

void MopePolicy::reset(uint64_t episode_seed) {
    rng_ = Rng(mix_seed(episode_seed, 0x6d6f7065ULL));
    switch (ctx_.belief_mode) {
        case BeliefMode::Exact: exact_b_ = ctx_.global_pomdp->uniform_belief(); break;
        case BeliefMode::FF: ff_b_ = FactoredBelief::uniform(ctx_.global); break;
        case BeliefMode::Parallel: parallel_b_ = uniform_local_beliefs(ctx_.decomposition, ctx_.local_pomdp); break;
    }
}

PolicyDecision MopePolicy::decide() {
    const auto& d = ctx_.decomposition;
    votes_.clear();
    votes_.reserve(d.size());
    for (int k = 0; k < d.size(); ++k) {
        JointBelief bk;
        const JointBelief* local_b = nullptr;
        switch (ctx_.belief_mode) {
            case BeliefMode::Exact:
                bk = extract_local(exact_b_, ctx_.global, d.sps[k], ctx_.local);
                local_b = &bk;
                break;
            case BeliefMode::FF:
                bk = extract_local(ff_b_, d.sps[k], ctx_.local);
                local_b = &bk;
                break;
            case BeliefMode::Parallel:
                local_b = &parallel_b_.beliefs[k];
                break;
        }
        votes_.push_back(vote_from_sp(ctx_.local_pomdp, *ctx_.vf, *local_b, ctx_.global, d.sps[k], ctx_.local, k, ws_));
    }

    PolicyDecision dec;
    if (ctx_.aggregator == Aggregator::Majority) {
        MajorityDecision log;
        dec.action = aggregate_majority(votes_, ctx_.hierarchy, ctx_.global, decision_log_ ? &log : nullptr);
        if (decision_log_) decision_log_->push_back(std::move(log));
    } else {
        const int idx = max_q_vote(votes_, rng_);
        dec.action = votes_[idx].action;
        dec.winning_sp = votes_[idx].sp_index;
    }
    return dec;
}

void MopePolicy::observe(int global_action, Obs o) {
    switch (ctx_.belief_mode) {
        case BeliefMode::Exact:
            exact_b_ = exact_update(*ctx_.global_pomdp, exact_b_, global_action, o);
            break;
        case BeliefMode::FF:
            ff_b_ = ff_update(ctx_.global, ff_b_, ctx_.global.action(global_action), o);
            break;
        case BeliefMode::Parallel:
            parallel_update(parallel_b_, global_action, o, ctx_.decomposition, ctx_.global, ctx_.local, ctx_.local_pomdp);
            break;
    }
}

// --- SingleExpert -----------------------------------------------------------

SingleExpertContext::SingleExpertContext(const MarketModel& global_model, int sellers, int advisors,
                                         std::shared_ptr<const ValueFunction> vf_in)
    : global(global_model),
      sellers_per_sp(sellers),
      advisors_per_sp(advisors),
      local(MarketModel(sellers, advisors, global_model.obs_params(), global_model.reward_params())),
      local_pomdp(local),
      vf(std::move(vf_in)) {
    if (sellers > global_model.num_sellers() || advisors > global_model.num_advisors())
        throw std::invalid_argument("expert composition exceeds the population");
}

namespace {
std::vector<int> sample_distinct(int n, int k, Rng& rng) {
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (int t = 0; t < k; ++t) std::swap(pool[t], pool[t + rng.uniform_int(n - t)]);
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}
}  // namespace

void SingleExpertPolicy::reset(uint64_t episode_seed) {
    Rng rng(mix_seed(episode_seed, 0x657870657274ULL));
    sp_.sellers = sample_distinct(ctx_.global.num_sellers(), ctx_.sellers_per_sp, rng);
    sp_.advisors = sample_distinct(ctx_.global.num_advisors(), ctx_.advisors_per_sp, rng);
    belief_ = ctx_.local_pomdp.uniform_belief();
}

PolicyDecision SingleExpertPolicy::decide() {
    const Vote v = vote_from_sp(ctx_.local_pomdp, *ctx_.vf, belief_, ctx_.global, sp_, ctx_.local, 0, ws_);
    return {v.action, 0};
}

void SingleExpertPolicy::observe(int global_action, Obs o) {
    const int la = global_to_local_action(ctx_.global, sp_, ctx_.local, global_action);
    if (la < 0) return;  // not this expert's action
    belief_ = exact_update(ctx_.local_pomdp, belief_, la, o);
}

// --- episodes -----------------------------------------------------------------

double reward_at_ground_truth(const MarketModel& model, const GroundTruth& gt, const Action& a,
                              const std::vector<int>* scope_sellers) {
    const auto& rp = model.reward_params();
    switch (a.kind) {
        case ActionKind::AdvisorQuery: return -rp.cost_advisor_query;
        case ActionKind::SellerQuery: return -rp.cost_seller_query;
        case ActionKind::Buy: return gt.seller_high[a.j] ? rp.reward_success : rp.penalty_failure;
        case ActionKind::DoNotBuy: {
            if (scope_sellers) {
                for (int j : *scope_sellers)
                    if (gt.seller_high[j]) return rp.penalty_failure;
                return rp.reward_success;
            }
            return gt.any_seller_high() ? rp.penalty_failure : rp.reward_success;
        }
    }
    throw std::logic_error("unreachable");
}

EpisodeResult run_episode(Policy& policy, const MarketModel& model, const GroundTruth& gt, int max_steps,
                          uint64_t episode_seed, RewardScope scope, const Decomposition* decomposition,
                          bool keep_trace) {
    if (scope == RewardScope::VotingSp && decomposition == nullptr)
        throw std::invalid_argument("VotingSp scoring needs the decomposition");

    policy.reset(mix_seed(episode_seed, 0x706f6c696379ULL));
    Rng env(mix_seed(episode_seed, 0x656e76ULL));

    EpisodeResult res;
    double discount = 1.0;
    const int dnb = model.action_index(Action::do_not_buy());

    for (;;) {
        PolicyDecision dec;
        if (res.steps >= max_steps) {
            dec.action = dnb;  // step cap: forced DoNotBuy
            res.forced_dnb = true;
        } else {
            dec = policy.decide();
        }
        const Action& act = model.action(dec.action);
        const Obs o = sample_observation(model, gt, act, env);

        const std::vector<int>* scope_sellers = nullptr;
        if (scope == RewardScope::VotingSp && act.kind == ActionKind::DoNotBuy) {
            if (dec.winning_sp < 0) throw std::logic_error("VotingSp scoring without a winning SP");
            scope_sellers = &decomposition->sps[dec.winning_sp].sellers;
        }
        const double r = reward_at_ground_truth(model, gt, act, scope_sellers);
        res.discounted_value += discount * r;
        discount *= model.discount();
        res.steps += 1;
        if (keep_trace) res.trace.push_back({dec.action, o, r, dec.winning_sp});

        if (act.kind == ActionKind::Buy || act.kind == ActionKind::DoNotBuy) {
            res.terminal_action = dec.action;
            res.error_flag = (act.kind == ActionKind::Buy && !gt.seller_high[act.j]) ||
                             (act.kind == ActionKind::DoNotBuy && gt.any_seller_high());
            return res;
        }
        try {
            policy.observe(dec.action, o);
        } catch (const ImpossibleEvidence&) {
            res.aborted = true;
            return res;
        }
    }
}

}  // namespace mope
