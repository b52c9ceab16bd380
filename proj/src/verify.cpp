#include "mope/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <thread>

#include "mope/belief.hpp"
#include "mope/experiment.hpp"
#include "mope/simulator.hpp"

namespace mope {

namespace {

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// exact joint of a fully factored belief
JointBelief joint_of(const MarketModel& m, const FactoredBelief& fb) {
    JointBelief b(m.num_states(), 0.0);
    for (int mask = 0; mask < m.num_active_states(); ++mask) {
        double p = 1.0;
        for (int j = 0; j < m.num_sellers(); ++j) p *= m.seller_high(mask, j) ? fb.q_high[j] : 1.0 - fb.q_high[j];
        for (int i = 0; i < m.num_advisors(); ++i)
            p *= m.advisor_trustworthy(mask, i) ? fb.u_trustworthy[i] : 1.0 - fb.u_trustworthy[i];
        for (int sat = 0; sat < kNumSat; ++sat) b[static_cast<size_t>(sat) * m.num_active_states() + mask] = p * fb.sat[sat];
    }
    return b;
}

// marginals of an exact joint
FactoredBelief marginals_of(const MarketModel& m, const JointBelief& b) {
    FactoredBelief fb;
    fb.q_high.assign(m.num_sellers(), 0.0);
    fb.u_trustworthy.assign(m.num_advisors(), 0.0);
    fb.sat.fill(0.0);
    for (int s = 0; s < m.num_states(); ++s) {
        const double p = b[s];
        if (p == 0.0) continue;
        const State st = m.state_of(s);
        for (int j = 0; j < m.num_sellers(); ++j)
            if (m.seller_high(st.quality, j)) fb.q_high[j] += p;
        for (int i = 0; i < m.num_advisors(); ++i)
            if (m.advisor_trustworthy(st.quality, i)) fb.u_trustworthy[i] += p;
        fb.sat[static_cast<int>(st.sat)] += p;
    }
    return fb;
}

}  // namespace

VerifyResult verify_table1() {
    VerifyResult r;
    const int ws[] = {6, 7, 8, 9, 10, 25, 50, 75, 100};
    const int expected[] = {27, 38, 45, 59, 75, 486, 1971, 4456, 7941};
    for (int k = 0; k < 9; ++k) {
        const int n_s = sellers_for(ws[k]);
        const auto actions = MarketModel::enumerate_actions(n_s, ws[k] - n_s);
        const int got = static_cast<int>(actions.size());
        if (got == expected[k]) {
            r.note(fmt("W=%-3d n_s=%-2d |A|=%d", ws[k], n_s, got));
        } else {
            r.fail(fmt("W=%d expected |A|=%d, got %d", ws[k], expected[k], got));
        }
    }
    return r;
}

VerifyResult verify_ff_onestep(ObservationParams obs, RewardParams rew, int trials_per_w, uint64_t seed) {
    VerifyResult r;
    Rng rng(mix_seed(seed, 0x66666f6e65ULL));
    double worst = 0.0;
    for (int W = 2; W <= 8; ++W) {
        const int n_s = sellers_for(W);
        const MarketModel model(n_s, W - n_s, obs, rew);
        const EnumeratedPomdp pomdp(model);
        for (int trial = 0; trial < trials_per_w; ++trial) {
            FactoredBelief prior = FactoredBelief::uniform(model);
            for (auto& p : prior.q_high) p = 0.02 + 0.96 * rng.uniform();
            for (auto& p : prior.u_trustworthy) p = 0.02 + 0.96 * rng.uniform();
            const JointBelief joint = joint_of(model, prior);
            for (int a = 0; a < model.num_actions(); ++a) {
                for (Obs o : MarketModel::legal_observations(model.action(a).kind)) {
                    const FactoredBelief ff = ff_update(model, prior, model.action(a), o);
                    const FactoredBelief ex = marginals_of(model, exact_update(pomdp, joint, a, o));
                    double dev = 0.0;
                    for (int j = 0; j < n_s; ++j) dev = std::max(dev, std::abs(ff.q_high[j] - ex.q_high[j]));
                    for (int i = 0; i < W - n_s; ++i)
                        dev = std::max(dev, std::abs(ff.u_trustworthy[i] - ex.u_trustworthy[i]));
                    for (int s = 0; s < kNumSat; ++s) dev = std::max(dev, std::abs(ff.sat[s] - ex.sat[s]));
                    worst = std::max(worst, dev);
                    if (dev > 1e-9)
                        r.fail(fmt("W=%d trial=%d action=%s obs=%s: marginal deviation %.3e", W, trial,
                                   model.action(a).str().c_str(), obs_name(o), dev));
                }
            }
        }
    }
    r.note(fmt("max marginal deviation %.3e over W=2..8 (%d priors per W, all action/obs pairs)", worst, trials_per_w));
    return r;
}

VerifyResult verify_lemma_beliefs(ObservationParams obs, RewardParams rew, int sequences, int max_len, uint64_t seed) {
    VerifyResult r;
    const MarketModel model(2, 8, obs, rew);  // W = 10
    const EnumeratedPomdp global_pomdp(model);
    DecompositionConfig dc{1, 5, 1, mix_seed(seed, 0x6c656d6d61ULL)};
    const Decomposition d = build_decomposition(model, dc);
    if (d.size() != 2) {
        r.fail(fmt("expected 2 SPs, got %d", d.size()));
        return r;
    }
    if (!d.non_overlapping()) {
        r.fail("decomposition is not disjoint");
        return r;
    }
    const MarketModel local = local_model(model, d.sps[0]);
    const EnumeratedPomdp local_pomdp(local);

    // in-decomposition actions: queries of either SP (terminal actions end an
    // episode, so equivalence along a trajectory concerns query sequences)
    std::vector<int> in_dec;
    for (int a = 0; a < model.num_actions(); ++a) {
        const Action& act = model.action(a);
        if (act.kind != ActionKind::SellerQuery && act.kind != ActionKind::AdvisorQuery) continue;
        for (int k = 0; k < d.size(); ++k)
            if (d.sps[k].contains_action(act)) {
                in_dec.push_back(a);
                break;
            }
    }

    Rng rng(mix_seed(seed, 0x73657175ULL));
    double worst = 0.0;
    for (int seq = 0; seq < sequences; ++seq) {
        JointBelief exact = global_pomdp.uniform_belief();
        LocalBeliefSet B = uniform_local_beliefs(d, local_pomdp);
        const int len = 1 + rng.uniform_int(max_len);
        for (int t = 0; t < len; ++t) {
            const int a = in_dec[rng.uniform_int(static_cast<int>(in_dec.size()))];
            // sample o from the exact posterior predictive
            double p0 = 0.0;
            for (int s = 0; s < global_pomdp.num_states(); ++s)
                if (exact[s] != 0.0) p0 += exact[s] * global_pomdp.obs_prob(a, global_pomdp.successor(s, a), 0);
            const int k = rng.uniform() < p0 ? 0 : 1;
            const Obs o = global_pomdp.observations(a)[k];
            exact = exact_update(global_pomdp, exact, a, o);
            parallel_update(B, a, o, d, model, local, local_pomdp);

            const JointBelief prod = compose_product(B, d, model, local);
            for (int s = 0; s < global_pomdp.num_states(); ++s) worst = std::max(worst, std::abs(prod[s] - exact[s]));
        }
        if (worst > 1e-8) {
            r.fail(fmt("sequence %d: max |prod - exact| = %.3e", seq, worst));
            return r;
        }
    }
    r.note(fmt("max |prod_k b_k(s) - exact posterior(s)| = %.3e over %d sequences (len <= %d)", worst, sequences,
               max_len));
    return r;
}

VerifyResult verify_theorem_lowerbound(PolicyCache& cache, ObservationParams obs, RewardParams rew, int episodes,
                                       uint64_t seed, int workers) {
    VerifyResult r;
    const MarketModel model(2, 8, obs, rew);  // W = 10
    DecompositionConfig dc{1, 5, 1, mix_seed(seed, 0x7468656fULL)};

    SubPomdp shape;
    shape.sellers.resize(1);
    shape.advisors.resize(4);
    const MarketModel local(1, 4, obs, rew);
    const EnumeratedPomdp local_pomdp(local);
    SolverOptions sopt;
    const auto vf = cache.load_or_solve(policy_cache_key(shape, model), local_pomdp, sopt);

    MopeContext ctx(model, dc, Aggregator::ParallelMaxQ, Hierarchy::H3, BeliefMode::Parallel, vf);
    if (!ctx.decomposition.non_overlapping()) {
        r.fail("decomposition is not disjoint");
        return r;
    }
    const double v_star = vf->value(local_pomdp.uniform_belief());

    // true initial distribution factored and uniform: every quality bit is a
    // fair coin, matching the SPs' uniform initial beliefs
    PopulationConfig pop;
    pop.pct_good_sellers = 0.5;
    pop.pct_untrustworthy = 0.5;

    const int n = episodes;
    std::vector<double> values(n, 0.0);
    int nworkers = workers > 0 ? workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    nworkers = std::min(nworkers, n);
    auto body = [&](int tid) {
        MopePolicy policy(ctx);
        for (int i = tid; i < n; i += nworkers) {
            const uint64_t es = mix_seed(seed, 0x657073ULL, static_cast<uint64_t>(i));
            const GroundTruth gt = sample_ground_truth(model, pop, mix_seed(es, 0x6774ULL));
            const EpisodeResult res =
                run_episode(policy, model, gt, 100, es, RewardScope::VotingSp, &ctx.decomposition);
            values[i] = res.discounted_value;
        }
    };
    if (nworkers <= 1) {
        body(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nworkers; ++t) pool.emplace_back(body, t);
        for (auto& th : pool) th.join();
    }

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / (n - 1)) / std::sqrt(static_cast<double>(n));

    r.note(fmt("V_pmq = %.3f +/- %.3f (se), best SingleExpert V* = %.3f, episodes = %d", mean, se, v_star, n));
    if (mean < v_star - 2.0 * se) r.fail(fmt("V_pmq %.3f < V* - 2se = %.3f", mean, v_star - 2.0 * se));
    return r;
}

}  // namespace mope
