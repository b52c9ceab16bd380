#include "mope/experiment.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

namespace mope {

namespace {

struct Stats {
    double mean = 0.0;
    double ci = 0.0;
    int n = 0;
};

Stats summarize(const std::vector<double>& xs) {
    Stats st;
    for (double x : xs)
        if (!std::isnan(x)) {
            st.mean += x;
            ++st.n;
        }
    if (st.n == 0) return st;
    st.mean /= st.n;
    double ss = 0.0;
    for (double x : xs)
        if (!std::isnan(x)) ss += (x - st.mean) * (x - st.mean);
    if (st.n > 1) st.ci = 1.96 * std::sqrt(ss / (st.n - 1)) / std::sqrt(static_cast<double>(st.n));
    return st;
}

int worker_count(const ExperimentConfig& cfg) {
    if (cfg.workers > 0) return cfg.workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

std::string solve_key(const MethodSpec& m, const MarketModel& model) {
    SubPomdp shape;
    shape.sellers.resize(m.sellers_per_sp);
    shape.advisors.resize(m.aps - m.sellers_per_sp);
    return policy_cache_key(shape, model);
}

// Runs `episodes` independent seeded episodes of `make_policy()` and fills a
// CellResult; episode i's outcome lands in slot i regardless of scheduling.
template <typename MakePolicy>
void run_episode_grid(CellResult& cell, const ExperimentConfig& cfg, const MarketModel& model,
                      const PopulationConfig& pop, MakePolicy&& make_policy, RewardScope scope,
                      const Decomposition* decomp) {
    const int n = cfg.episodes;
    std::vector<double> values(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> errors(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<uint8_t> forced(n, 0);

    const int workers = std::min(worker_count(cfg), n);
    auto body = [&](int tid) {
        auto policy = make_policy();
        for (int i = tid; i < n; i += workers) {
            const uint64_t seed = episode_seed(cfg.seed, cell.W, i);
            const GroundTruth gt = sample_ground_truth(model, pop, mix_seed(seed, 0x6774ULL));
            const EpisodeResult res = run_episode(*policy, model, gt, cfg.max_steps, seed, scope, decomp);
            if (!res.aborted) {
                values[i] = res.discounted_value;
                errors[i] = res.error_flag ? 1.0 : 0.0;
            }
            forced[i] = res.forced_dnb;
        }
    };
    if (workers <= 1) {
        body(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t) pool.emplace_back(body, t);
        for (auto& th : pool) th.join();
    }

    cell.requested = n;
    const Stats sv = summarize(values);
    const Stats se = summarize(errors);
    cell.completed = sv.n;
    cell.aborted = n - sv.n;
    for (uint8_t f : forced) cell.forced_dnb += f;
    cell.mean_value = sv.mean;
    cell.ci_value = sv.ci;
    cell.mean_error = se.mean;
    cell.ci_error = se.ci;
    cell.episode_values = std::move(values);
    cell.episode_errors = std::move(errors);
}

}  // namespace

uint64_t episode_seed(uint64_t master, int W, int episode) {
    return mix_seed(master, static_cast<uint64_t>(W), static_cast<uint64_t>(episode));
}

double compute_v_qmdp(const MarketModel& model) {
    const auto& rp = model.reward_params();
    const int n_s = model.num_sellers();
    const int n_a = model.num_advisors();
    // Every active state has a one-step action worth reward_success under full
    // observability (buy a high seller, else DoNotBuy), so V_MDP == R_success
    // and the query Q-values are cost + discounted success.
    double best = -std::numeric_limits<double>::infinity();
    if (n_a >= 2) best = std::max(best, -rp.cost_advisor_query + rp.discount * rp.reward_success);
    if (n_a >= 1 && n_s >= 1) best = std::max(best, -rp.cost_seller_query + rp.discount * rp.reward_success);
    if (n_s >= 1) best = std::max(best, 0.5 * (rp.reward_success + rp.penalty_failure));
    const double p_all_low = std::pow(0.5, n_s);
    best = std::max(best, p_all_low * rp.reward_success + (1.0 - p_all_low) * rp.penalty_failure);
    return best;
}

CellResult run_cell(const ExperimentConfig& cfg, int W, const MethodSpec& method, PolicyCache& cache,
                    bool keep_episodes) {
    CellResult cell;
    cell.W = W;
    cell.method = method;
    const auto t0 = std::chrono::steady_clock::now();

    const int n_s = sellers_for(W, cfg.population.pct_sellers);
    const MarketModel model(n_s, W - n_s, cfg.obs, cfg.rew);

    if (method.kind == MethodSpec::Kind::VQmdp) {
        cell.mean_value = compute_v_qmdp(model);
        cell.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return cell;
    }

    PopulationConfig pop = cfg.population;
    if (method.kind == MethodSpec::Kind::VMaxv) {
        pop.pct_good_sellers = 1.0;  // ideal populations
        pop.pct_untrustworthy = 0.0;
    }

    const int advisors_per_sp = method.aps - method.sellers_per_sp;
    if (method.sellers_per_sp > n_s || advisors_per_sp > W - n_s) {
        cell.skipped = true;
        cell.skip_reason = "composition infeasible at this W";
        return cell;
    }
    if (method.kind == MethodSpec::Kind::Mope && method.belief_mode == BeliefMode::Exact &&
        model.num_states() > kDefaultStateCap) {
        cell.skipped = true;
        cell.skip_reason = "exact beliefs infeasible: " + std::to_string(model.num_states()) + " states";
        return cell;
    }

    SubPomdp shape;
    shape.sellers.resize(method.sellers_per_sp);
    shape.advisors.resize(advisors_per_sp);
    const MarketModel local(method.sellers_per_sp, advisors_per_sp, cfg.obs, cfg.rew);
    const EnumeratedPomdp local_pomdp(local);
    const auto vf = cache.load_or_solve(policy_cache_key(shape, model), local_pomdp, cfg.solver);

    if (method.kind == MethodSpec::Kind::SingleExpert) {
        SingleExpertContext ctx(model, method.sellers_per_sp, advisors_per_sp, vf);
        run_episode_grid(cell, cfg, model, pop, [&] { return std::make_unique<SingleExpertPolicy>(ctx); },
                         RewardScope::Global, nullptr);
    } else {
        DecompositionConfig dc{method.spa, method.aps, method.sellers_per_sp, mix_seed(cfg.seed, W, 0x646563ULL)};
        if (method.kind == MethodSpec::Kind::VMaxv) dc.spa = 8;
        const Aggregator agg = method.kind == MethodSpec::Kind::VMaxv ? Aggregator::Majority : method.aggregator;
        const Hierarchy hier = method.kind == MethodSpec::Kind::VMaxv ? Hierarchy::H3 : method.hierarchy;
        const BeliefMode mode = method.kind == MethodSpec::Kind::VMaxv ? BeliefMode::FF : method.belief_mode;
        MopeContext ctx(model, dc, agg, hier, mode, vf);
        run_episode_grid(cell, cfg, model, pop, [&] { return std::make_unique<MopePolicy>(ctx); },
                         RewardScope::Global, &ctx.decomposition);
    }

    if (!keep_episodes) {
        cell.episode_values.clear();
        cell.episode_errors.clear();
    }
    cell.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return cell;
}

int prepare_policies(const ExperimentConfig& cfg, PolicyCache& cache) {
    const int before = cache.solves_performed();
    for (const auto& m : cfg.methods) {
        if (m.kind == MethodSpec::Kind::VQmdp) continue;
        const MarketModel probe(1, 1, cfg.obs, cfg.rew);  // params only; key ignores W
        const MarketModel local(m.sellers_per_sp, m.aps - m.sellers_per_sp, cfg.obs, cfg.rew);
        cache.load_or_solve(solve_key(m, probe), EnumeratedPomdp(local), cfg.solver);
    }
    return cache.solves_performed() - before;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, PolicyCache& cache, bool keep_episodes) {
    cfg.validate();
    ExperimentReport report;
    report.config = cfg;
    for (const int W : cfg.W)
        for (const auto& m : cfg.methods) report.cells.push_back(run_cell(cfg, W, m, cache, keep_episodes));
    return report;
}

CellResult compute_v_maxv(const ExperimentConfig& cfg, int W, PolicyCache& cache, bool keep_episodes) {
    MethodSpec m;
    m.kind = MethodSpec::Kind::VMaxv;
    m.spa = 8;
    return run_cell(cfg, W, m, cache, keep_episodes);
}

void write_csv(const ExperimentReport& report, std::ostream& out) {
    out << "W,method,aggregator,hierarchy,spa,aps,belief_mode,mean_error,mean_value,ci_error,ci_value,episodes,seed,"
           "wallclock_s\n";
    char buf[512];
    for (const auto& c : report.cells) {
        if (c.skipped) continue;
        const auto& m = c.method;
        const bool mope_like = m.kind == MethodSpec::Kind::Mope || m.kind == MethodSpec::Kind::VMaxv;
        std::snprintf(buf, sizeof(buf), "%d,%s,%s,%s,%d,%d,%s,%.6f,%.6f,%.6f,%.6f,%d,%llu,%.3f\n", c.W,
                      m.label().c_str(), mope_like ? aggregator_name(m.kind == MethodSpec::Kind::VMaxv ? Aggregator::Majority : m.aggregator) : "-",
                      mope_like ? hierarchy_name(m.kind == MethodSpec::Kind::VMaxv ? Hierarchy::H3 : m.hierarchy) : "-",
                      mope_like ? (m.kind == MethodSpec::Kind::VMaxv ? 8 : m.spa) : 0, m.aps,
                      mope_like ? belief_mode_name(m.kind == MethodSpec::Kind::VMaxv ? BeliefMode::FF : m.belief_mode)
                                : (m.kind == MethodSpec::Kind::SingleExpert ? "exact" : "-"),
                      c.mean_error, c.mean_value, c.ci_error, c.ci_value, c.completed,
                      static_cast<unsigned long long>(report.config.seed), c.wallclock_s);
        out << buf;
    }
}

void write_manifest(const ExperimentReport& report, std::ostream& out) {
    nlohmann::json j;
    j["config"] = config_to_json(report.config);
    auto& cells = j["cells"] = nlohmann::json::array();
    for (const auto& c : report.cells) {
        nlohmann::json jc;
        jc["W"] = c.W;
        jc["method"] = c.method.label();
        jc["requested"] = c.requested;
        jc["completed"] = c.completed;
        jc["aborted"] = c.aborted;
        jc["forced_dnb"] = c.forced_dnb;
        jc["mean_error"] = c.mean_error;
        jc["mean_value"] = c.mean_value;
        jc["ci_error"] = c.ci_error;
        jc["ci_value"] = c.ci_value;
        jc["wallclock_s"] = c.wallclock_s;
        if (c.skipped) jc["skipped"] = c.skip_reason;
        cells.push_back(std::move(jc));
    }
    out << j.dump(2) << "\n";
}

}  // namespace mope
