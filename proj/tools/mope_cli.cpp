#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mope/experiment.hpp"
#include "mope/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitPropertyViolation = 2;
constexpr int kExitConfigError = 3;

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string cache_dir;
    uint64_t seed = 0;
    int episodes = 0;
    int workers = -1;
    bool have_seed = false, have_episodes = false, have_workers = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "experiment config file (JSON)");
    cmd->add_option("--out-dir", f.out_dir, "output directory");
    cmd->add_option("--cache-dir", f.cache_dir, "policy cache directory");
    cmd->add_option("--seed", f.seed, "master seed")->each([&](const std::string&) { f.have_seed = true; });
    cmd->add_option("--episodes", f.episodes, "episodes per cell")->each([&](const std::string&) { f.have_episodes = true; });
    cmd->add_option("--workers", f.workers, "worker threads (0 = hardware)")->each([&](const std::string&) { f.have_workers = true; });
}

// precedence: flag > MOPE_CACHE_DIR > config value
mope::ExperimentConfig resolve_config(const CommonFlags& f, bool require_file) {
    mope::ExperimentConfig cfg;
    if (!f.config_path.empty()) {
        cfg = mope::load_config_file(f.config_path);
    } else if (require_file) {
        throw std::invalid_argument("--config is required for this command");
    }
    if (const char* env = std::getenv("MOPE_CACHE_DIR"); env && *env) cfg.cache_dir = env;
    if (!f.cache_dir.empty()) cfg.cache_dir = f.cache_dir;
    if (!f.out_dir.empty()) cfg.out_dir = f.out_dir;
    if (f.have_seed) cfg.seed = f.seed;
    if (f.have_episodes) cfg.episodes = f.episodes;
    if (f.have_workers) cfg.workers = f.workers;
    cfg.validate();
    return cfg;
}

int cmd_solve(const CommonFlags& flags) {
    const auto cfg = resolve_config(flags, true);
    mope::PolicyCache cache(cfg.cache_dir);
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& m : cfg.methods) {
        if (m.kind == mope::MethodSpec::Kind::VQmdp) continue;
        mope::SubPomdp shape;
        shape.sellers.resize(m.sellers_per_sp);
        shape.advisors.resize(m.aps - m.sellers_per_sp);
        const mope::MarketModel local(m.sellers_per_sp, m.aps - m.sellers_per_sp, cfg.obs, cfg.rew);
        const std::string key = mope::policy_cache_key(shape, local);
        const bool hit = cache.contains(key);
        const auto ts = std::chrono::steady_clock::now();
        const auto vf = cache.load_or_solve(key, mope::EnumeratedPomdp(local), cfg.solver);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - ts).count();
        std::cout << (hit ? "cached " : "solved ") << key << ": " << vf->vectors.size() << " vectors, "
                  << vf->iterations << " iterations, residual " << vf->residual << (vf->converged ? "" : " (max_iter)")
                  << ", " << secs << "s\n";
    }
    std::cout << "total solves this run: " << cache.solves_performed() << " ("
              << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << "s)\n";
    return kExitOk;
}

// JSON-lines trace of one instrumented episode per majority-voting cell: per
// step all votes, abstract tallies, the chosen path and (for FF beliefs) the
// seller marginals.
void dump_decision_log(const mope::ExperimentConfig& cfg, mope::PolicyCache& cache, const std::string& path) {
    std::ofstream out(path);
    for (const int W : cfg.W) {
        for (const auto& m : cfg.methods) {
            if (m.kind != mope::MethodSpec::Kind::Mope || m.aggregator != mope::Aggregator::Majority) continue;
            const int n_s = mope::sellers_for(W, cfg.population.pct_sellers);
            const mope::MarketModel model(n_s, W - n_s, cfg.obs, cfg.rew);
            if (m.sellers_per_sp > n_s || m.aps - m.sellers_per_sp > W - n_s) continue;
            mope::SubPomdp shape;
            shape.sellers.resize(m.sellers_per_sp);
            shape.advisors.resize(m.aps - m.sellers_per_sp);
            const mope::MarketModel local(m.sellers_per_sp, m.aps - m.sellers_per_sp, cfg.obs, cfg.rew);
            const auto vf = cache.load_or_solve(mope::policy_cache_key(shape, model), mope::EnumeratedPomdp(local),
                                                cfg.solver);
            mope::DecompositionConfig dc{m.spa, m.aps, m.sellers_per_sp, mope::mix_seed(cfg.seed, W, 0x646563ULL)};
            mope::MopeContext ctx(model, dc, m.aggregator, m.hierarchy, m.belief_mode, vf);
            mope::MopePolicy policy(ctx);
            std::vector<mope::MajorityDecision> decisions;
            policy.set_decision_log(&decisions);
            const uint64_t es = mope::episode_seed(cfg.seed, W, 0);
            const mope::GroundTruth gt =
                mope::sample_ground_truth(model, cfg.population, mope::mix_seed(es, 0x6774ULL));
            const mope::EpisodeResult res = mope::run_episode(policy, model, gt, cfg.max_steps, es,
                                                              mope::RewardScope::Global, nullptr, true);
            for (size_t t = 0; t < decisions.size(); ++t) {
                nlohmann::json j;
                j["W"] = W;
                j["method"] = m.label();
                j["step"] = t;
                auto& votes = j["votes"] = nlohmann::json::array();
                for (const auto& [a, e] : decisions[t].tally.concrete)
                    votes.push_back({{"action", model.action(a).str()}, {"count", e.count}, {"qsum", e.qsum}});
                auto& tall = j["abstract_tallies"] = nlohmann::json::array();
                for (const auto& [aa, e] : decisions[t].tally.abstract)
                    tall.push_back({{"level", aa.level}, {"pattern", aa.str()}, {"count", e.count}, {"qsum", e.qsum}});
                auto& path = j["path"] = nlohmann::json::array();
                for (const auto& aa : decisions[t].path) path.push_back(aa.str());
                j["chosen"] = model.action(decisions[t].action).str();
                j["fallback"] = decisions[t].fallback;
                if (t < res.trace.size()) {
                    j["executed"] = model.action(res.trace[t].action).str();
                    j["obs"] = mope::obs_name(res.trace[t].obs);
                    j["reward"] = res.trace[t].reward;
                }
                out << j.dump() << "\n";
            }
        }
    }
}

int cmd_run(const CommonFlags& flags, const std::string& decision_log) {
    const auto cfg = resolve_config(flags, true);
    mope::PolicyCache cache(cfg.cache_dir);
    const auto report = mope::run_experiment(cfg, cache);

    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ofstream csv(std::filesystem::path(cfg.out_dir) / "results.csv");
        mope::write_csv(report, csv);
    }
    {
        std::ofstream mf(std::filesystem::path(cfg.out_dir) / "manifest.json");
        mope::write_manifest(report, mf);
    }
    if (!decision_log.empty()) dump_decision_log(cfg, cache, decision_log);

    int ran = 0;
    for (const auto& c : report.cells) {
        if (c.skipped) {
            std::cout << "skipped W=" << c.W << " " << c.method.label() << ": " << c.skip_reason << "\n";
        } else {
            ++ran;
            std::cout << "W=" << c.W << " " << c.method.label() << ": value " << c.mean_value << " +/- " << c.ci_value
                      << ", error " << c.mean_error << " +/- " << c.ci_error << " (" << c.completed << " episodes, "
                      << c.wallclock_s << "s)\n";
        }
    }
    std::cout << "wrote " << cfg.out_dir << "/results.csv and manifest.json\n";
    return ran > 0 ? kExitOk : kExitRunFailure;
}

// grid expansion: sweep lists crossed into one method list
int cmd_sweep(const CommonFlags& flags, const std::vector<int>& spa_list, const std::vector<int>& aps_list,
              const std::vector<std::string>& hierarchies, const std::vector<std::string>& belief_modes,
              const std::vector<std::string>& aggregators, bool with_single_expert) {
    auto cfg = resolve_config(flags, true);
    const auto base = cfg.methods.empty() ? mope::MethodSpec{} : cfg.methods.front();
    std::vector<mope::MethodSpec> methods;
    const auto spas = spa_list.empty() ? std::vector<int>{base.spa} : spa_list;
    const auto apss = aps_list.empty() ? std::vector<int>{base.aps} : aps_list;
    const auto hiers = hierarchies.empty() ? std::vector<std::string>{mope::hierarchy_name(base.hierarchy)} : hierarchies;
    const auto modes = belief_modes.empty() ? std::vector<std::string>{mope::belief_mode_name(base.belief_mode)} : belief_modes;
    const auto aggs = aggregators.empty() ? std::vector<std::string>{mope::aggregator_name(base.aggregator)} : aggregators;
    for (int spa : spas)
        for (int aps : apss)
            for (const auto& h : hiers)
                for (const auto& mode : modes)
                    for (const auto& agg : aggs) {
                        mope::MethodSpec m = base;
                        m.kind = mope::MethodSpec::Kind::Mope;
                        m.spa = spa;
                        m.aps = aps;
                        m.sellers_per_sp = base.sellers_per_sp;
                        m.hierarchy = mope::parse_hierarchy(h);
                        m.belief_mode = mope::parse_belief_mode(mode);
                        m.aggregator = mope::parse_aggregator(agg);
                        methods.push_back(m);
                    }
    if (with_single_expert) {
        mope::MethodSpec se;
        se.kind = mope::MethodSpec::Kind::SingleExpert;
        se.aps = apss.front();
        se.sellers_per_sp = base.sellers_per_sp;
        methods.push_back(se);
    }
    cfg.methods = std::move(methods);
    cfg.validate();

    mope::PolicyCache cache(cfg.cache_dir);
    const auto report = mope::run_experiment(cfg, cache);
    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ofstream csv(std::filesystem::path(cfg.out_dir) / "results.csv");
        mope::write_csv(report, csv);
    }
    {
        std::ofstream mf(std::filesystem::path(cfg.out_dir) / "manifest.json");
        mope::write_manifest(report, mf);
    }
    int ran = 0;
    for (const auto& c : report.cells)
        if (!c.skipped) ++ran;
    std::cout << "swept " << report.cells.size() << " cells (" << ran << " ran); wrote " << cfg.out_dir
              << "/results.csv\n";
    return ran > 0 ? kExitOk : kExitRunFailure;
}

int cmd_verify(const CommonFlags& flags, const std::string& suite) {
    mope::ExperimentConfig cfg;
    if (!flags.config_path.empty()) cfg = mope::load_config_file(flags.config_path);
    if (const char* env = std::getenv("MOPE_CACHE_DIR"); env && *env) cfg.cache_dir = env;
    if (!flags.cache_dir.empty()) cfg.cache_dir = flags.cache_dir;
    const uint64_t seed = flags.have_seed ? flags.seed : 7;

    mope::VerifyResult res;
    if (suite == "table1") {
        res = mope::verify_table1();
    } else if (suite == "ff_onestep") {
        res = mope::verify_ff_onestep(cfg.obs, cfg.rew, 20, seed);
    } else if (suite == "lemma_beliefs") {
        res = mope::verify_lemma_beliefs(cfg.obs, cfg.rew, 1000, 10, seed);
    } else if (suite == "theorem_lowerbound") {
        mope::PolicyCache cache(cfg.cache_dir);
        const int episodes = flags.have_episodes ? flags.episodes : 5000;
        res = mope::verify_theorem_lowerbound(cache, cfg.obs, cfg.rew, episodes, seed,
                                              flags.have_workers ? flags.workers : 0);
    } else {
        std::cerr << "unknown suite: " << suite
                  << " (expected table1 | ff_onestep | lemma_beliefs | theorem_lowerbound)\n";
        return kExitConfigError;
    }
    for (const auto& line : res.lines) std::cout << line << "\n";
    std::cout << suite << ": " << (res.passed ? "PASS" : "FAIL") << "\n";
    return res.passed ? kExitOk : kExitPropertyViolation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixture of POMDP Experts for seller selection: solve, simulate, verify"};
    app.require_subcommand(1);

    CommonFlags solve_flags, run_flags, sweep_flags, verify_flags;
    std::string decision_log;
    std::string suite;
    std::vector<int> spa_list, aps_list;
    std::vector<std::string> hierarchies, belief_modes, aggregators;
    bool with_single_expert = false;

    auto* solve = app.add_subcommand("solve", "solve and cache sub-POMDP policies");
    add_common(solve, solve_flags);

    auto* run = app.add_subcommand("run", "run the configured experiment cells");
    add_common(run, run_flags);
    run->add_option("--decision-log", decision_log, "write a JSON-lines majority-voting trace for one episode per cell");

    auto* sweep = app.add_subcommand("sweep", "cross SPA/APS/hierarchy/belief grids into cells and run them");
    add_common(sweep, sweep_flags);
    sweep->add_option("--spa", spa_list, "SPA values");
    sweep->add_option("--aps", aps_list, "APS values");
    sweep->add_option("--hierarchy", hierarchies, "hierarchies (H1 H2 H3)");
    sweep->add_option("--belief-mode", belief_modes, "belief modes (exact ff parallel)");
    sweep->add_option("--aggregator", aggregators, "aggregators (majority maxq pmq)");
    sweep->add_flag("--with-single-expert", with_single_expert, "add a SingleExpert baseline cell");

    auto* verify = app.add_subcommand("verify", "run a property suite");
    add_common(verify, verify_flags);
    verify->add_option("suite", suite, "table1 | ff_onestep | lemma_beliefs | theorem_lowerbound")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(solve_flags);
        if (run->parsed()) return cmd_run(run_flags, decision_log);
        if (sweep->parsed())
            return cmd_sweep(sweep_flags, spa_list, aps_list, hierarchies, belief_modes, aggregators,
                             with_single_expert);
        if (verify->parsed()) return cmd_verify(verify_flags, suite);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRunFailure;
    }
    return kExitConfigError;
}
