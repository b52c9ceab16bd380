#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mope/config.hpp"
#include "mope/policy_cache.hpp"
#include "mope/simulator.hpp"

namespace mope {

struct CellResult {
    int W = 0;
    MethodSpec method;
    int requested = 0;
    int completed = 0;   // episodes that reached a terminal action
    int aborted = 0;     // impossible-evidence episodes, excluded from means
    int forced_dnb = 0;  // episodes that hit the step cap
    double mean_error = 0.0;
    double mean_value = 0.0;
    double ci_error = 0.0;  // 95% half-widths
    double ci_value = 0.0;
    double wallclock_s = 0.0;
    bool skipped = false;
    std::string skip_reason;
    // per-episode outcomes in episode order (completed episodes keep their
    // slot; aborted ones are NaN) so callers can run paired tests
    std::vector<double> episode_values;
    std::vector<double> episode_errors;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<CellResult> cells;
};

// Episode seeds depend only on (master seed, W, episode index), so methods
// sharing a config are paired through common ground truths and observation
// streams.
uint64_t episode_seed(uint64_t master, int W, int episode);

CellResult run_cell(const ExperimentConfig& cfg, int W, const MethodSpec& method, PolicyCache& cache,
                    bool keep_episodes = false);

ExperimentReport run_experiment(const ExperimentConfig& cfg, PolicyCache& cache, bool keep_episodes = false);

// Mean discounted value of MOPE (majority voting, H3, SPA=8) on ideal
// populations (every seller high, every advisor trustworthy) at this W.
CellResult compute_v_maxv(const ExperimentConfig& cfg, int W, PolicyCache& cache, bool keep_episodes = false);

// QMDP upper bound at the uniform initial belief, computed analytically from
// the static-factor structure (the underlying-MDP value of every active state
// is one success reward).
double compute_v_qmdp(const MarketModel& model);

void write_csv(const ExperimentReport& report, std::ostream& out);
void write_manifest(const ExperimentReport& report, std::ostream& out);

// Solve (or load) every value function the config's cells need; returns the
// number of fresh solves.
int prepare_policies(const ExperimentConfig& cfg, PolicyCache& cache);

}  // namespace mope
