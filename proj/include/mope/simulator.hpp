#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "mope/aggregation.hpp"
#include "mope/belief.hpp"
#include "mope/decomposition.hpp"
#include "mope/solver.hpp"

namespace mope {

// True (hidden) qualities of the whole population.
struct GroundTruth {
    std::vector<uint8_t> seller_high;
    std::vector<uint8_t> advisor_trustworthy;

    uint32_t quality_mask(const MarketModel& model) const;
    bool any_seller_high() const;
};

struct PopulationConfig {
    double pct_sellers = 0.2;
    double pct_untrustworthy = 0.2;
    double pct_good_sellers = 0.5;
};

inline int sellers_for(int W, double pct_sellers = 0.2) {
    return static_cast<int>(std::lround(pct_sellers * W));
}

// Model of W agents (n_s = round(pct_sellers * W)) plus a sampled ground
// truth; deterministic given seed.
std::pair<MarketModel, GroundTruth> generate_market(int W, const PopulationConfig& pop, ObservationParams obs,
                                                    RewardParams rew, uint64_t seed);
GroundTruth sample_ground_truth(const MarketModel& model, const PopulationConfig& pop, uint64_t seed);

// One observation drawn from the model's observation distribution at the true
// state.
Obs sample_observation(const MarketModel& model, const GroundTruth& gt, const Action& a, Rng& rng);

// --- policies -------------------------------------------------------------

struct PolicyDecision {
    int action = -1;
    int winning_sp = -1;  // set by the Max-Q family (the vote that won)
};

// Episode-scoped decision maker: reset to uniform beliefs, alternate
// decide/observe until a terminal action.
class Policy {
  public:
    virtual ~Policy() = default;
    virtual void reset(uint64_t episode_seed) = 0;
    virtual PolicyDecision decide() = 0;
    virtual void observe(int global_action, Obs o) = 0;  // may throw ImpossibleEvidence
};

enum class Aggregator { Majority, MaxQ, ParallelMaxQ };
enum class BeliefMode { Exact, FF, Parallel };

inline const char* aggregator_name(Aggregator a) {
    return a == Aggregator::Majority ? "majority" : a == Aggregator::MaxQ ? "maxq" : "pmq";
}
inline const char* belief_mode_name(BeliefMode m) {
    return m == BeliefMode::Exact ? "exact" : m == BeliefMode::FF ? "ff" : "parallel";
}

// Everything shared across episodes of one MOPE configuration: the global
// model, the decomposition, the single projected sub-POMDP all SPs share
// (uniform composition) and its solved value function.
struct MopeContext {
    MopeContext(const MarketModel& global, DecompositionConfig decomp_cfg, Aggregator agg, Hierarchy hierarchy,
                BeliefMode mode, std::shared_ptr<const ValueFunction> vf, int state_cap = kDefaultStateCap);

    const MarketModel& global;
    Aggregator aggregator;
    Hierarchy hierarchy;
    BeliefMode belief_mode;
    Decomposition decomposition;
    MarketModel local;
    EnumeratedPomdp local_pomdp;
    std::shared_ptr<const ValueFunction> vf;
    std::optional<EnumeratedPomdp> global_pomdp;  // exact belief mode only
};

class MopePolicy : public Policy {
  public:
    explicit MopePolicy(const MopeContext& ctx) : ctx_(ctx) {}

    void reset(uint64_t episode_seed) override;
    PolicyDecision decide() override;
    void observe(int global_action, Obs o) override;

    // optional sink for majority-voting decision records
    void set_decision_log(std::vector<MajorityDecision>* sink) { decision_log_ = sink; }
    const std::vector<Vote>& last_votes() const { return votes_; }

  private:
    const MopeContext& ctx_;
    Rng rng_{0};
    JointBelief exact_b_;
    FactoredBelief ff_b_;
    LocalBeliefSet parallel_b_;
    std::vector<Vote> votes_;
    QWorkspace ws_;
    std::vector<MajorityDecision>* decision_log_ = nullptr;
};

// Shared immutable state for the SingleExpert baseline: the expert SP is
// re-drawn per episode, its solve is shared (uniform composition).
struct SingleExpertContext {
    SingleExpertContext(const MarketModel& global, int sellers_per_sp, int advisors_per_sp,
                        std::shared_ptr<const ValueFunction> vf);

    const MarketModel& global;
    int sellers_per_sp;
    int advisors_per_sp;
    MarketModel local;
    EnumeratedPomdp local_pomdp;
    std::shared_ptr<const ValueFunction> vf;
};

class SingleExpertPolicy : public Policy {
  public:
    explicit SingleExpertPolicy(const SingleExpertContext& ctx) : ctx_(ctx) {}

    void reset(uint64_t episode_seed) override;
    PolicyDecision decide() override;
    void observe(int global_action, Obs o) override;

    const SubPomdp& expert() const { return sp_; }

  private:
    const SingleExpertContext& ctx_;
    SubPomdp sp_;
    JointBelief belief_;
    QWorkspace ws_;
};

// --- episodes ---------------------------------------------------------------

// How step rewards are scored against the ground truth. Global evaluates
// DoNotBuy against every seller in W; VotingSp evaluates it against the
// winning SP's own sellers (the accounting used in the Parallel Max-Q
// analysis).
enum class RewardScope { Global, VotingSp };

struct StepRecord {
    int action = -1;
    Obs obs = Obs::None;
    double reward = 0.0;
    int winning_sp = -1;
};

struct EpisodeResult {
    double discounted_value = 0.0;
    bool error_flag = false;
    bool aborted = false;     // impossible evidence; excluded from means
    bool forced_dnb = false;  // step cap reached
    int steps = 0;
    int terminal_action = -1;
    std::vector<StepRecord> trace;
};

double reward_at_ground_truth(const MarketModel& model, const GroundTruth& gt, const Action& a,
                              const std::vector<int>* scope_sellers);

EpisodeResult run_episode(Policy& policy, const MarketModel& model, const GroundTruth& gt, int max_steps,
                          uint64_t episode_seed, RewardScope scope = RewardScope::Global,
                          const Decomposition* decomposition = nullptr, bool keep_trace = false);

}  // namespace mope
