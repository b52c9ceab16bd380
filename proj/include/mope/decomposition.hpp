#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mope/enumerated_pomdp.hpp"
#include "mope/market_model.hpp"

namespace mope {

struct DecompositionConfig {
    int spa = 4;             // sub-POMDPs each agent belongs to
    int aps = 5;             // agents per sub-POMDP
    int sellers_per_sp = 1;  // composition; advisors_per_sp = aps - sellers_per_sp
    uint64_t seed = 0;

    int advisors_per_sp() const { return aps - sellers_per_sp; }

    void validate() const {
        if (spa < 1) throw std::invalid_argument("spa must be >= 1");
        if (aps < 2) throw std::invalid_argument("aps must be >= 2");
        if (sellers_per_sp < 1 || sellers_per_sp >= aps)
            throw std::invalid_argument("composition must include at least one seller and one advisor slot short of aps");
    }
};

// Membership of one sub-POMDP: global agent indices, sorted. Local seller k
// is sellers[k], local advisor k is advisors[k].
struct SubPomdp {
    std::vector<int> sellers;
    std::vector<int> advisors;

    bool contains_seller(int j) const;
    bool contains_advisor(int i) const;
    // local index of a global agent, -1 if absent
    int local_seller(int j) const;
    int local_advisor(int i) const;
    // true iff every agent referenced by the (global) action is a member
    bool contains_action(const Action& a) const;
};

struct Decomposition {
    std::vector<SubPomdp> sps;

    int size() const { return static_cast<int>(sps.size()); }
    // number of SPs each agent appears in
    std::vector<int> seller_membership(int n_s) const;
    std::vector<int> advisor_membership(int n_a) const;
    // no seller or advisor shared between two SPs
    bool non_overlapping() const;
};

// K = ceil(W * spa / aps) sub-POMDPs matching the composition template, with
// per-role memberships balanced within +/-1 of each other. Deterministic
// given cfg.seed.
Decomposition build_decomposition(const MarketModel& model, const DecompositionConfig& cfg);

// The local SALE POMDP over the SP's members (same parameters); DoNotBuy is
// rewarded relative to the SP's own sellers.
MarketModel local_model(const MarketModel& global, const SubPomdp& sp);

// Flat enumeration of the local model.
EnumeratedPomdp project_subpomdp(const MarketModel& global, const SubPomdp& sp, int state_cap = kDefaultStateCap);

// Map a local action index to the global action index (and back; -1 when the
// global action is not in the SP).
int local_to_global_action(const MarketModel& global, const SubPomdp& sp, const MarketModel& local, int local_action);
int global_to_local_action(const MarketModel& global, const SubPomdp& sp, const MarketModel& local, int global_action);

// SPs with the same composition and model parameters share one solve.
std::string policy_cache_key(const SubPomdp& sp, const MarketModel& model);

}  // namespace mope
