#pragma once

#include <string>
#include <vector>

#include "mope/policy_cache.hpp"
#include "mope/types.hpp"

namespace mope {

struct VerifyResult {
    bool passed = true;
    std::vector<std::string> lines;  // quantitative evidence / counterexamples

    void note(const std::string& s) { lines.push_back(s); }
    void fail(const std::string& s) {
        passed = false;
        lines.push_back("FAIL: " + s);
    }
};

// Action-count table: |A| for W in {6..10, 25, 50, 75, 100} with
// n_s = round(0.2 W). Zero tolerance.
VerifyResult verify_table1();

// One-step Factored Frontier exactness: from any fully factored prior the FF
// marginals match the exact posterior marginals (<= 1e-9) for every legal
// (action, observation) pair, at every W <= 8.
VerifyResult verify_ff_onestep(ObservationParams obs = {}, RewardParams rew = {}, int trials_per_w = 20,
                               uint64_t seed = 7);

// Belief equivalence under a non-overlapping decomposition (W = 10, two
// disjoint 5-agent SPs, factored uniform prior): the product of local beliefs
// tracks the exact joint posterior (<= 1e-8) along random in-decomposition
// query/observation sequences.
VerifyResult verify_lemma_beliefs(ObservationParams obs = {}, RewardParams rew = {}, int sequences = 1000,
                                  int max_len = 10, uint64_t seed = 11);

// Monte-Carlo lower bound: with the same non-overlapping setting and a
// uniform true state distribution, the value realized by Parallel Max-Q
// (winning-SP reward accounting) is at least the best SingleExpert value
// minus two standard errors.
VerifyResult verify_theorem_lowerbound(PolicyCache& cache, ObservationParams obs = {}, RewardParams rew = {},
                                       int episodes = 5000, uint64_t seed = 13, int workers = 0);

}  // namespace mope
