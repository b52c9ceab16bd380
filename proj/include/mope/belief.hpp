#pragma once

#include <array>
#include <span>
#include <vector>

#include "mope/decomposition.hpp"
#include "mope/enumerated_pomdp.hpp"

namespace mope {

// Dense distribution over the enumerated states of some scope (global model
// or one sub-POMDP).
using JointBelief = std::vector<double>;

// Belief under a probability smaller than this is treated as impossible
// evidence and aborts the episode instead of being renormalized silently.
constexpr double kEvidenceFloor = 1e-12;

// Fully factored belief: one marginal per state factor.
struct FactoredBelief {
    std::vector<double> q_high;          // per seller, P(q_j = high)
    std::vector<double> u_trustworthy;   // per advisor, P(u_i = trustworthy)
    std::array<double, kNumSat> sat{};   // P(sat = .)

    static FactoredBelief uniform(const MarketModel& model);
    double active_mass() const { return sat[static_cast<int>(Sat::NotStarted)]; }
};

// Bayes posterior on the full joint; throws ImpossibleEvidence when
// p(o | b, a) vanishes.
JointBelief exact_update(const EnumeratedPomdp& pomdp, const JointBelief& b, int action, Obs o);

// Factored Frontier step: the exact posterior is formed over only the factor
// pair the observation touches (starting from the product of their current
// marginals) and projected back to marginals; untouched marginals pass
// through. Exact for one step from any fully factored prior.
FactoredBelief ff_update(const MarketModel& model, const FactoredBelief& fb, const Action& a, Obs o);

// p(o | fb, a) under the factored approximation.
double ff_obs_prob(const MarketModel& model, const FactoredBelief& fb, const Action& a, Obs o);

// Local belief of one SP: product of the SP's factor marginals.
JointBelief extract_local(const FactoredBelief& fb, const SubPomdp& sp, const MarketModel& local);

// Local belief of one SP from a global joint: exact marginalization onto the
// SP's factors.
JointBelief extract_local(const JointBelief& global_b, const MarketModel& global, const SubPomdp& sp,
                          const MarketModel& local);

// One local belief per SP (Parallel Max-Q's global belief).
struct LocalBeliefSet {
    std::vector<JointBelief> beliefs;
};

LocalBeliefSet uniform_local_beliefs(const Decomposition& d, const EnumeratedPomdp& shared_local);

// Updates b_k for every SP containing the executed action; other local
// beliefs are left untouched.
void parallel_update(LocalBeliefSet& B, int global_action, Obs o, const Decomposition& d, const MarketModel& global,
                     const MarketModel& local, const EnumeratedPomdp& local_pomdp);

// Compose the product distribution Prod_k b_k(s_k) over global states (the
// Appendix-style equivalence subject; meaningful for non-overlapping
// decompositions that cover every agent).
JointBelief compose_product(const LocalBeliefSet& B, const Decomposition& d, const MarketModel& global,
                            const MarketModel& local);

}  // namespace mope
