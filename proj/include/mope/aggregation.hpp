#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "mope/belief.hpp"
#include "mope/decomposition.hpp"
#include "mope/rng.hpp"
#include "mope/solver.hpp"

namespace mope {

// One sub-POMDP's recommendation: its argmax-Q action, translated to global
// action ids.
struct Vote {
    int action = -1;  // global action index
    double q = 0.0;
    int sp_index = -1;
};

enum class Hierarchy { H1, H2, H3 };

inline const char* hierarchy_name(Hierarchy h) { return h == Hierarchy::H1 ? "H1" : h == Hierarchy::H2 ? "H2" : "H3"; }

// Action pattern with unbound arguments. L1 binds one argument of a query
// (SQ(X,j), SQ(i,Y), AQ(X,i'), AQ(i,Y)) or is BUY(Y)/DNB; L2 abstracts both
// arguments (SQ(X,Y), AQ(X,Y), BUY(Y), DNB); L3 keeps only DNB vs OTHERS.
struct AbstractAction {
    enum class Pattern : int {
        SqAboutSeller,  // SQ(X, j), arg = seller
        SqByAdvisor,    // SQ(i, Y), arg = advisor
        AqAboutAdvisor, // AQ(X, i'), arg = queried advisor
        AqByAdvisor,    // AQ(i, Y), arg = querying advisor
        SqAny,          // SQ(X, Y)
        AqAny,          // AQ(X, Y)
        BuyAny,         // BUY(Y)
        Dnb,
        Others,
    };

    int level = 1;  // 1, 2 or 3
    Pattern pattern = Pattern::Dnb;
    int arg = -1;

    auto operator<=>(const AbstractAction&) const = default;

    std::string str() const;
};

// All abstract actions consistent with a concrete action at one level.
std::vector<AbstractAction> abstract_actions(const Action& a, int level);

// Whether a concrete action matches an abstract pattern (any level).
bool consistent(const Action& a, const AbstractAction& pattern);
// Whether a level-(L-1) abstraction refines a level-L one.
bool consistent(const AbstractAction& child, const AbstractAction& parent);

struct TallyEntry {
    int count = 0;
    double qsum = 0.0;

    double mean() const { return qsum / count; }
    // Algorithm score counts[x] * meanQs[x], which reduces to qsum exactly.
    double score() const { return qsum; }
};

// Vote counts and mean Q-values for concrete actions and for every abstract
// action consistent with some vote (each vote contributes once per consistent
// pattern per level).
struct VoteTally {
    std::map<int, TallyEntry> concrete;
    std::map<AbstractAction, TallyEntry> abstract;

    static VoteTally build(const std::vector<Vote>& votes, const MarketModel& model);
};

// Structured record of one majority-voting decision, for the per-step log.
struct MajorityDecision {
    VoteTally tally;
    std::vector<AbstractAction> path;  // chosen abstractions, top level first
    int action = -1;
    bool fallback = false;  // chosen branch had no represented child
};

// Argmax-Q vote; exact Q ties are broken uniformly at random. Returns the
// index into `votes`.
int max_q_vote(const std::vector<Vote>& votes, Rng& rng);

// Parallel Max-Q and Max-Q share the selection rule; they differ in which
// beliefs the caller maintains (parallel local vs one global).
inline int aggregate_parallel_maxq(const std::vector<Vote>& votes, Rng& rng) { return max_q_vote(votes, rng); }
inline int aggregate_maxq(const std::vector<Vote>& votes, Rng& rng) { return max_q_vote(votes, rng); }

// Majority voting over the hierarchy's abstraction levels (Hx starts at Lx),
// refining by counts*meanQ restricted to the chosen branch; deterministic
// lowest-index tie-breaks.
int aggregate_majority(const std::vector<Vote>& votes, Hierarchy h, const MarketModel& model,
                       MajorityDecision* log = nullptr);

// The SP's argmax-Q action for its local belief, as a global-action vote.
// An all-terminal local belief votes DoNotBuy with q = 0.
Vote vote_from_sp(const EnumeratedPomdp& local_pomdp, const ValueFunction& vf, const JointBelief& local_belief,
                  const MarketModel& global, const SubPomdp& sp, const MarketModel& local, int sp_index,
                  QWorkspace& ws);

}  // namespace mope
