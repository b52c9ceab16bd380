#include "mope/decomposition.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <numeric>

#include "mope/rng.hpp"

namespace mope {

namespace {

int find_sorted(const std::vector<int>& v, int x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    return (it != v.end() && *it == x) ? static_cast<int>(it - v.begin()) : -1;
}

// Deal `slots` picks per SP from `n` agents, K SPs total, keeping usage
// counts as equal as possible (max - min <= 1). Members within one SP are
// distinct because a single round never picks the same agent twice.
std::vector<std::vector<int>> balanced_assignment(int n, int K, int slots, Rng& rng) {
    std::vector<int> usage(n, 0);
    std::vector<int> order(n);
    std::vector<std::vector<int>> out(K);
    for (int k = 0; k < K; ++k) {
        std::iota(order.begin(), order.end(), 0);
        // random tie-break among equal usages
        for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_int(i + 1)]);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return usage[a] < usage[b]; });
        for (int t = 0; t < slots; ++t) {
            out[k].push_back(order[t]);
            ++usage[order[t]];
        }
        std::sort(out[k].begin(), out[k].end());
    }
    return out;
}

uint64_t hash_doubles(std::initializer_list<double> xs) {
    uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (double x : xs) {
        uint64_t bits;
        static_assert(sizeof(bits) == sizeof(x));
        std::memcpy(&bits, &x, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xff;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

}  // namespace

bool SubPomdp::contains_seller(int j) const { return find_sorted(sellers, j) >= 0; }
bool SubPomdp::contains_advisor(int i) const { return find_sorted(advisors, i) >= 0; }
int SubPomdp::local_seller(int j) const { return find_sorted(sellers, j); }
int SubPomdp::local_advisor(int i) const { return find_sorted(advisors, i); }

bool SubPomdp::contains_action(const Action& a) const {
    switch (a.kind) {
        case ActionKind::SellerQuery: return contains_advisor(a.i) && contains_seller(a.j);
        case ActionKind::AdvisorQuery: return contains_advisor(a.i) && contains_advisor(a.j);
        case ActionKind::Buy: return contains_seller(a.j);
        case ActionKind::DoNotBuy: return true;
    }
    return false;
}

std::vector<int> Decomposition::seller_membership(int n_s) const {
    std::vector<int> count(n_s, 0);
    for (const auto& sp : sps)
        for (int j : sp.sellers) ++count[j];
    return count;
}

std::vector<int> Decomposition::advisor_membership(int n_a) const {
    std::vector<int> count(n_a, 0);
    for (const auto& sp : sps)
        for (int i : sp.advisors) ++count[i];
    return count;
}

bool Decomposition::non_overlapping() const {
    std::vector<int> seen_s, seen_a;
    for (const auto& sp : sps) {
        for (int j : sp.sellers) {
            if (std::find(seen_s.begin(), seen_s.end(), j) != seen_s.end()) return false;
            seen_s.push_back(j);
        }
        for (int i : sp.advisors) {
            if (std::find(seen_a.begin(), seen_a.end(), i) != seen_a.end()) return false;
            seen_a.push_back(i);
        }
    }
    return true;
}

Decomposition build_decomposition(const MarketModel& model, const DecompositionConfig& cfg) {
    cfg.validate();
    const int n_s = model.num_sellers();
    const int n_a = model.num_advisors();
    if (n_s < cfg.sellers_per_sp) throw std::invalid_argument("not enough sellers for the composition");
    if (n_a < cfg.advisors_per_sp()) throw std::invalid_argument("not enough advisors for the composition");

    const int W = n_s + n_a;
    const int K = (W * cfg.spa + cfg.aps - 1) / cfg.aps;  // ceil

    Rng rng(mix_seed(cfg.seed, 0x6465636f6d70ULL));
    auto seller_sets = balanced_assignment(n_s, K, cfg.sellers_per_sp, rng);
    auto advisor_sets = balanced_assignment(n_a, K, cfg.advisors_per_sp(), rng);

    Decomposition d;
    d.sps.resize(K);
    for (int k = 0; k < K; ++k) {
        d.sps[k].sellers = std::move(seller_sets[k]);
        d.sps[k].advisors = std::move(advisor_sets[k]);
    }
    return d;
}

MarketModel local_model(const MarketModel& global, const SubPomdp& sp) {
    return MarketModel(static_cast<int>(sp.sellers.size()), static_cast<int>(sp.advisors.size()), global.obs_params(),
                       global.reward_params());
}

EnumeratedPomdp project_subpomdp(const MarketModel& global, const SubPomdp& sp, int state_cap) {
    return EnumeratedPomdp(local_model(global, sp), state_cap);
}

int local_to_global_action(const MarketModel& global, const SubPomdp& sp, const MarketModel& local, int local_action) {
    const Action a = local.action(local_action);
    switch (a.kind) {
        case ActionKind::SellerQuery:
            return global.action_index(Action::seller_query(sp.advisors[a.i], sp.sellers[a.j]));
        case ActionKind::AdvisorQuery:
            return global.action_index(Action::advisor_query(sp.advisors[a.i], sp.advisors[a.j]));
        case ActionKind::Buy:
            return global.action_index(Action::buy(sp.sellers[a.j]));
        case ActionKind::DoNotBuy:
            return global.action_index(Action::do_not_buy());
    }
    throw std::logic_error("unreachable");
}

int global_to_local_action(const MarketModel& global, const SubPomdp& sp, const MarketModel& local, int global_action) {
    const Action a = global.action(global_action);
    if (!sp.contains_action(a)) return -1;
    switch (a.kind) {
        case ActionKind::SellerQuery:
            return local.action_index(Action::seller_query(sp.local_advisor(a.i), sp.local_seller(a.j)));
        case ActionKind::AdvisorQuery:
            return local.action_index(Action::advisor_query(sp.local_advisor(a.i), sp.local_advisor(a.j)));
        case ActionKind::Buy:
            return local.action_index(Action::buy(sp.local_seller(a.j)));
        case ActionKind::DoNotBuy:
            return local.action_index(Action::do_not_buy());
    }
    throw std::logic_error("unreachable");
}

std::string policy_cache_key(const SubPomdp& sp, const MarketModel& model) {
    const auto& op = model.obs_params();
    const auto& rp = model.reward_params();
    const uint64_t h = hash_doubles({op.p_true_report_trustworthy, op.p_true_report_untrustworthy, op.p_buy_obs_correct,
                                     rp.cost_advisor_query, rp.cost_seller_query, rp.reward_success, rp.penalty_failure,
                                     rp.discount});
    char buf[64];
    std::snprintf(buf, sizeof(buf), "s%zu_a%zu_%016" PRIx64, sp.sellers.size(), sp.advisors.size(), h);
    return buf;
}

}  // namespace mope
