#include <doctest.h>

#include <cmath>

#include "mope/rng.hpp"
#include "mope/solver.hpp"
#include "oracles.hpp"

using namespace mope;

namespace {

std::vector<double> point_belief(const EnumeratedPomdp& p, int state) {
    std::vector<double> b(p.num_states(), 0.0);
    b[state] = 1.0;
    return b;
}

std::vector<double> random_belief(const EnumeratedPomdp& p, Rng& rng) {
    std::vector<double> b(p.num_states());
    double sum = 0.0;
    for (auto& v : b) {
        v = -std::log(1.0 - rng.uniform());
        sum += v;
    }
    for (auto& v : b) v /= sum;
    return b;
}

}  // namespace

TEST_CASE("sample_beliefs includes the uniform belief and normalizes") {
    const EnumeratedPomdp p(MarketModel(1, 1));
    const auto one = sample_beliefs(p, 1, 42);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == p.uniform_belief());

    const auto many = sample_beliefs(p, 10, 7);
    REQUIRE(many.size() == 10);
    for (const auto& b : many) {
        double sum = 0.0;
        for (double v : b) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(sample_beliefs(p, 10, 7) == many);  // deterministic given seed
}

TEST_CASE("perseus on the 1-seller 0-advisor problem") {
    // only Buy and DNB exist; uniform belief makes both worth 0
    const EnumeratedPomdp p(MarketModel(1, 0));
    const auto vf = solve_with_options(p, {100, 1e-4, 200, 3});
    CHECK(vf.converged);
    CHECK(vf.value(p.uniform_belief()) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(vf.value(point_belief(p, 1)) == doctest::Approx(100.0));  // certain high seller
    CHECK(vf.value(point_belief(p, 0)) == doctest::Approx(100.0));  // certain low: DNB pays off
}

TEST_CASE("perseus is monotone at sampled beliefs across iterations") {
    const EnumeratedPomdp p(MarketModel(1, 1));
    const auto beliefs = sample_beliefs(p, 60, 5);
    std::vector<double> prev(beliefs.size(), -1e18);
    for (int iters = 1; iters <= 12; ++iters) {
        const auto vf = perseus_solve(p, beliefs, 0.0, iters, 5);  // same stream: prefix property
        for (size_t i = 0; i < beliefs.size(); ++i) {
            const double v = vf.value(beliefs[i]);
            CHECK(v >= prev[i] - 1e-9);
            prev[i] = v;
        }
    }
}

TEST_CASE("Bellman consistency at convergence") {
    const EnumeratedPomdp p(MarketModel(1, 2));
    const double eps = 1e-3;
    const auto beliefs = sample_beliefs(p, 200, 9);
    const auto vf = perseus_solve(p, beliefs, eps, 500, 9);
    REQUIRE(vf.converged);
    QWorkspace ws;
    for (const auto& b : beliefs) {
        double maxq = -1e18;
        for (int a = 0; a < p.num_actions(); ++a) maxq = std::max(maxq, q_value(p, vf, b, a, ws));
        CHECK(std::abs(vf.value(b) - maxq) <= eps + 1e-9);
    }
}

TEST_CASE("perseus matches the 4-step policy-tree oracle on tiny problems") {
    const double tol = std::pow(0.95, 4) * 100.0;
    const std::pair<int, int> shapes[] = {{1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}};
    for (auto [n_s, n_a] : shapes) {
        CAPTURE(n_s);
        CAPTURE(n_a);
        const EnumeratedPomdp p(MarketModel(n_s, n_a));
        const auto vf = solve_with_options(p, {300, 1e-4, 400, 17});
        const auto b0 = p.uniform_belief();
        const double oracle = mope::testing::policy_tree_value(p, b0, 4);
        CHECK(std::abs(vf.value(b0) - oracle) <= tol);
    }
}

TEST_CASE("1-seller 1-advisor uniform value dominates immediate buy") {
    const EnumeratedPomdp p(MarketModel(1, 1));
    const auto vf = solve_with_options(p, {300, 1e-4, 400, 21});
    const auto b0 = p.uniform_belief();
    const double oracle3 = mope::testing::policy_tree_value(p, b0, 3);
    CHECK(vf.value(b0) >= 0.0 - 1e-9);      // >= value of immediate Buy/DNB
    CHECK(vf.value(b0) >= oracle3 - 1e-6);  // at least the 3-step tree value
}

TEST_CASE("q_value basics") {
    const EnumeratedPomdp p(MarketModel(1, 1));
    const auto vf = solve_with_options(p, {200, 1e-4, 300, 23});
    QWorkspace ws;

    // all-terminal belief: absorbing zero reward
    const auto bt = point_belief(p, p.num_active_states() + 1);
    for (int a = 0; a < p.num_actions(); ++a) CHECK(q_value(p, vf, bt, a, ws) == doctest::Approx(0.0));

    // Buy at the uniform belief is immediately terminal: q = 0
    const int buy = p.model().action_index(Action::buy(0));
    CHECK(q_value(p, vf, p.uniform_belief(), buy, ws) == doctest::Approx(0.0).epsilon(1e-9));

    // value is the max over alpha vectors, each of which it dominates
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        const auto b = random_belief(p, rng);
        const double v = vf.value(b);
        for (const auto& alpha : vf.vectors) {
            double d = 0.0;
            for (size_t s = 0; s < alpha.values.size(); ++s) d += alpha.values[s] * b[s];
            CHECK(v >= d - 1e-12);
        }
    }
}

TEST_CASE("qmdp value") {
    const EnumeratedPomdp p1(MarketModel(1, 0));
    CHECK(qmdp_value(p1, point_belief(p1, 1)) == doctest::Approx(100.0));

    // 1 seller + 1 advisor: best uniform-belief Q is the seller query,
    // -10 + 0.95 * 100 under full observability
    const EnumeratedPomdp p2(MarketModel(1, 1));
    CHECK(qmdp_value(p2, p2.uniform_belief()) == doctest::Approx(85.0).epsilon(1e-9));

    // upper bound on the perseus value across random beliefs
    const auto vf = solve_with_options(p2, {200, 1e-4, 300, 29});
    const auto qmdp = qmdp_solve(p2);
    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
        const auto b = random_belief(p2, rng);
        CHECK(qmdp.value(b) >= vf.value(b) - 1e-6);
    }
}
