#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mope/enumerated_pomdp.hpp"

namespace mope {

struct AlphaVector {
    std::vector<double> values;  // one entry per enumerated state
    int action = -1;             // action this vector backs
};

// Piecewise-linear convex value function: V(b) = max over vectors of dot(a, b).
struct ValueFunction {
    std::vector<AlphaVector> vectors;
    int iterations = 0;
    double residual = 0.0;  // Bellman residual over the sampled beliefs
    bool converged = true;
    // vector entries past this index are identically zero (terminal states);
    // 0 means use the full length
    int active_size = 0;

    double value(std::span<const double> b) const;
    // Index of the maximizing vector; ties go to the lowest index.
    int best_vector(std::span<const double> b) const;
    int best_action(std::span<const double> b) const { return vectors[best_vector(b)].action; }
};

struct SolverOptions {
    int belief_samples = 500;
    double epsilon = 1e-3;
    int max_iter = 500;
    uint64_t seed = 20240801;
};

// Beliefs reachable from the uniform belief by random query rollouts; the
// uniform belief is always the first entry. Deterministic given seed.
std::vector<std::vector<double>> sample_beliefs(const EnumeratedPomdp& pomdp, int n, uint64_t seed);

// Perseus-style point-based value iteration over a fixed belief set. The
// value at every sampled belief is non-decreasing across iterations; stops
// once a full sweep improves no sampled belief by more than epsilon (or flags
// converged=false at max_iter).
ValueFunction perseus_solve(const EnumeratedPomdp& pomdp, const std::vector<std::vector<double>>& beliefs,
                            double epsilon = 1e-3, int max_iter = 500, uint64_t seed = 20240801);

ValueFunction solve_with_options(const EnumeratedPomdp& pomdp, const SolverOptions& opt);

// Scratch space so hot callers avoid re-allocating posteriors.
struct QWorkspace {
    std::vector<double> posterior;
};

// Q(b, a) = sum_s b(s) R(s,a) + gamma * sum_o p(o|b,a) V(b_o^a).
double q_value(const EnumeratedPomdp& pomdp, const ValueFunction& vf, std::span<const double> b, int a, QWorkspace& ws);
double q_value(const EnumeratedPomdp& pomdp, const ValueFunction& vf, std::span<const double> b, int a);

// Q-table of the underlying fully observable MDP; max_a b . Q(.,a) upper
// bounds the POMDP value.
struct QmdpSolution {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> q;  // [s * A + a]

    double value(std::span<const double> b) const;
};

QmdpSolution qmdp_solve(const EnumeratedPomdp& pomdp, double tol = 1e-10);
double qmdp_value(const EnumeratedPomdp& pomdp, std::span<const double> b);

}  // namespace mope
