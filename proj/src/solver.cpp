#include "mope/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mope/rng.hpp"

namespace mope {

namespace {

double dot_n(const double* a, const double* b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

std::vector<int> query_actions(const EnumeratedPomdp& p) {
    std::vector<int> qs;
    for (int a = 0; a < p.num_actions(); ++a) {
        const ActionKind k = p.model().action(a).kind;
        if (k == ActionKind::SellerQuery || k == ActionKind::AdvisorQuery) qs.push_back(a);
    }
    return qs;
}

// Point-based backup of belief b against vector set V. Alpha vectors are zero
// on terminal states, so only active entries are computed.
AlphaVector backup(const EnumeratedPomdp& p, const std::vector<AlphaVector>& V, std::span<const double> b,
                   std::vector<double>& w) {
    const int S = p.num_states();
    const int n_act = p.num_active_states();
    const int A = p.num_actions();
    const double gamma = p.discount();

    AlphaVector best;
    double best_val = -std::numeric_limits<double>::infinity();
    std::vector<double> vec(S);

    for (int a = 0; a < A; ++a) {
        std::fill(vec.begin(), vec.end(), 0.0);
        double val = 0.0;
        for (int s = 0; s < n_act; ++s) {
            vec[s] = p.reward(s, a);
            val += b[s] * vec[s];
        }
        const int n_obs = static_cast<int>(p.observations(a).size());
        for (int k = 0; k < n_obs; ++k) {
            // continuation vector maximizing sum_s b(s) O(o|a,succ) alpha(succ);
            // terminal rows contribute nothing since alpha vanishes there
            for (int s = 0; s < n_act; ++s) w[s] = b[s] == 0.0 ? 0.0 : b[s] * p.obs_prob(a, p.successor(s, a), k);
            const AlphaVector* cont = nullptr;
            double cont_score = -std::numeric_limits<double>::infinity();
            for (const auto& alpha : V) {
                double sc = 0.0;
                for (int s = 0; s < n_act; ++s)
                    if (w[s] != 0.0) sc += w[s] * alpha.values[p.successor(s, a)];
                if (sc > cont_score) {
                    cont_score = sc;
                    cont = &alpha;
                }
            }
            for (int s = 0; s < n_act; ++s) {
                const double g = gamma * p.obs_prob(a, p.successor(s, a), k) * cont->values[p.successor(s, a)];
                vec[s] += g;
                val += b[s] * g;
            }
        }
        if (val > best_val) {
            best_val = val;
            best.values = vec;
            best.action = a;
        }
    }
    return best;
}

void prune_pointwise(std::vector<AlphaVector>& V) {
    std::vector<bool> dead(V.size(), false);
    for (size_t i = 0; i < V.size(); ++i) {
        if (dead[i]) continue;
        for (size_t j = 0; j < V.size(); ++j) {
            if (i == j || dead[j]) continue;
            bool dominates = true;  // V[i] >= V[j] pointwise
            for (size_t s = 0; s < V[i].values.size(); ++s)
                if (V[i].values[s] < V[j].values[s]) {
                    dominates = false;
                    break;
                }
            if (!dominates) continue;
            if (j > i) {
                dead[j] = true;  // equality keeps the earlier vector
            } else {
                for (size_t s = 0; s < V[i].values.size(); ++s)
                    if (V[i].values[s] > V[j].values[s]) {
                        dead[j] = true;
                        break;
                    }
            }
        }
    }
    std::vector<AlphaVector> out;
    out.reserve(V.size());
    for (size_t i = 0; i < V.size(); ++i)
        if (!dead[i]) out.push_back(std::move(V[i]));
    V = std::move(out);
}

// Shrink the set to the vectors that win at some sampled belief, then repair:
// wherever the shrunken set breaks the Bellman check at a sampled belief, pull
// back the full set's winners at that belief's posteriors. Sampled values are
// unchanged throughout; if repair stalls the full set stands.
void compact(const EnumeratedPomdp& p, ValueFunction& vf, const std::vector<std::vector<double>>& beliefs,
             double epsilon, std::vector<double>& w) {
    std::vector<char> keep(vf.vectors.size(), 0);
    for (const auto& b : beliefs) keep[vf.best_vector(b)] = 1;

    ValueFunction small = vf;
    small.vectors.clear();
    for (size_t i = 0; i < vf.vectors.size(); ++i)
        if (keep[i]) small.vectors.push_back(vf.vectors[i]);

    std::vector<double> post;
    for (int round = 0; round < 8; ++round) {
        if (small.vectors.size() >= vf.vectors.size()) return;  // nothing saved
        bool repaired = false;
        bool violated = false;
        for (const auto& b : beliefs) {
            const AlphaVector cand = backup(p, small.vectors, b, w);
            if (std::abs(dot_n(cand.values.data(), b.data(), p.num_states()) - small.value(b)) <= epsilon) continue;
            violated = true;
            // the gap comes from missing continuation support at b's posteriors
            for (int a = 0; a < p.num_actions(); ++a) {
                const int n_obs = static_cast<int>(p.observations(a).size());
                for (int k = 0; k < n_obs; ++k) {
                    if (p.posterior(b, a, k, post) <= 0.0) continue;
                    const size_t full_idx = static_cast<size_t>(vf.best_vector(post));
                    if (!keep[full_idx]) {
                        keep[full_idx] = 1;
                        small.vectors.push_back(vf.vectors[full_idx]);
                        repaired = true;
                    }
                }
            }
        }
        if (!violated) {
            vf = std::move(small);
            return;
        }
        if (!repaired) return;  // cannot close the gap; keep the full set
    }
}

}  // namespace

double ValueFunction::value(std::span<const double> b) const {
    const int n = active_size > 0 ? active_size : static_cast<int>(b.size());
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& alpha : vectors) best = std::max(best, dot_n(alpha.values.data(), b.data(), n));
    return best;
}

int ValueFunction::best_vector(std::span<const double> b) const {
    if (vectors.empty()) throw std::logic_error("empty value function");
    const int n = active_size > 0 ? active_size : static_cast<int>(b.size());
    int best = 0;
    double best_val = dot_n(vectors[0].values.data(), b.data(), n);
    for (size_t i = 1; i < vectors.size(); ++i) {
        const double v = dot_n(vectors[i].values.data(), b.data(), n);
        if (v > best_val) {
            best_val = v;
            best = static_cast<int>(i);
        }
    }
    return best;
}

std::vector<std::vector<double>> sample_beliefs(const EnumeratedPomdp& pomdp, int n, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("need at least one belief sample");
    Rng rng(mix_seed(seed, 0x6265666c69656673ULL));
    const auto queries = query_actions(pomdp);

    std::vector<std::vector<double>> out;
    out.reserve(n);
    out.push_back(pomdp.uniform_belief());

    // active-state corners: the limits of long query rollouts; they pin the
    // value function where episodes end up (near-certain beliefs)
    for (int s = 0; s < pomdp.num_active_states() && static_cast<int>(out.size()) < n; ++s) {
        std::vector<double> corner(pomdp.num_states(), 0.0);
        corner[s] = 1.0;
        out.push_back(std::move(corner));
    }

    std::vector<double> b = pomdp.uniform_belief();
    std::vector<double> next;
    while (static_cast<int>(out.size()) < n) {
        if (queries.empty() || rng.uniform() < 0.125) {
            b = pomdp.uniform_belief();
        } else {
            const int a = queries[rng.uniform_int(static_cast<int>(queries.size()))];
            // sample the observation from p(o | b, a), then condition on it
            double p0 = 0.0;
            for (int s = 0; s < pomdp.num_states(); ++s)
                if (b[s] != 0.0) p0 += b[s] * pomdp.obs_prob(a, pomdp.successor(s, a), 0);
            const int k = rng.uniform() < p0 ? 0 : 1;
            if (pomdp.posterior(b, a, k, next) <= 0.0) {
                b = pomdp.uniform_belief();
            } else {
                b.swap(next);
            }
        }
        out.push_back(b);
    }
    return out;
}

ValueFunction perseus_solve(const EnumeratedPomdp& pomdp, const std::vector<std::vector<double>>& beliefs,
                            double epsilon, int max_iter, uint64_t seed) {
    if (beliefs.empty()) throw std::invalid_argument("perseus_solve needs a non-empty belief set");
    const int S = pomdp.num_states();
    const int B = static_cast<int>(beliefs.size());
    Rng rng(mix_seed(seed, 0x70657273657573ULL));

    // Blind lower bound: R_min / (1 - gamma) on active states, 0 on terminals.
    double r_min = 0.0;
    for (int s = 0; s < pomdp.num_active_states(); ++s)
        for (int a = 0; a < pomdp.num_actions(); ++a) r_min = std::min(r_min, pomdp.reward(s, a));
    ValueFunction vf;
    vf.active_size = pomdp.num_active_states();
    AlphaVector blind;
    blind.values.assign(S, 0.0);
    blind.action = pomdp.num_actions() - 1;  // DoNotBuy
    for (int s = 0; s < pomdp.num_active_states(); ++s) blind.values[s] = r_min / (1.0 - pomdp.discount());
    vf.vectors.push_back(std::move(blind));

    std::vector<double> old_vals(B), new_vals(B);
    std::vector<int> remaining;
    std::vector<double> w(S);

    for (int iter = 0; iter < max_iter; ++iter) {
        for (int i = 0; i < B; ++i) old_vals[i] = vf.value(beliefs[i]);

        // Perseus stage: back up randomly picked beliefs until every belief is
        // matched by some vector added this stage. Fresh vectors join the set
        // instead of replacing it, so the pointwise max never decreases
        // anywhere and every surviving vector stays backed by current
        // continuations (uniform improvability).
        std::vector<AlphaVector> fresh;
        std::fill(new_vals.begin(), new_vals.end(), -std::numeric_limits<double>::infinity());
        remaining.resize(B);
        std::iota(remaining.begin(), remaining.end(), 0);

        while (!remaining.empty()) {
            const int pick = rng.uniform_int(static_cast<int>(remaining.size()));
            const int bi = remaining[pick];
            AlphaVector cand = backup(pomdp, vf.vectors, beliefs[bi], w);
            if (dot_n(cand.values.data(), beliefs[bi].data(), S) < old_vals[bi] - 1e-12) {
                cand = vf.vectors[vf.best_vector(beliefs[bi])];
            }
            size_t keep = 0;
            for (const int i : remaining) {
                new_vals[i] = std::max(new_vals[i], dot_n(cand.values.data(), beliefs[i].data(), S));
                if (new_vals[i] < old_vals[i] - 1e-12) remaining[keep++] = i;
            }
            remaining.resize(keep);
            fresh.push_back(std::move(cand));
        }

        for (auto& v : fresh) vf.vectors.push_back(std::move(v));
        prune_pointwise(vf.vectors);
        vf.iterations = iter + 1;

        double delta = 0.0;
        for (int i = 0; i < B; ++i) delta = std::max(delta, vf.value(beliefs[i]) - old_vals[i]);
        vf.residual = delta;
        if (delta > epsilon) continue;

        // A quiet stage only shows that the beliefs it touched were satisfied.
        // Convergence needs a full sweep: back up every belief against the new
        // set and keep anything that still improves by more than epsilon.
        std::vector<AlphaVector> catchup;
        double gap = 0.0;
        for (int i = 0; i < B; ++i) {
            AlphaVector cand = backup(pomdp, vf.vectors, beliefs[i], w);
            const double improvement = dot_n(cand.values.data(), beliefs[i].data(), S) - vf.value(beliefs[i]);
            gap = std::max(gap, improvement);
            if (improvement > epsilon) catchup.push_back(std::move(cand));
        }
        vf.residual = gap;
        if (catchup.empty()) {
            vf.converged = true;
            compact(pomdp, vf, beliefs, epsilon, w);
            return vf;
        }
        for (auto& v : catchup) vf.vectors.push_back(std::move(v));
        prune_pointwise(vf.vectors);
    }
    vf.converged = false;  // best-so-far
    compact(pomdp, vf, beliefs, epsilon, w);
    return vf;
}

ValueFunction solve_with_options(const EnumeratedPomdp& pomdp, const SolverOptions& opt) {
    const auto beliefs = sample_beliefs(pomdp, opt.belief_samples, opt.seed);
    return perseus_solve(pomdp, beliefs, opt.epsilon, opt.max_iter, opt.seed);
}

double q_value(const EnumeratedPomdp& pomdp, const ValueFunction& vf, std::span<const double> b, int a, QWorkspace& ws) {
    double q = 0.0;
    for (int s = 0; s < pomdp.num_active_states(); ++s)
        if (b[s] != 0.0) q += b[s] * pomdp.reward(s, a);
    const int n_obs = static_cast<int>(pomdp.observations(a).size());
    for (int k = 0; k < n_obs; ++k) {
        const double po = pomdp.posterior(b, a, k, ws.posterior);
        if (po > 0.0) q += pomdp.discount() * po * vf.value(ws.posterior);
    }
    return q;
}

double q_value(const EnumeratedPomdp& pomdp, const ValueFunction& vf, std::span<const double> b, int a) {
    QWorkspace ws;
    return q_value(pomdp, vf, b, a, ws);
}

QmdpSolution qmdp_solve(const EnumeratedPomdp& pomdp, double tol) {
    const int S = pomdp.num_states();
    const int A = pomdp.num_actions();
    std::vector<double> v(S, 0.0), nv(S, 0.0);
    // value iteration on the underlying MDP; terminals stay pinned at 0
    for (;;) {
        double resid = 0.0;
        for (int s = 0; s < S; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (int a = 0; a < A; ++a) best = std::max(best, pomdp.reward(s, a) + pomdp.discount() * v[pomdp.successor(s, a)]);
            if (pomdp.terminal(s)) best = 0.0;
            nv[s] = best;
            resid = std::max(resid, std::abs(nv[s] - v[s]));
        }
        v.swap(nv);
        if (resid <= tol) break;
    }
    QmdpSolution sol;
    sol.n_states = S;
    sol.n_actions = A;
    sol.q.resize(static_cast<size_t>(S) * A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a)
            sol.q[static_cast<size_t>(s) * A + a] = pomdp.terminal(s) ? 0.0 : pomdp.reward(s, a) + pomdp.discount() * v[pomdp.successor(s, a)];
    return sol;
}

double QmdpSolution::value(std::span<const double> b) const {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n_actions; ++a) {
        double acc = 0.0;
        for (int s = 0; s < n_states; ++s)
            if (b[s] != 0.0) acc += b[s] * q[static_cast<size_t>(s) * n_actions + a];
        best = std::max(best, acc);
    }
    return best;
}

double qmdp_value(const EnumeratedPomdp& pomdp, std::span<const double> b) { return qmdp_solve(pomdp).value(b); }

}  // namespace mope
