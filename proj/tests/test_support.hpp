#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "markmle/observation.hpp"
#include "markmle/repaired.hpp"

namespace markmle::testing {

// Marks: mark_levels > 0 draws from {0.5, 1, ...} (ties likely), 0 draws
// continuous marks, which are distinct almost surely.

// k distinct inspection times drawn from {1, ..., levels}, so that ties
// between records are common.
inline std::vector<double> lattice_times(std::mt19937_64& rng, int k, int levels) {
    std::vector<int> pool(static_cast<std::size_t>(levels));
    std::iota(pool.begin(), pool.end(), 1);
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<double> t(pool.begin(), pool.begin() + k);
    std::sort(t.begin(), t.end());
    return t;
}

inline Observation lattice_observation(std::mt19937_64& rng, int k, int levels, int mark_levels) {
    auto times = lattice_times(rng, k, levels);
    const int j = std::uniform_int_distribution<int>(1, k + 1)(rng);
    std::optional<double> mark;
    if (j <= k)
        mark = mark_levels > 0 ? 0.5 * std::uniform_int_distribution<int>(1, mark_levels)(rng)
                               : std::uniform_real_distribution<double>(0.0, 4.0)(rng);
    return Observation(std::move(times), j, mark);
}

inline std::vector<Observation> lattice_dataset(std::mt19937_64& rng, int n, int k, int levels, int mark_levels) {
    std::vector<Observation> out;
    for (int i = 0; i < n; ++i) out.push_back(lattice_observation(rng, k, levels, mark_levels));
    return out;
}

// Continuous inspection times: no two records share an endpoint.
inline std::vector<Observation> continuous_dataset(std::mt19937_64& rng, int n, int k, int mark_levels,
                                                   double event_prob) {
    std::uniform_real_distribution<double> u(0.01, 10.0);
    std::bernoulli_distribution event(event_prob);
    std::vector<Observation> out;
    for (int i = 0; i < n; ++i) {
        std::vector<double> t(static_cast<std::size_t>(k));
        for (auto& v : t) v = u(rng);
        std::sort(t.begin(), t.end());
        if (std::adjacent_find(t.begin(), t.end()) != t.end()) {
            --i;
            continue;
        }
        if (event(rng)) {
            const int j = std::uniform_int_distribution<int>(1, k)(rng);
            const double z = mark_levels > 0 ? 0.25 * std::uniform_int_distribution<int>(1, mark_levels)(rng)
                                             : std::uniform_real_distribution<double>(0.0, 4.0)(rng);
            out.emplace_back(std::move(t), j, z);
        } else {
            out.emplace_back(std::move(t), k + 1, std::nullopt);
        }
    }
    return out;
}

// Uniform point of the probability simplex.
inline std::vector<double> dirichlet_point(std::mt19937_64& rng, std::size_t m) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> p(m);
    double s = 0.0;
    for (auto& v : p) s += (v = e(rng));
    for (auto& v : p) v /= s;
    return p;
}

// Exponentiated-gradient ascent of f over the simplex, using central
// differences of f(p / sum p). Returns the best value seen.
inline double simplex_maximize(const std::function<double(const std::vector<double>&)>& f, std::size_t m,
                               int iterations = 600) {
    std::vector<double> p(m, 1.0 / static_cast<double>(m));
    double best = f(p);
    double eta = 0.5;
    auto normalized = [](std::vector<double> q) {
        const double s = std::accumulate(q.begin(), q.end(), 0.0);
        for (auto& v : q) v /= s;
        return q;
    };
    for (int it = 0; it < iterations && m > 1; ++it) {
        std::vector<double> grad(m);
        for (std::size_t i = 0; i < m; ++i) {
            const double h = 1e-7 * std::max(p[i], 1e-6);
            auto up = p, down = p;
            up[i] += h;
            down[i] = std::max(0.0, down[i] - h);
            grad[i] = (f(normalized(up)) - f(normalized(down))) / (up[i] - down[i]);
        }
        const double gmax = *std::max_element(grad.begin(), grad.end());
        std::vector<double> q(m);
        for (std::size_t i = 0; i < m; ++i) q[i] = p[i] * std::exp(eta * (grad[i] - gmax) / std::max(1.0, std::abs(gmax)));
        q = normalized(q);
        const double v = f(q);
        if (v >= best) {
            best = v;
            p = q;
            eta = std::min(eta * 1.5, 50.0);
        } else {
            eta *= 0.5;
        }
    }
    return best;
}

// Maximum of the log-likelihood over the simplex: a full grid of step 1/40,
// then pairwise mass transfers with a halving step down to 1e-12.
inline double simplex_grid_optimum(const CompetingRisksDataset& data, const CrSupport& support, std::size_t m) {
    auto ll = [&](const std::vector<double>& p) { return cr_log_likelihood(data, support, p); };
    const int N = 40;
    std::vector<double> best_p;
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> c(m, 0);
    auto visit = [&](auto&& self, std::size_t i, int left) -> void {
        if (i + 1 == m) {
            c[i] = left;
            std::vector<double> p(m);
            for (std::size_t q = 0; q < m; ++q) p[q] = double(c[q]) / N;
            const double v = ll(p);
            if (v > best) {
                best = v;
                best_p = p;
            }
            return;
        }
        for (int a = 0; a <= left; ++a) {
            c[i] = a;
            self(self, i + 1, left - a);
        }
    };
    visit(visit, 0, N);
    for (double h = 1.0 / N; h > 1e-12;) {
        bool moved = false;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                if (i == j) continue;
                auto p = best_p;
                const double t = std::min(h, p[j]);
                if (t <= 0.0) continue;
                p[i] += t;
                p[j] -= t;
                const double v = ll(p);
                if (v > best) {
                    best = v;
                    best_p = p;
                    moved = true;
                }
            }
        if (!moved) h *= 0.5;
    }
    return best;
}

}  // namespace markmle::testing
