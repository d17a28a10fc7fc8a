#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>

#include "markmle/repaired.hpp"
#include "test_support.hpp"

using namespace markmle;
using Catch::Approx;

namespace {

CompetingRisksDataset cr_from(const std::vector<Observation>& d, std::vector<double> cuts) {
    return discretize_marks(d, MarkGrid(std::move(cuts)));
}

std::vector<double> masses_of(const SubDistributionEstimate& est) {
    std::vector<double> p;
    for (const auto& r : est.regions) p.push_back(r.mass);
    if (est.terminal_left) p.push_back(est.censored_tail);
    return p;
}

// Isotonic regression of the event indicators on inspection time.
std::map<double, double> pava_current_status(const std::vector<std::pair<double, int>>& obs) {
    std::map<double, std::pair<double, double>> by_t;  // t -> (sum, count)
    for (auto [t, d] : obs) {
        by_t[t].first += d;
        by_t[t].second += 1.0;
    }
    struct Block {
        double sum, w;
        std::vector<double> ts;
    };
    std::vector<Block> blocks;
    for (const auto& [t, sw] : by_t) {
        blocks.push_back({sw.first, sw.second, {t}});
        while (blocks.size() > 1) {
            auto& a = blocks[blocks.size() - 2];
            auto& b = blocks.back();
            if (a.sum / a.w <= b.sum / b.w) break;
            a.sum += b.sum;
            a.w += b.w;
            a.ts.insert(a.ts.end(), b.ts.begin(), b.ts.end());
            blocks.pop_back();
        }
    }
    std::map<double, double> out;
    for (const auto& b : blocks)
        for (double t : b.ts) out[t] = b.sum / b.w;
    return out;
}

}  // namespace

TEST_CASE("marks map to right-closed cells") {
    const MarkGrid g({1.0});
    CHECK(g.risk_of(0.5) == 1);
    CHECK(g.risk_of(1.0) == 1);
    CHECK(g.risk_of(1.5) == 2);
    const auto cr = cr_from({Observation({1.0}, 1, 0.5), Observation({1.0}, 1, 1.5), Observation({1.0}, 2, std::nullopt)},
                            {1.0});
    CHECK(cr.records[0].risk == 1);
    CHECK(cr.records[1].risk == 2);
    CHECK_FALSE(cr.records[2].risk.has_value());
    CHECK(std::isinf(cr.records[2].right));

    const auto eq = MarkGrid::equidistant(0.0, 4.0, 20);
    CHECK(eq.risks() == 21);
    CHECK(eq.cutpoints().front() == Approx(4.0 / 21));
    CHECK(eq.cutpoints().back() == Approx(80.0 / 21));
    CHECK_THROWS_AS(MarkGrid({1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(MarkGrid::equidistant(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("two-record hand instance") {
    const auto cr = cr_from({Observation({1.0}, 1, 0.5), Observation({2.0}, 2, std::nullopt)}, {1.0});
    const auto est = fit_cr_mle(cr);
    REQUIRE(est.regions.size() == 1);
    CHECK(est.regions[0].risk == 1);
    CHECK(est.regions[0].a == 0.0);
    CHECK(est.regions[0].b == 1.0);
    CHECK(est.regions[0].mass == Approx(0.5).margin(1e-6));
    REQUIRE(est.terminal_left == 2.0);
    CHECK(est.censored_tail == Approx(0.5).margin(1e-6));
    CHECK(eval_repaired_F(est, 1.0, 1, Bound::Lower) == Approx(0.5).margin(1e-6));
    CHECK(eval_repaired_F(est, 0.5, 1, Bound::Lower) == 0.0);
    CHECK_THROWS_AS(eval_repaired_F(est, 1.0, 3, Bound::Lower), std::out_of_range);
}

TEST_CASE("single observed record and all-censored data") {
    const auto one = fit_cr_mle(cr_from({Observation({1.0, 2.0}, 2, 3.0)}, {1.0, 2.0}));
    REQUIRE(one.regions.size() == 1);
    CHECK(one.regions[0].risk == 3);
    CHECK(one.regions[0].a == 1.0);
    CHECK(one.regions[0].b == 2.0);
    CHECK(one.regions[0].mass == 1.0);

    const auto none = fit_cr_mle(cr_from({Observation({1.0}, 2, std::nullopt), Observation({2.0}, 2, std::nullopt)}, {1.0}));
    CHECK(none.no_observed_events);
    CHECK(none.censored_tail == 1.0);
    CHECK(none.terminal_left == 2.0);

    CHECK_THROWS_AS(fit_cr_mle(CompetingRisksDataset{}), DataError);
}

TEST_CASE("EM is monotone, self-consistent and normalized") {
    std::mt19937_64 rng(41);
    EmConfig tight;
    tight.tolerance = 1e-14;
    tight.max_iterations = 100000;
    for (int rep = 0; rep < 150; ++rep) {
        const auto d = testing::lattice_dataset(rng, 1 + int(rng() % 15), 1 + int(rng() % 2), 6, 4);
        const auto cr = cr_from(d, {0.75, 1.25});
        const auto est = fit_cr_mle(cr, tight);
        REQUIRE(est.monotone);
        for (std::size_t i = 1; i < est.trace.size(); ++i)
            REQUIRE(est.trace[i] >= est.trace[i - 1] - 1e-12 * std::max(1.0, std::abs(est.trace[i - 1])));
        double total = est.censored_tail;
        for (const auto& r : est.regions) {
            REQUIRE(r.mass >= 0.0);
            total += r.mass;
        }
        REQUIRE(total == Approx(1.0).margin(1e-10));
        if (est.converged) REQUIRE(self_consistency_residual(cr, est) < 1e-8);
        REQUIRE(est.log_likelihood ==
                Approx(cr_log_likelihood(cr, CrSupport{est.regions, est.terminal_left}, masses_of(est))).margin(1e-6));

        const double far = 1e9;
        double all = 0.0;
        for (int j = 1; j <= cr.risks; ++j) {
            all += eval_risk_F(est, far, j, Bound::Lower);
            double prev = 0.0;
            for (double x = 0.0; x <= 7.0; x += 0.5) {
                const double v = eval_risk_F(est, x, j, Bound::Lower);
                REQUIRE(v >= prev);
                REQUIRE(v <= eval_risk_F(est, x, j, Bound::Upper) + 1e-15);
                prev = v;
            }
        }
        REQUIRE(all == Approx(1.0 - est.censored_tail).margin(1e-10));
        REQUIRE(eval_repaired_F(est, far, cr.risks, Bound::Lower) == Approx(all).margin(1e-12));
    }
}

TEST_CASE("EM reaches the simplex grid optimum on small supports") {
    std::mt19937_64 rng(43);
    EmConfig tight;
    tight.tolerance = 1e-14;
    tight.max_iterations = 200000;
    int tested = 0;
    while (tested < 60) {
        const auto d = testing::lattice_dataset(rng, 2 + int(rng() % 5), 1 + int(rng() % 2), 5, 3);
        const auto cr = cr_from(d, {0.75});
        const auto support = cr_support_candidates(cr);
        const std::size_t m = support.regions.size() + (support.terminal_left ? 1 : 0);
        if (m < 2 || m > 5) continue;
        ++tested;
        const auto est = fit_cr_mle(cr, tight);
        const double oracle = testing::simplex_grid_optimum(cr, support, m);
        REQUIRE(est.log_likelihood >= oracle - 1e-5);
        REQUIRE(est.log_likelihood == Approx(oracle).margin(1e-5));
    }
}

TEST_CASE("one event risk reduces to the current-status NPMLE") {
    std::mt19937_64 rng(47);
    EmConfig tight;
    tight.tolerance = 1e-15;
    tight.max_iterations = 400000;
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<Observation> d;
        std::vector<std::pair<double, int>> obs;
        const int n = 2 + int(rng() % 10);
        for (int i = 0; i < n; ++i) {
            const double t = 1.0 + double(rng() % 6);
            const bool event = rng() % 2 == 0;
            d.emplace_back(std::vector<double>{t}, event ? 1 : 2, event ? std::optional<double>(0.3) : std::nullopt);
            obs.emplace_back(t, event ? 1 : 0);
        }
        const auto est = fit_cr_mle(cr_from(d, {1.0}), tight);
        for (const auto& [t, f] : pava_current_status(obs))
            REQUIRE(eval_risk_F(est, t, 1, Bound::Lower) == Approx(f).margin(1e-5));
    }
}
