#include <catch_amalgamated.hpp>

#include <cmath>

#include "markmle/consistency.hpp"
#include "markmle/errors.hpp"
#include "markmle/limits.hpp"
#include "markmle/population_model.hpp"
#include "markmle/simulate.hpp"

using namespace markmle;
using Catch::Approx;

TEST_CASE("true hazards of example 1") {
    const auto law = example_model(1).marks;
    CHECK(true_LambdaX(law, 0.25) == Approx(-std::log(0.75)).margin(1e-8));
    CHECK(true_Lambda(law, 0.25, 1e300) == Approx(-std::log(0.75)).margin(1e-8));
    CHECK(true_Lambda(law, 0.25, 2.0) == Approx(-std::log(0.75) * (1.0 - std::exp(-2.0))).margin(1e-8));
    CHECK(true_LambdaX(law, 0.0) == 0.0);
}

TEST_CASE("true hazards with atoms use left limits") {
    const auto law = degenerate_model().marks;
    // Atoms 0.3, 0.3, 0.4: hazards 0.3, 0.3 / 0.7, 1.
    CHECK(true_LambdaX(law, 0.5) == Approx(0.3).margin(1e-12));
    CHECK(true_LambdaX(law, 1.0) == Approx(0.3 + 0.3 / 0.7).margin(1e-12));
    CHECK(true_LambdaX(law, 2.0) == Approx(0.3 + 0.3 / 0.7 + 1.0).margin(1e-12));
}

TEST_CASE("example 1 is flagged inconsistent") {
    const auto m = example_model(1);
    const auto w = EvaluationWindow::make(m, 0.45, step_grid(0.0, 0.45, 0.05));
    const auto r = check_consistency(m, w, step_grid(0.0, 4.0, 0.5));
    CHECK(r.verdict == Verdict::Inconsistent);
    const auto& at = *std::find_if(r.rows.begin(), r.rows.end(), [](const HazardRow& h) { return h.x == 0.25; });
    CHECK(at.lambda_limit == Approx(-0.25 - 0.5 * std::log(0.5)).margin(1e-6));
    CHECK(at.lambda_true == Approx(-std::log(0.75)).margin(1e-6));
    CHECK(at.gap == Approx(0.28768207 - 0.09657359).margin(1e-6));
    CHECK(r.rows.front().x == 0.0);
    CHECK(r.rows.front().gap == 0.0);
    CHECK(r.hazard_x_gap >= at.gap);
    CHECK(r.hazard_xy_gap >= 0.0);
    for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].gap >= 0.0);
}

TEST_CASE("hazard gap vanishes near zero") {
    const auto m = example_model(1);
    const LimitEngine e(m, 0.45);
    double prev = 1.0;
    for (double x : {1e-1, 1e-2, 1e-3}) {
        const double gap = std::abs(e.LambdaX(x) - true_LambdaX(m.marks, x));
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("no information loss gives a consistent verdict") {
    const auto m = degenerate_model();
    const auto w = EvaluationWindow::make(m, 1.2, step_grid(0.0, 1.2, 0.05));
    const auto r = check_consistency(m, w, step_grid(0.0, 4.0, 0.25));
    CHECK(r.verdict == Verdict::ConsistentWithinTol);
    CHECK(r.hazard_x_gap <= r.threshold);
    CHECK(r.hazard_xy_gap <= r.threshold);
}

TEST_CASE("logistic family check") {
    auto G = [](double x) { return std::clamp(2.0 * x, 0.0, 1.0); };
    const auto grid = step_grid(0.05, 0.45, 0.05);

    SECTION("example 1 is far from the family") {
        const auto fit = logistic_family_check(G, [](double x) { return std::clamp(x, 0.0, 1.0); }, grid);
        CHECK(fit.max_fit_error > 0.1);
        CHECK(fit.gamma == 0.0);
        CHECK(std::isfinite(fit.c_fit));
    }
    SECTION("a member of the family is recovered") {
        auto F = [&](double x) { return x <= 0.0 ? 0.0 : 1.0 / (1.0 + std::exp(-2.0) * (1.0 - G(x))); };
        const auto fit = logistic_family_check(G, F, grid);
        CHECK(fit.c_fit == Approx(2.0).margin(1e-10));
        CHECK(fit.max_fit_error < 1e-8);
        CHECK(fit.f_c_at_gamma >= 1.0 / (1.0 + std::exp(-fit.c_fit)) - 1e-12);
        CHECK(fit.f_c_at_gamma > 0.0);
    }
    SECTION("gamma is the left end of the support") {
        auto F = [](double x) { return std::clamp((x - 0.1) / 0.5, 0.0, 1.0); };
        const auto fit = logistic_family_check(G, F, grid);
        CHECK(fit.gamma == Approx(0.1).margin(1e-9));
    }
    SECTION("no usable grid points") {
        CHECK_THROWS_AS(logistic_family_check(G, [](double) { return 0.0; }, grid), NumericError);
    }
}

TEST_CASE("bias study across the number of inspections") {
    const auto law = uniform_exponential_law(1.0);
    const std::vector<int> ks{1, 2, 5, 10, 25};
    const std::vector<double> xs{0.0, 0.5};
    const auto rows = bias_vs_k_study(law, 1.0, ks, xs);
    REQUIRE(rows.size() == 10);
    double prev = 1e9;
    for (const auto& r : rows) {
        if (r.x == 0.0) {
            CHECK(r.gap == 0.0);
            continue;
        }
        CHECK(r.lambda_true == Approx(std::log(2.0)).margin(1e-8));
        CHECK(r.gap < prev);
        prev = r.gap;
    }
    CHECK(rows[1].lambda_limit == Approx(-0.5 - std::log(0.5)).margin(1e-8));
    CHECK(std::is_sorted(rows.begin(), rows.end(), [](const BiasRow& a, const BiasRow& b) { return a.k < b.k; }));
}
