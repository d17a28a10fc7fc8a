#include "markmle/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace markmle {

double true_Lambda(const MarkedLaw& law, double x, double y, const QuadratureConfig& cfg) {
    if (!(x > 0.0)) return 0.0;
    double total = 0.0;
    if (law.x_density) {
        std::vector<double> cuts = law.breakpoints;
        cuts.insert(cuts.end(), law.x_atoms.begin(), law.x_atoms.end());
        if (std::isfinite(y)) cuts.push_back(y);
        auto f = [&](double s) { return law.x_density(s, y) / (1.0 - law.marginal_x(s)); };
        total += integrate(f, 0.0, x, cfg, cuts);
    }
    const double inf = std::numeric_limits<double>::infinity();
    for (double a : law.x_atoms) {
        if (a > x) continue;
        const double before = law.marginal_x(a) - law.x_jump(a, inf);
        total += law.x_jump(a, y) / (1.0 - before);
    }
    return total;
}

double true_LambdaX(const MarkedLaw& law, double x, const QuadratureConfig& cfg) {
    return true_Lambda(law, x, std::numeric_limits<double>::infinity(), cfg);
}

DiscrepancyReport check_consistency(const PopulationModel& model, const EvaluationWindow& window,
                                    std::span<const double> y_grid, const QuadratureConfig& cfg,
                                    double tol_factor) {
    const LimitEngine engine(model, window.tau(), cfg);
    DiscrepancyReport report;
    report.grid.assign(window.grid().begin(), window.grid().end());
    for (double x : report.grid) {
        const double lim = engine.LambdaX(x);
        const double tru = true_LambdaX(model.marks, x, cfg);
        report.rows.push_back({x, lim, tru, std::abs(lim - tru)});
        report.hazard_x_gap = std::max(report.hazard_x_gap, std::abs(lim - tru));
    }
    for (double y : y_grid) {
        const auto lim = engine.Lambda_curve(y, report.grid);
        for (std::size_t i = 0; i < report.grid.size(); ++i) {
            const double gap = std::abs(lim[i] - true_Lambda(model.marks, report.grid[i], y, cfg));
            report.hazard_xy_gap = std::max(report.hazard_xy_gap, gap);
        }
    }
    report.threshold = tol_factor * std::max(cfg.abs_tol, cfg.rel_tol);
    report.verdict = report.hazard_x_gap > report.threshold || report.hazard_xy_gap > report.threshold
                         ? Verdict::Inconsistent
                         : Verdict::ConsistentWithinTol;
    return report;
}

LogisticFamilyCheck logistic_family_check(const std::function<double(double)>& G,
                                          const std::function<double(double)>& f0x, std::span<const double> grid) {
    std::vector<double> c;
    for (double x : grid) {
        const double f = f0x(x), g = G(x);
        if (f > 0.0 && f < 1.0 && g < 1.0) c.push_back(std::log(f / (1.0 - f)) + std::log1p(-g));
    }
    if (c.empty()) throw NumericError(NumericError::Kind::EmptyGrid, "no grid point with 0 < F0X < 1 and G < 1");

    double mean = 0.0;
    for (double v : c) mean += v;
    mean /= static_cast<double>(c.size());
    double worst = 0.0;
    for (double v : c) worst = std::max(worst, std::abs(v - mean));

    double gamma = 0.0;
    if (!(f0x(0.0) > 0.0)) {
        const auto first = std::find_if(grid.begin(), grid.end(), [&](double x) { return f0x(x) > 0.0; });
        double lo = 0.0, hi = *first;
        for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (f0x(mid) > 0.0 ? hi : lo) = mid;
        }
        gamma = lo == 0.0 && hi <= 1e-13 ? 0.0 : hi;
    }
    const double fc = 1.0 / (1.0 + std::exp(-mean) * (1.0 - G(gamma)));
    return {gamma, mean, worst, fc, c.size()};
}

std::vector<BiasRow> bias_vs_k_study(const MarkedLaw& law, double theta, std::span<const int> k_list,
                                     std::span<const double> x_list, const QuadratureConfig& cfg) {
    if (x_list.empty()) return {};
    const double tau = *std::max_element(x_list.begin(), x_list.end());
    if (!(tau < theta)) throw std::invalid_argument("study points must lie below theta");
    std::vector<int> ks(k_list.begin(), k_list.end());
    std::sort(ks.begin(), ks.end());
    std::vector<BiasRow> rows;
    for (int k : ks) {
        if (tau <= 0.0) {
            for (double x : x_list) rows.push_back({k, x, 0.0, 0.0, 0.0});
            continue;
        }
        const LimitEngine engine(order_stat_uniform_model(k, theta, law), tau, cfg);
        for (double x : x_list) {
            const double lim = engine.LambdaX(x);
            const double tru = true_LambdaX(law, x, cfg);
            rows.push_back({k, x, lim, tru, std::abs(lim - tru)});
        }
    }
    return rows;
}

}  // namespace markmle
