#include "markmle/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace markmle {

namespace {

constexpr int N = ChebTable::kDegree;

struct Basis {
    std::array<double, N + 1> node{};                  // cos(pi j / N)
    std::array<std::array<double, N + 1>, N + 1> cs{};  // cos(pi m j / N)
    std::array<double, N + 1> weight{};                // int_{-1}^{1} T_m
};

const Basis& basis() {
    static const Basis b = [] {
        Basis out;
        for (int j = 0; j <= N; ++j) out.node[j] = std::cos(std::numbers::pi * j / N);
        for (int m = 0; m <= N; ++m)
            for (int j = 0; j <= N; ++j) out.cs[m][j] = std::cos(std::numbers::pi * m * j / N);
        for (int m = 0; m <= N; ++m) out.weight[m] = m % 2 == 1 ? 0.0 : 2.0 / (1.0 - double(m) * m);
        return out;
    }();
    return b;
}

struct Fit {
    double lo, hi;
    std::array<double, N + 1> coef;
    double integral;
    double error;
};

Fit fit_panel(const Integrand& f, double lo, double hi) {
    const auto& B = basis();
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    std::array<double, N + 1> vals;
    for (int j = 0; j <= N; ++j) {
        // Endpoints are nudged one ulp inward so a jump at a breakpoint is
        // seen from the correct side on each neighbouring panel.
        const double x = j == 0 ? std::nextafter(hi, lo) : j == N ? std::nextafter(lo, hi) : mid + half * B.node[j];
        vals[j] = f(x);
        if (!std::isfinite(vals[j]))
            throw NumericError(NumericError::Kind::QuadratureFailure,
                               "integrand is not finite at x = " + std::to_string(x));
    }
    Fit fit{lo, hi, {}, 0.0, 0.0};
    for (int m = 0; m <= N; ++m) {
        double s = 0.5 * (vals[0] * B.cs[m][0] + vals[N] * B.cs[m][N]);
        for (int j = 1; j < N; ++j) s += vals[j] * B.cs[m][j];
        fit.coef[m] = s * 2.0 / N;
    }
    fit.coef[0] *= 0.5;
    fit.coef[N] *= 0.5;
    double integral = 0.0;
    for (int m = 0; m <= N; m += 2) integral += fit.coef[m] * B.weight[m];
    fit.integral = half * integral;
    const double tail = std::max({std::abs(fit.coef[N - 2]), std::abs(fit.coef[N - 1]), std::abs(fit.coef[N])});
    fit.error = (hi - lo) * tail;
    return fit;
}

std::vector<Fit> adapt(const Integrand& f, double a, double b, const QuadratureConfig& cfg,
                       std::span<const double> breakpoints) {
    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // Max-heap on the error estimate; the panel with the largest error is split.
    std::vector<Fit> heap;
    auto less_error = [](const Fit& x, const Fit& y) { return x.error < y.error; };
    double integral = 0.0, error = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        heap.push_back(fit_panel(f, cuts[i], cuts[i + 1]));
        integral += heap.back().integral;
        error += heap.back().error;
    }
    std::make_heap(heap.begin(), heap.end(), less_error);
    while (error > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(integral))) {
        const Fit worst = heap.front();
        const double mid = 0.5 * (worst.lo + worst.hi);
        if (static_cast<int>(heap.size()) >= cfg.max_subdivisions || !(mid > worst.lo && mid < worst.hi))
            throw NumericError(NumericError::Kind::QuadratureFailure,
                               "quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                                   "] did not reach tolerance; error estimate " + std::to_string(error));
        std::pop_heap(heap.begin(), heap.end(), less_error);
        heap.back() = fit_panel(f, worst.lo, mid);
        std::push_heap(heap.begin(), heap.end(), less_error);
        heap.push_back(fit_panel(f, mid, worst.hi));
        std::push_heap(heap.begin(), heap.end(), less_error);
        // Re-sum rather than update in place so cancellation cannot accumulate.
        integral = 0.0;
        error = 0.0;
        for (const Fit& p : heap) {
            integral += p.integral;
            error += p.error;
        }
    }
    std::vector<Fit> done = std::move(heap);
    std::sort(done.begin(), done.end(), [](const Fit& x, const Fit& y) { return x.lo < y.lo; });
    return done;
}

double clenshaw(std::span<const double> c, double t) {
    double y1 = 0.0, y2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        const double y = c[k] + 2.0 * t * y1 - y2;
        y2 = y1;
        y1 = y;
    }
    return c[0] + t * y1 - y2;
}

}  // namespace

double integrate(const Integrand& f, double a, double b, const QuadratureConfig& cfg,
                 std::span<const double> breakpoints) {
    if (a == b) return 0.0;
    if (b < a) return -integrate(f, b, a, cfg, breakpoints);
    double total = 0.0;
    for (const Fit& p : adapt(f, a, b, cfg, breakpoints)) total += p.integral;
    return total;
}

ChebTable::ChebTable(const Integrand& f, double a, double b, const QuadratureConfig& cfg,
                     std::span<const double> breakpoints)
    : a_(a), b_(b) {
    if (!(a < b)) {
        b_ = a_;
        return;
    }
    double offset = 0.0;
    for (const Fit& fit : adapt(f, a, b, cfg, breakpoints)) {
        Panel p{fit.lo, fit.hi, fit.coef, {}, fit.integral, offset};
        const double half = 0.5 * (fit.hi - fit.lo);
        // Antiderivative in the panel variable t in [-1, 1], vanishing at t = -1.
        auto c = [&](int m) { return m > N ? 0.0 : m == 0 ? 2.0 * fit.coef[0] : fit.coef[m]; };
        p.anti[0] = 0.0;
        for (int m = 1; m <= N + 1; ++m) p.anti[m] = (c(m - 1) - c(m + 1)) / (2.0 * m);
        double at_minus_one = 0.0;
        for (int m = 1; m <= N + 1; ++m) at_minus_one += (m % 2 == 0 ? 1.0 : -1.0) * p.anti[m];
        p.anti[0] = -at_minus_one;
        for (double& v : p.anti) v *= half;
        offset += fit.integral;
        panels_.push_back(p);
    }
}

const ChebTable::Panel& ChebTable::find(double x) const {
    auto it = std::lower_bound(panels_.begin(), panels_.end(), x, [](const Panel& p, double v) { return p.hi < v; });
    if (it == panels_.end()) --it;
    return *it;
}

double ChebTable::integral(double x) const {
    if (panels_.empty() || x <= a_) return 0.0;
    if (x >= b_) return total();
    const Panel& p = find(x);
    if (x >= p.hi) return p.offset + p.integral;
    const double t = (2.0 * x - p.lo - p.hi) / (p.hi - p.lo);
    return p.offset + clenshaw(p.anti, t);
}

double ChebTable::value(double x) const {
    if (panels_.empty()) return 0.0;
    x = std::clamp(x, a_, b_);
    const Panel& p = find(x);
    const double t = std::clamp((2.0 * x - p.lo - p.hi) / (p.hi - p.lo), -1.0, 1.0);
    return clenshaw(p.coef, t);
}

}  // namespace markmle
