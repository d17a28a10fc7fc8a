#include "markmle/population_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "markmle/quadrature.hpp"

namespace markmle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double exp1_cdf(double y) { return y <= 0.0 ? 0.0 : std::isinf(y) ? 1.0 : -std::expm1(-y); }

double indicator(bool b) { return b ? 1.0 : 0.0; }

PopulationModel example1() {
    MarkedLaw law;
    law.joint = [](double x, double y) { return std::clamp(x, 0.0, 1.0) * exp1_cdf(y); };
    law.marginal_x = [](double x) { return std::clamp(x, 0.0, 1.0); };
    law.marginal_y = exp1_cdf;
    law.x_density = [](double x, double y) { return indicator(x >= 0.0 && x <= 1.0) * exp1_cdf(y); };
    law.breakpoints = {1.0};
    law.y_min = 0.0;
    law.y_max = 4.0;

    ContinuousTimeLaw t;
    t.k = 1;
    t.marginal_sum = [](double s) { return 2.0 * indicator(s >= 0.0 && s <= 0.5); };
    t.consecutive_sum = [](double, double) { return 0.0; };
    t.last_marginal = t.marginal_sum;
    t.breakpoints = {0.5};
    t.support_max = 0.5;
    return {"example1", std::move(law), std::move(t), 1.0};
}

// Y | X ~ Exp with mean 2 / (2X + 1):
//   F0(x, y) = x - exp(-y/2) (1 - exp(-x y)) / y  for x in [0, 1].
PopulationModel example2() {
    MarkedLaw law;
    law.joint = [](double x, double y) {
        const double xc = std::clamp(x, 0.0, 1.0);
        if (y <= 0.0) return 0.0;
        if (std::isinf(y)) return xc;
        return xc - std::exp(-0.5 * y) * (-std::expm1(-xc * y)) / y;
    };
    law.marginal_x = [](double x) { return std::clamp(x, 0.0, 1.0); };
    law.marginal_y = [j = law.joint](double y) { return j(1.0, y); };
    law.x_density = [](double x, double y) {
        if (x < 0.0 || x > 1.0 || y <= 0.0) return 0.0;
        if (std::isinf(y)) return 1.0;
        return -std::expm1(-0.5 * y * (2.0 * x + 1.0));
    };
    law.breakpoints = {1.0};
    law.y_min = 0.0;
    law.y_max = 4.0;

    ContinuousTimeLaw t;
    t.k = 1;
    t.marginal_sum = [](double s) { return indicator(s >= 0.0 && s <= 1.0); };
    t.consecutive_sum = [](double, double) { return 0.0; };
    t.last_marginal = t.marginal_sum;
    t.breakpoints = {1.0};
    t.support_max = 1.0;
    return {"example2", std::move(law), std::move(t), 1.0};
}

// Y = X, so F0(x, y) = F0X(min(x, y)).
PopulationModel example3() {
    MarkedLaw law;
    law.marginal_x = [](double x) { return std::clamp(0.5 * x, 0.0, 1.0); };
    law.joint = [fx = law.marginal_x](double x, double y) { return fx(std::min(x, y)); };
    law.marginal_y = law.marginal_x;
    law.x_density = [](double x, double y) { return 0.5 * indicator(x >= 0.0 && x <= 2.0 && x <= y); };
    law.breakpoints = {2.0};
    law.y_min = 0.0;
    law.y_max = 2.0;

    ContinuousTimeLaw t = ContinuousTimeLaw::from_components(
        {[](double s) { return indicator(s >= 0.0 && s <= 1.0); },
         [](double s) { return indicator(s >= 1.0 && s <= 2.0); }},
        {[](double s, double u) { return indicator(s >= 0.0 && s <= 1.0 && u >= 1.0 && u <= 2.0); }}, {1.0, 2.0},
        2.0);
    return {"example3", std::move(law), std::move(t), 2.0};
}

// (X, Y) uniform on {0 <= x <= y <= 1}: F0(x, y) = 2 x' y' - x'^2 with
// y' = min(y, 1), x' = min(x, y').
PopulationModel example4() {
    MarkedLaw law;
    law.joint = [](double x, double y) {
        const double yc = std::clamp(y, 0.0, 1.0);
        const double xc = std::clamp(x, 0.0, yc);
        return 2.0 * xc * yc - xc * xc;
    };
    law.marginal_x = [](double x) {
        const double xc = std::clamp(x, 0.0, 1.0);
        return 2.0 * xc - xc * xc;
    };
    law.marginal_y = [](double y) {
        const double yc = std::clamp(y, 0.0, 1.0);
        return yc * yc;
    };
    law.x_density = [](double x, double y) {
        const double yc = std::clamp(y, 0.0, 1.0);
        return x >= 0.0 && x < yc ? 2.0 * (yc - x) : 0.0;
    };
    law.breakpoints = {1.0};
    law.y_min = 0.0;
    law.y_max = 1.0;

    AtomicTimeLaw t{2, {{{0.25, 0.5}, 0.3}, {{0.25, 0.75}, 0.3}, {{0.5, 0.75}, 0.4}}};
    return {"example4", std::move(law), std::move(t), 1.0};
}

}  // namespace

ContinuousTimeLaw ContinuousTimeLaw::from_components(std::vector<std::function<double(double)>> marginals,
                                                     std::vector<std::function<double(double, double)>> consecutive,
                                                     std::vector<double> breakpoints, double support_max) {
    if (marginals.empty() || consecutive.size() + 1 != marginals.size())
        throw std::invalid_argument("need k marginal densities and k-1 consecutive-pair densities");
    ContinuousTimeLaw t;
    t.k = static_cast<int>(marginals.size());
    t.last_marginal = marginals.back();
    t.marginal_sum = [m = std::move(marginals)](double s) {
        double total = 0.0;
        for (const auto& g : m) total += g(s);
        return total;
    };
    t.consecutive_sum = [c = std::move(consecutive)](double s, double u) {
        double total = 0.0;
        for (const auto& g : c) total += g(s, u);
        return total;
    };
    t.breakpoints = std::move(breakpoints);
    t.support_max = support_max;
    return t;
}

int PopulationModel::k() const {
    return std::visit([](const auto& t) { return t.k; }, times);
}

PopulationModel example_model(int id) {
    switch (id) {
        case 1: return example1();
        case 2: return example2();
        case 3: return example3();
        case 4: return example4();
        default: throw std::invalid_argument("example id must be 1..4");
    }
}

ExampleDefaults example_defaults(int id) {
    switch (id) {
        case 1: return {0.45, 0.25, 0.0, 4.0};
        case 2: return {0.95, 0.5, 0.0, 4.0};
        case 3: return {1.9, 1.0, 0.0, 2.0};
        case 4: return {0.74, 0.5, 0.0, 1.0};
        default: throw std::invalid_argument("example id must be 1..4");
    }
}

PopulationModel degenerate_model() {
    static const std::vector<std::pair<double, double>> atoms{{0.5, 0.3}, {1.0, 0.3}, {2.0, 0.4}};
    MarkedLaw law;
    law.marginal_x = [](double x) {
        double total = 0.0;
        for (const auto& [a, w] : atoms)
            if (a <= x) total += w;
        return total;
    };
    law.joint = [fx = law.marginal_x](double x, double y) { return fx(x) * exp1_cdf(y); };
    law.marginal_y = exp1_cdf;
    for (const auto& [a, w] : atoms) law.x_atoms.push_back(a);
    law.x_jump = [](double x, double y) {
        for (const auto& [a, w] : atoms)
            if (a == x) return w * exp1_cdf(y);
        return 0.0;
    };
    law.y_min = 0.0;
    law.y_max = 4.0;
    AtomicTimeLaw t{3, {{{0.5, 1.0, 1.5}, 1.0}}};
    return {"degenerate", std::move(law), std::move(t), 2.0};
}

MarkedLaw uniform_exponential_law(double x_max) {
    MarkedLaw law;
    law.marginal_x = [x_max](double x) { return std::clamp(x / x_max, 0.0, 1.0); };
    law.joint = [fx = law.marginal_x](double x, double y) { return fx(x) * exp1_cdf(y); };
    law.marginal_y = exp1_cdf;
    law.x_density = [x_max](double x, double y) { return indicator(x >= 0.0 && x <= x_max) / x_max * exp1_cdf(y); };
    law.breakpoints = {x_max};
    law.y_min = 0.0;
    law.y_max = 4.0;
    return law;
}

PopulationModel order_stat_uniform_model(int k, double theta, MarkedLaw law) {
    if (k < 1 || !(theta > 0.0)) throw std::invalid_argument("order statistics model needs k >= 1 and theta > 0");
    ContinuousTimeLaw t;
    t.k = k;
    t.marginal_sum = [k, theta](double s) { return s >= 0.0 && s <= theta ? k / theta : 0.0; };
    t.consecutive_sum = [k, theta](double s, double u) {
        if (k < 2 || s < 0.0 || u < s || u > theta) return 0.0;
        return k * (k - 1.0) / (theta * theta) * std::pow(1.0 - (u - s) / theta, k - 2);
    };
    t.last_marginal = [k, theta](double s) {
        return s >= 0.0 && s <= theta ? k / theta * std::pow(s / theta, k - 1) : 0.0;
    };
    t.breakpoints = {theta};
    t.support_max = theta;
    std::string name = "orderstat:" + std::to_string(k) + ":" + std::to_string(theta);
    return {std::move(name), std::move(law), std::move(t), theta};
}

double order_stat_direct_V(const MarkedLaw& law, int k, double theta, double x, double y) {
    const double upper = std::min(x, theta);
    if (!(upper > 0.0)) return 0.0;
    auto integrand = [&](double s) { return law.joint(s, y) * k / theta * std::pow(1.0 - (x - s) / theta, k - 1); };
    std::vector<double> cuts = law.breakpoints;
    if (std::isfinite(y)) cuts.push_back(y);
    return integrate(integrand, 0.0, upper, QuadratureConfig{}, cuts);
}

}  // namespace markmle
