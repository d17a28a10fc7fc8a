#include "markmle/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace markmle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> breakpoints_of(const PopulationModel& model, double y) {
    std::vector<double> cuts = model.marks.breakpoints;
    if (const auto* t = std::get_if<ContinuousTimeLaw>(&model.times))
        cuts.insert(cuts.end(), t->breakpoints.begin(), t->breakpoints.end());
    if (std::isfinite(y)) cuts.push_back(y);
    return cuts;
}

// Contribution of one time atom to V(x, y): each T_j <= x adds F0(T_j, y),
// and each consecutive pair with T_j <= x removes F0(T_{j-1}, y).
double atomic_V(const AtomicTimeLaw& law, const MarkedLaw& marks, double x, double y) {
    double total = 0.0;
    for (const auto& atom : law.atoms) {
        double v = 0.0;
        for (std::size_t j = 0; j < atom.times.size(); ++j) {
            if (atom.times[j] > x) break;
            v += marks.joint(atom.times[j], y);
            if (j > 0) v -= marks.joint(atom.times[j - 1], y);
        }
        total += atom.weight * v;
    }
    return total;
}

double atomic_H(const AtomicTimeLaw& law, const MarkedLaw& marks, double x) {
    double total = atomic_V(law, marks, x, kInf);
    for (const auto& atom : law.atoms)
        if (atom.times.back() <= x) total += atom.weight * (1.0 - marks.marginal_x(atom.times.back()));
    return total;
}

}  // namespace

double pop_v_density(const PopulationModel& model, double s, double y, const QuadratureConfig& cfg) {
    const auto& law = std::get<ContinuousTimeLaw>(model.times);
    const auto& F0 = model.marks.joint;
    double v = F0(s, y) * law.marginal_sum(s);
    if (law.k >= 2 && s > 0.0) {
        auto inner = [&](double r) { return F0(r, y) * law.consecutive_sum(r, s); };
        v -= integrate(inner, 0.0, s, cfg, breakpoints_of(model, y));
    }
    return v;
}

double pop_V(const PopulationModel& model, double x, double y, const QuadratureConfig& cfg) {
    if (!(x > 0.0)) return 0.0;
    if (const auto* atomic = std::get_if<AtomicTimeLaw>(&model.times)) return atomic_V(*atomic, model.marks, x, y);
    const auto& law = std::get<ContinuousTimeLaw>(model.times);
    const double upper = std::min(x, law.support_max);
    return integrate([&](double s) { return pop_v_density(model, s, y, cfg); }, 0.0, upper, cfg,
                     breakpoints_of(model, y));
}

double pop_VX(const PopulationModel& model, double x, const QuadratureConfig& cfg) {
    return pop_V(model, x, kInf, cfg);
}

double pop_H(const PopulationModel& model, double x, const QuadratureConfig& cfg) {
    if (!(x > 0.0)) return 0.0;
    if (const auto* atomic = std::get_if<AtomicTimeLaw>(&model.times)) return atomic_H(*atomic, model.marks, x);
    const auto& law = std::get<ContinuousTimeLaw>(model.times);
    const double upper = std::min(x, law.support_max);
    auto h = [&](double s) {
        return pop_v_density(model, s, kInf, cfg) + (1.0 - model.marks.marginal_x(s)) * law.last_marginal(s);
    };
    return integrate(h, 0.0, upper, cfg, breakpoints_of(model, kInf));
}

EvaluationWindow EvaluationWindow::make(const PopulationModel& model, double tau, std::vector<double> grid,
                                        const QuadratureConfig& cfg) {
    if (!(tau > 0.0)) throw NumericError(NumericError::Kind::WindowViolation, "tau must be positive");
    const double h = pop_H(model, tau, cfg);
    if (h > 1.0 - kMargin)
        throw NumericError(NumericError::Kind::WindowViolation,
                           "H(tau) = " + std::to_string(h) + " leaves no mass at risk at tau = " + std::to_string(tau));
    for (double x : grid)
        if (x < 0.0 || x > tau)
            throw NumericError(NumericError::Kind::WindowViolation,
                               "grid point " + std::to_string(x) + " outside [0, tau]");
    return EvaluationWindow(tau, h, std::move(grid));
}

double default_tau(const PopulationModel& model, std::span<const double> grid, const QuadratureConfig& cfg) {
    double best = -1.0;
    for (double x : grid)
        if (x > best && x > 0.0 && pop_H(model, x, cfg) <= 0.995) best = x;
    if (best < 0.0) throw NumericError(NumericError::Kind::WindowViolation, "no grid point has H <= 0.995");
    return best;
}

LimitEngine::LimitEngine(PopulationModel model, double tau, QuadratureConfig cfg)
    : model_(std::move(model)), tau_(tau), cfg_(cfg) {
    if (!(tau_ > 0.0)) throw NumericError(NumericError::Kind::WindowViolation, "tau must be positive");
    const double limit = 1.0 - EvaluationWindow::kMargin;

    if (const auto* atomic = std::get_if<AtomicTimeLaw>(&model_.times)) {
        std::vector<double> ts;
        for (const auto& atom : atomic->atoms) ts.insert(ts.end(), atom.times.begin(), atom.times.end());
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        double h = 0.0, surv = 1.0;
        for (double t : ts) {
            if (t > tau_) break;
            if (h > limit)
                throw NumericError(NumericError::Kind::WindowViolation, "H reaches 1 before tau = " + std::to_string(tau_));
            const double dvx = atom_dV(t, kInf);
            const double dl = dvx / (1.0 - h);
            points_.push_back({t, h, surv, dl});
            surv *= 1.0 - dl;
            h = atomic_H(*atomic, model_.marks, t);
        }
        if (h > limit)
            throw NumericError(NumericError::Kind::WindowViolation, "H(tau) too close to 1 at tau = " + std::to_string(tau_));
        return;
    }

    const auto& law = std::get<ContinuousTimeLaw>(model_.times);
    const auto cut = cuts(kInf);
    h_table_ = ChebTable(
        [&](double s) {
            return pop_v_density(model_, s, kInf, cfg_) + (1.0 - model_.marks.marginal_x(s)) * law.last_marginal(s);
        },
        0.0, tau_, cfg_, cut);
    if (h_table_.total() > limit)
        throw NumericError(NumericError::Kind::WindowViolation,
                           "H(tau) = " + std::to_string(h_table_.total()) + " too close to 1 at tau = " +
                               std::to_string(tau_));
    lambda_x_table_ = ChebTable(
        [&](double s) { return pop_v_density(model_, s, kInf, cfg_) / (1.0 - h_table_.integral(s)); }, 0.0, tau_,
        cfg_, cut);
}

void LimitEngine::check_window(double x) const {
    if (x > tau_)
        throw NumericError(NumericError::Kind::WindowViolation,
                           "x = " + std::to_string(x) + " exceeds tau = " + std::to_string(tau_));
}

std::vector<double> LimitEngine::cuts(double y) const { return breakpoints_of(model_, y); }

double LimitEngine::atom_dV(double t, double y) const {
    const auto& law = std::get<AtomicTimeLaw>(model_.times);
    const auto& F0 = model_.marks.joint;
    double total = 0.0;
    for (const auto& atom : law.atoms)
        for (std::size_t j = 0; j < atom.times.size(); ++j)
            if (atom.times[j] == t) total += atom.weight * (F0(t, y) - (j > 0 ? F0(atom.times[j - 1], y) : 0.0));
    return total;
}

double LimitEngine::survival(double s) const { return std::exp(-lambda_x_table_.integral(s)); }

double LimitEngine::H(double x) const {
    if (!(x > 0.0)) return 0.0;
    if (model_.atomic_times()) return atomic_H(std::get<AtomicTimeLaw>(model_.times), model_.marks, x);
    check_window(x);
    return h_table_.integral(x);
}

double LimitEngine::LambdaX(double x) const {
    if (!(x > 0.0)) return 0.0;
    check_window(x);
    if (model_.atomic_times()) {
        double total = 0.0;
        for (const auto& p : points_)
            if (p.t <= x) total += p.dLambdaX;
        return total;
    }
    return lambda_x_table_.integral(x);
}

double LimitEngine::FXlim(double x) const {
    if (!(x > 0.0)) return 0.0;
    check_window(x);
    if (model_.atomic_times()) {
        double surv = 1.0;
        for (const auto& p : points_)
            if (p.t <= x) surv *= 1.0 - p.dLambdaX;
        return 1.0 - surv;
    }
    return -std::expm1(-lambda_x_table_.integral(x));
}

Integrand LimitEngine::integrand(Route route, double y) const {
    switch (route) {
        case Route::Hazard:
            return [this, y](double s) { return pop_v_density(model_, s, y, cfg_) / (1.0 - h_table_.integral(s)); };
        case Route::Product:
            return [this, y](double s) {
                return survival(s) * pop_v_density(model_, s, y, cfg_) / (1.0 - h_table_.integral(s));
            };
        case Route::Ratio:
            return [this, y](double s) {
                const double vx = pop_v_density(model_, s, kInf, cfg_);
                const double vy = pop_v_density(model_, s, y, cfg_);
                if (!(vx > 0.0)) {
                    if (vy > 1e-14)
                        throw NumericError(NumericError::Kind::DivisionByZeroMeasure,
                                           "V_X(ds) vanishes where V(ds, y) does not, s = " + std::to_string(s));
                    return 0.0;
                }
                return vy / vx * survival(s) * lambda_x_table_.value(s);
            };
        case Route::CurrentStatus:
            return [this, y](double s) {
                const double fx = model_.marks.marginal_x(s);
                if (!(fx > 0.0)) return 0.0;
                return model_.marks.joint(s, y) / fx * survival(s) * lambda_x_table_.value(s);
            };
    }
    return {};
}

double LimitEngine::atomic_sum(Route route, double x, double y) const {
    double total = 0.0;
    for (const auto& p : points_) {
        if (p.t > x) break;
        const double dv = atom_dV(p.t, y);
        switch (route) {
            case Route::Hazard: total += dv / (1.0 - p.h_before); break;
            case Route::Product: total += p.surv_before * dv / (1.0 - p.h_before); break;
            case Route::Ratio: {
                const double dvx = atom_dV(p.t, kInf);
                if (!(dvx > 0.0)) {
                    if (dv > 0.0)
                        throw NumericError(NumericError::Kind::DivisionByZeroMeasure,
                                           "V_X has no atom where V(., y) does, t = " + std::to_string(p.t));
                    break;
                }
                total += dv / dvx * p.surv_before * p.dLambdaX;
                break;
            }
            case Route::CurrentStatus: {
                const double fx = model_.marks.marginal_x(p.t);
                if (fx > 0.0) total += model_.marks.joint(p.t, y) / fx * p.surv_before * p.dLambdaX;
                break;
            }
        }
    }
    return total;
}

double LimitEngine::route_value(Route route, double x, double y) const {
    if (!(x > 0.0)) return 0.0;
    check_window(x);
    if (route == Route::CurrentStatus && model_.k() != 1)
        throw std::invalid_argument("the current-status route needs k = 1");
    if (model_.atomic_times()) return atomic_sum(route, x, y);
    return integrate(integrand(route, y), 0.0, x, cfg_, cuts(y));
}

double LimitEngine::Lambda(double x, double y) const { return route_value(Route::Hazard, x, y); }
double LimitEngine::Flim(double x, double y) const { return route_value(Route::Product, x, y); }
double LimitEngine::Flim_ratio(double x, double y) const { return route_value(Route::Ratio, x, y); }
double LimitEngine::Flim_current_status(double x, double y) const {
    return route_value(Route::CurrentStatus, x, y);
}

static std::vector<double> evaluate_curve(double tau, std::span<const double> xs,
                                          const std::function<double(double)>& at) {
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) {
        if (x > tau)
            throw NumericError(NumericError::Kind::WindowViolation,
                               "x = " + std::to_string(x) + " exceeds tau = " + std::to_string(tau));
        out.push_back(x > 0.0 ? at(x) : 0.0);
    }
    return out;
}

std::vector<double> LimitEngine::Flim_curve(double y, std::span<const double> xs) const {
    if (model_.atomic_times())
        return evaluate_curve(tau_, xs, [&](double x) { return atomic_sum(Route::Product, x, y); });
    const ChebTable table(integrand(Route::Product, y), 0.0, tau_, cfg_, cuts(y));
    return evaluate_curve(tau_, xs, [&](double x) { return table.integral(x); });
}

std::vector<double> LimitEngine::Lambda_curve(double y, std::span<const double> xs) const {
    if (model_.atomic_times())
        return evaluate_curve(tau_, xs, [&](double x) { return atomic_sum(Route::Hazard, x, y); });
    const ChebTable table(integrand(Route::Hazard, y), 0.0, tau_, cfg_, cuts(y));
    return evaluate_curve(tau_, xs, [&](double x) { return table.integral(x); });
}

double pop_Lambda(const PopulationModel& model, const EvaluationWindow& window, double x, double y,
                  const QuadratureConfig& cfg) {
    return LimitEngine(model, window.tau(), cfg).Lambda(x, y);
}

double pop_LambdaX(const PopulationModel& model, const EvaluationWindow& window, double x,
                   const QuadratureConfig& cfg) {
    return LimitEngine(model, window.tau(), cfg).LambdaX(x);
}

double pop_Flim(const PopulationModel& model, const EvaluationWindow& window, double x, double y,
                const QuadratureConfig& cfg) {
    return LimitEngine(model, window.tau(), cfg).Flim(x, y);
}

double pop_FXlim(const PopulationModel& model, const EvaluationWindow& window, double x,
                 const QuadratureConfig& cfg) {
    return LimitEngine(model, window.tau(), cfg).FXlim(x);
}

double pop_Flim_current_status(const PopulationModel& model, const EvaluationWindow& window, double x, double y,
                               const QuadratureConfig& cfg) {
    return LimitEngine(model, window.tau(), cfg).Flim_current_status(x, y);
}

}  // namespace markmle
