#pragma once

#include <span>
#include <vector>

#include "markmle/errors.hpp"
#include "markmle/population_model.hpp"
#include "markmle/quadrature.hpp"

namespace markmle {

// Observation-level functionals, evaluated directly from the model.
double pop_V(const PopulationModel& model, double x, double y, const QuadratureConfig& cfg = {});
double pop_VX(const PopulationModel& model, double x, const QuadratureConfig& cfg = {});
double pop_H(const PopulationModel& model, double x, const QuadratureConfig& cfg = {});

// Density of V(., y) at s for a continuous time law.
double pop_v_density(const PopulationModel& model, double s, double y, const QuadratureConfig& cfg = {});

/// Range [0, tau] on which 1 - H stays away from zero.
class EvaluationWindow {
public:
    static constexpr double kMargin = 1e-6;

    // Throws NumericError::WindowViolation if H(tau) > 1 - kMargin or a grid
    // point lies outside [0, tau].
    static EvaluationWindow make(const PopulationModel& model, double tau, std::vector<double> grid,
                                 const QuadratureConfig& cfg = {});

    double tau() const noexcept { return tau_; }
    double H_at_tau() const noexcept { return h_tau_; }
    std::span<const double> grid() const noexcept { return grid_; }

private:
    EvaluationWindow(double tau, double h_tau, std::vector<double> grid)
        : tau_(tau), h_tau_(h_tau), grid_(std::move(grid)) {}
    double tau_, h_tau_;
    std::vector<double> grid_;
};

// Largest grid point with H <= 0.995.
double default_tau(const PopulationModel& model, std::span<const double> grid, const QuadratureConfig& cfg = {});

/// Almost-sure limits of the hazard-type processes and of the lower MLE on a
/// window [0, tau]. Tables for H and the marginal hazard are built once; all
/// queries are const and may run concurrently.
class LimitEngine {
public:
    LimitEngine(PopulationModel model, double tau, QuadratureConfig cfg = {});

    const PopulationModel& model() const noexcept { return model_; }
    double tau() const noexcept { return tau_; }

    double H(double x) const;
    double LambdaX(double x) const;
    double Lambda(double x, double y) const;
    double FXlim(double x) const;

    // Product-integral form: int S(s-) Lambda(ds, y).
    double Flim(double x, double y) const;
    // Ratio form: int V(ds, y) / V_X(ds) dF_X(s).
    double Flim_ratio(double x, double y) const;
    // Current status only: int F0(s, y) / F0X(s) dF_X(s).
    double Flim_current_status(double x, double y) const;

    // F_lim(., y) and Lambda(., y) at many x through one table.
    std::vector<double> Flim_curve(double y, std::span<const double> xs) const;
    std::vector<double> Lambda_curve(double y, std::span<const double> xs) const;

private:
    enum class Route { Product, Ratio, CurrentStatus, Hazard };
    void check_window(double x) const;
    double survival(double s) const;  // exp(-LambdaX(s)) on the continuous path
    Integrand integrand(Route route, double y) const;
    std::vector<double> cuts(double y) const;
    double atomic_sum(Route route, double x, double y) const;
    double route_value(Route route, double x, double y) const;

    struct TimePoint {
        double t;
        double h_before;       // H(t-)
        double surv_before;    // prod_{s<t} (1 - Lambda_X(ds))
        double dLambdaX;
    };
    double atom_dV(double t, double y) const;

    PopulationModel model_;
    double tau_;
    QuadratureConfig cfg_;
    ChebTable h_table_, lambda_x_table_;
    std::vector<TimePoint> points_;  // atomic time law only
};

double pop_Lambda(const PopulationModel& model, const EvaluationWindow& window, double x, double y,
                  const QuadratureConfig& cfg = {});
double pop_LambdaX(const PopulationModel& model, const EvaluationWindow& window, double x,
                   const QuadratureConfig& cfg = {});
double pop_Flim(const PopulationModel& model, const EvaluationWindow& window, double x, double y,
                const QuadratureConfig& cfg = {});
double pop_FXlim(const PopulationModel& model, const EvaluationWindow& window, double x,
                 const QuadratureConfig& cfg = {});
double pop_Flim_current_status(const PopulationModel& model, const EvaluationWindow& window, double x, double y,
                               const QuadratureConfig& cfg = {});

}  // namespace markmle
