#pragma once

#include <functional>
#include <span>
#include <vector>

#include "markmle/limits.hpp"

namespace markmle {

// Cumulative hazards of the true law:
//   Lambda0(x, y) = int_[0,x] F0(ds, y) / (1 - F0X(s-)),  Lambda0X = Lambda0(., inf).
double true_Lambda(const MarkedLaw& law, double x, double y, const QuadratureConfig& cfg = {});
double true_LambdaX(const MarkedLaw& law, double x, const QuadratureConfig& cfg = {});

enum class Verdict { ConsistentWithinTol, Inconsistent };

struct HazardRow {
    double x;
    double lambda_limit;  // Lambda_X,inf(x)
    double lambda_true;   // Lambda_0X(x)
    double gap;
};

struct DiscrepancyReport {
    std::vector<double> grid;
    std::vector<HazardRow> rows;
    double hazard_x_gap = 0.0;
    double hazard_xy_gap = 0.0;
    double threshold = 0.0;
    Verdict verdict = Verdict::ConsistentWithinTol;
};

/// Compares the limiting hazards with the true hazards over the window grid
/// (and window grid x y_grid for the mark-specific hazard). The verdict is
/// Inconsistent iff either gap exceeds tol_factor times the quadrature tolerance.
DiscrepancyReport check_consistency(const PopulationModel& model, const EvaluationWindow& window,
                                    std::span<const double> y_grid, const QuadratureConfig& cfg = {},
                                    double tol_factor = 10.0);

struct LogisticFamilyCheck {
    double gamma;            // inf {x : F0X(x) > 0}
    double c_fit;
    double max_fit_error;    // max |log-odds(F0X) + log(1 - G) - C| over used points
    double f_c_at_gamma;     // [1 + exp(-C)(1 - G(gamma))]^-1
    std::size_t points_used;
};

/// Least-squares fit of the current-status family F0X = [1 + e^{-C}(1 - G)]^{-1}.
/// Throws NumericError::EmptyGrid when no grid point has F0X in (0, 1) and G < 1.
LogisticFamilyCheck logistic_family_check(const std::function<double(double)>& G,
                                          const std::function<double(double)>& f0x, std::span<const double> grid);

struct BiasRow {
    int k;
    double x;
    double lambda_limit;
    double lambda_true;
    double gap;
};

/// Hazard gaps for the uniform order-statistics observation design, sorted by k.
std::vector<BiasRow> bias_vs_k_study(const MarkedLaw& law, double theta, std::span<const int> k_list,
                                     std::span<const double> x_list, const QuadratureConfig& cfg = {});

}  // namespace markmle
