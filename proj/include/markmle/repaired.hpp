#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "markmle/observation.hpp"
#include "markmle/product_limit.hpp"

namespace markmle {

/// Cutpoints y_1 < ... < y_K; risk j collects marks in (y_{j-1}, y_j] with
/// y_0 = -inf and y_{K+1} = +inf.
class MarkGrid {
public:
    explicit MarkGrid(std::vector<double> cutpoints);
    // K interior points of [y_min, y_max]: y_j = y_min + j (y_max - y_min) / (K + 1).
    static MarkGrid equidistant(double y_min, double y_max, int K);

    int K() const noexcept { return static_cast<int>(cut_.size()); }
    int risks() const noexcept { return K() + 1; }
    std::span<const double> cutpoints() const noexcept { return cut_; }
    int risk_of(double mark) const;

private:
    std::vector<double> cut_;
};

struct CompetingRisksRecord {
    double left;              // L
    double right;             // R, +inf when censored
    std::optional<int> risk;  // 1..K+1, present iff the event was observed
    std::size_t original_index;
};

struct CompetingRisksDataset {
    std::vector<CompetingRisksRecord> records;
    int risks = 1;
};

CompetingRisksDataset discretize_marks(std::span<const Observation> data, const MarkGrid& grid);

/// Support candidates: innermost intervals (a, b] of each risk line, where
/// censored half-lines count on every line, and the terminal half-line
/// (T_max, inf) shared by all risks when no event interval reaches past T_max.
struct CrRegion {
    int risk;
    double a, b;
    double mass = 0.0;
};

struct CrSupport {
    std::vector<CrRegion> regions;      // sorted by (risk, a)
    std::optional<double> terminal_left;
};

CrSupport cr_support_candidates(const CompetingRisksDataset& data);

/// Log-likelihood by direct enumeration. masses holds one entry per region,
/// followed by the terminal mass when the terminal region exists.
double cr_log_likelihood(const CompetingRisksDataset& data, const CrSupport& support, std::span<const double> masses);

// Converged when the log-likelihood increment is below `tolerance` and every
// mass satisfies the self-consistency equation within `fixed_point_tolerance`.
struct EmConfig {
    double tolerance = 1e-10;
    double fixed_point_tolerance = 1e-8;
    int max_iterations = 5000;
    double prune_below = 1e-12;
};

struct SubDistributionEstimate {
    int risks = 1;
    std::vector<CrRegion> regions;  // every candidate with its fitted mass
    std::optional<double> terminal_left;
    double censored_tail = 0.0;     // mass of the terminal half-line
    int iterations = 0;
    double log_likelihood = 0.0;
    double last_increment = 0.0;
    std::vector<double> trace;      // log-likelihood before each update
    bool converged = false;
    bool monotone = true;
    bool no_observed_events = false;
};

SubDistributionEstimate fit_cr_mle(const CompetingRisksDataset& data, const EmConfig& config = {});

// Self-consistency residual max_m |p_m - p_m * sum_i 1{m in C_i} / (n S_i)|.
double self_consistency_residual(const CompetingRisksDataset& data, const SubDistributionEstimate& est);

// F_j(x) for one risk j in 1..K+1.
double eval_risk_F(const SubDistributionEstimate& est, double x, int risk, Bound bound);
// sum_{l <= j} F_l(x), estimating F0(x, y_j); j in 1..K+1.
double eval_repaired_F(const SubDistributionEstimate& est, double x, int j, Bound bound);

}  // namespace markmle
