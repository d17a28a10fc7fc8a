#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "markmle/errors.hpp"
#include "markmle/maximal_intersections.hpp"
#include "markmle/observation.hpp"

namespace markmle {

enum class Bound { Lower, Upper };

template <class Real>
struct ProductLimitWeights {
    std::vector<Real> per_rank;  // zero for censored ranks
    Real tail;                   // mass of the terminal half-plane, zero if absent
};

/// Product-limit weights over U-ordered indicators:
///   p_i = prod_{j<i} (1 - d_j/(n-j+1)) * d_i/(n-i+1)    (1-based ranks)
/// and tail = 1 - sum p_i when the last record is censored.
/// Templated so exact rational arithmetic can check the floating-point path.
template <class Real>
ProductLimitWeights<Real> product_limit_weights(std::span<const int> delta_plus) {
    const std::size_t n = delta_plus.size();
    ProductLimitWeights<Real> out{std::vector<Real>(n, Real(0)), Real(0)};
    Real survival(1);
    Real total(0);
    for (std::size_t i = 0; i < n; ++i) {
        const Real at_risk(static_cast<long long>(n - i));
        if (delta_plus[i] == 1) {
            out.per_rank[i] = survival / at_risk;
            total += out.per_rank[i];
            survival *= Real(1) - Real(1) / at_risk;
        }
    }
    if (n > 0 && delta_plus[n - 1] == 0) out.tail = Real(1) - total;
    return out;
}

struct MassVector {
    SupportSet support;
    std::vector<double> masses;  // aligned with support.regions that are segments
    double censored_tail = 0.0;

    std::span<const MaximalIntersection> segments() const {
        return std::span(support.regions).first(support.segment_count());
    }
};

MassVector fit_masses(const OrderedDataset& ordered, const SupportSet& support);

/// Arbitrary feasible masses on a support; used to evaluate the likelihood
/// away from the maximizer. Throws NumericError if the vector is infeasible.
MassVector with_masses(const SupportSet& support, std::vector<double> segment_masses, double tail);

/// Log-likelihood sum_i [d_i log p_i + (1 - d_i) log sum_{j > i} p_j].
/// Returns -inf when a required term is zero.
double log_likelihood(const MassVector& masses, const OrderedDataset& ordered);

double eval_FX(const MassVector& masses, double x, Bound bound);
double eval_F(const MassVector& masses, double x, double y, Bound bound);

/// Precomputed lookup for evaluating the marginal bounds at many points.
class MarginalBounds {
public:
    explicit MarginalBounds(const MassVector& masses);
    double operator()(double x, Bound bound) const;

    // Points where the bound jumps, sorted and distinct.
    std::vector<double> jump_points(Bound bound) const;

private:
    std::vector<double> right_sorted_, right_cum_;
    std::vector<double> left_sorted_, left_cum_;
    std::optional<double> halfplane_u_;
    double tail_ = 0.0;
};

struct StepJump {
    double u;
    std::size_t at_risk;   // records with U >= u
    std::size_t count;     // records with U == u
    std::vector<double> event_marks;  // sorted marks of observed events at u
};

/// Empirical processes H_n, V_n, V_Xn and the hazard-type processes built from
/// them, as exact step functions over the distinct U values.
class EmpiricalProcesses {
public:
    explicit EmpiricalProcesses(const OrderedDataset& ordered);

    double H(double x) const;
    double V(double x, double y) const;
    double VX(double x) const;
    double Lambda(double x, double y) const;
    double LambdaX(double x) const;
    // prod_{s <= x} (1 - Lambda_X(ds))
    double survival_product(double x) const;

    std::span<const StepJump> jumps() const noexcept { return jumps_; }
    std::size_t n() const noexcept { return n_; }

private:
    std::size_t last_jump_at_or_before(double x) const;  // count of jumps with u <= x
    std::vector<StepJump> jumps_;
    std::size_t n_;
};

EmpiricalProcesses empirical_processes(const OrderedDataset& ordered);

/// Record with its observed segment replaced by the point {U} x {Z}; censored
/// records keep their half-plane (U, inf) x R.
struct ImputedRecord {
    double u;
    int delta_plus;
    std::optional<double> mark;
    std::size_t original_index;
};

std::vector<ImputedRecord> impute_right_endpoints(const OrderedDataset& ordered);

struct PointMass {
    double u;
    double mark;
    double mass;
};

struct ImputedFit {
    std::vector<PointMass> points;  // in U order
    double censored_tail = 0.0;
    std::optional<double> halfplane_u;
};

/// MLE for imputed data. Each point set is its own maximal intersection;
/// the terminal half-plane is one iff the last record is censored.
ImputedFit fit_imputed(std::span<const ImputedRecord> records);

struct NonuniquenessDiagnostics {
    double max_segment_length;  // over segments with positive mass
    double tail_mass;
};

NonuniquenessDiagnostics nonuniqueness_diagnostics(const MassVector& masses);

}  // namespace markmle
