#include "markmle/product_limit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

namespace markmle {

namespace {

// Neumaier summation; the normalization check must not be fooled by
// accumulation error on large samples.
double compensated_sum(std::span<const double> xs) {
    double sum = 0.0, c = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + c;
}

std::vector<int> delta_sequence(const OrderedDataset& ordered) {
    std::vector<int> d(ordered.size());
    for (std::size_t i = 0; i < ordered.size(); ++i) d[i] = ordered[i].endpoints.delta_plus;
    return d;
}

}  // namespace

MassVector fit_masses(const OrderedDataset& ordered, const SupportSet& support) {
    const auto delta = delta_sequence(ordered);
    const auto w = product_limit_weights<double>(delta);

    MassVector out{support, std::vector<double>(support.segment_count(), 0.0), w.tail};
    for (std::size_t rank = 0; rank < ordered.size(); ++rank)
        if (const auto& region = support.region_of_rank[rank]) out.masses[*region] += w.per_rank[rank];

    if (!support.has_halfplane() && w.tail != 0.0)
        throw NumericError(NumericError::Kind::InternalConsistency, "censored tail without a half-plane region");
    std::vector<double> all(out.masses);
    all.push_back(out.censored_tail);
    const double total = compensated_sum(all);
    if (std::abs(1.0 - total) > 1e-12)
        throw NumericError(NumericError::Kind::InternalConsistency,
                           "fitted masses sum to " + std::to_string(total) + ", not 1");
    return out;
}

MassVector with_masses(const SupportSet& support, std::vector<double> segment_masses, double tail) {
    if (segment_masses.size() != support.segment_count())
        throw NumericError(NumericError::Kind::InternalConsistency, "mass vector does not match the support");
    if (tail != 0.0 && !support.has_halfplane())
        throw NumericError(NumericError::Kind::InternalConsistency, "tail mass given without a half-plane region");
    double total = tail;
    for (double m : segment_masses) {
        if (!(m >= 0.0)) throw NumericError(NumericError::Kind::InternalConsistency, "negative mass");
        total += m;
    }
    if (!(tail >= 0.0) || std::abs(total - 1.0) > 1e-9)
        throw NumericError(NumericError::Kind::InternalConsistency, "masses are not a probability vector");
    return {support, std::move(segment_masses), tail};
}

double log_likelihood(const MassVector& mv, const OrderedDataset& ordered) {
    const auto segs = mv.segments();
    // Segments are stored in the rank order of their first generating record,
    // so a suffix sum over regions gives the mass above any censored rank.
    std::vector<double> suffix(segs.size() + 1, 0.0);
    suffix[segs.size()] = mv.censored_tail;
    for (std::size_t m = segs.size(); m-- > 0;) suffix[m] = suffix[m + 1] + mv.masses[m];

    const double neg_inf = -std::numeric_limits<double>::infinity();
    double ll = 0.0;
    std::size_t next_region = 0;
    for (std::size_t rank = 0; rank < ordered.size(); ++rank) {
        while (next_region < segs.size() && segs[next_region].source_rank <= rank) ++next_region;
        double term;
        if (ordered[rank].endpoints.delta_plus == 1)
            term = mv.masses[*mv.support.region_of_rank[rank]];
        else
            term = suffix[next_region];
        if (!(term > 0.0)) return neg_inf;
        ll += std::log(term);
    }
    return ll;
}

double eval_FX(const MassVector& mv, double x, Bound bound) {
    return eval_F(mv, x, std::numeric_limits<double>::infinity(), bound);
}

double eval_F(const MassVector& mv, double x, double y, Bound bound) {
    const auto segs = mv.segments();
    double total = 0.0;
    for (std::size_t m = 0; m < segs.size(); ++m) {
        if (segs[m].mark > y) continue;
        const bool counted = bound == Bound::Lower ? segs[m].r <= x : segs[m].d < x;
        if (counted) total += mv.masses[m];
    }
    if (bound == Bound::Upper && mv.support.has_halfplane() && x > mv.support.regions.back().u_last)
        total += mv.censored_tail;
    return total;
}

MarginalBounds::MarginalBounds(const MassVector& mv) {
    const auto segs = mv.segments();
    std::vector<std::pair<double, double>> by_r, by_d;
    for (std::size_t m = 0; m < segs.size(); ++m) {
        by_r.emplace_back(segs[m].r, mv.masses[m]);
        by_d.emplace_back(segs[m].d, mv.masses[m]);
    }
    auto build = [](std::vector<std::pair<double, double>>& v, std::vector<double>& keys, std::vector<double>& cum) {
        std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        double acc = 0.0;
        for (const auto& [key, mass] : v) {
            acc += mass;
            if (!keys.empty() && keys.back() == key) {
                cum.back() = acc;
            } else {
                keys.push_back(key);
                cum.push_back(acc);
            }
        }
    };
    build(by_r, right_sorted_, right_cum_);
    build(by_d, left_sorted_, left_cum_);
    if (mv.support.has_halfplane()) halfplane_u_ = mv.support.regions.back().u_last;
    tail_ = mv.censored_tail;
}

double MarginalBounds::operator()(double x, Bound bound) const {
    if (bound == Bound::Lower) {
        const auto it = std::upper_bound(right_sorted_.begin(), right_sorted_.end(), x);
        return it == right_sorted_.begin() ? 0.0 : right_cum_[static_cast<std::size_t>(it - right_sorted_.begin()) - 1];
    }
    const auto it = std::lower_bound(left_sorted_.begin(), left_sorted_.end(), x);
    double v = it == left_sorted_.begin() ? 0.0 : left_cum_[static_cast<std::size_t>(it - left_sorted_.begin()) - 1];
    if (halfplane_u_ && x > *halfplane_u_) v += tail_;
    return v;
}

std::vector<double> MarginalBounds::jump_points(Bound bound) const {
    if (bound == Bound::Lower) return right_sorted_;
    std::vector<double> pts = left_sorted_;
    if (halfplane_u_) {
        pts.push_back(*halfplane_u_);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    }
    return pts;
}

EmpiricalProcesses::EmpiricalProcesses(const OrderedDataset& ordered) : n_(ordered.size()) {
    for (std::size_t rank = 0; rank < ordered.size(); ++rank) {
        const auto& rec = ordered[rank];
        if (jumps_.empty() || jumps_.back().u != rec.endpoints.u)
            jumps_.push_back({rec.endpoints.u, ordered.size() - rank, 0, {}});
        auto& jump = jumps_.back();
        ++jump.count;
        if (rec.endpoints.delta_plus == 1) jump.event_marks.push_back(*rec.observation.mark());
    }
    for (auto& jump : jumps_) std::sort(jump.event_marks.begin(), jump.event_marks.end());
}

std::size_t EmpiricalProcesses::last_jump_at_or_before(double x) const {
    const auto it = std::upper_bound(jumps_.begin(), jumps_.end(), x,
                                     [](double v, const StepJump& j) { return v < j.u; });
    return static_cast<std::size_t>(it - jumps_.begin());
}

double EmpiricalProcesses::H(double x) const {
    std::size_t count = 0;
    const std::size_t m = last_jump_at_or_before(x);
    for (std::size_t i = 0; i < m; ++i) count += jumps_[i].count;
    return static_cast<double>(count) / static_cast<double>(n_);
}

static std::size_t marks_at_most(const StepJump& j, double y) {
    return static_cast<std::size_t>(std::upper_bound(j.event_marks.begin(), j.event_marks.end(), y) -
                                    j.event_marks.begin());
}

double EmpiricalProcesses::V(double x, double y) const {
    std::size_t count = 0;
    const std::size_t m = last_jump_at_or_before(x);
    for (std::size_t i = 0; i < m; ++i) count += marks_at_most(jumps_[i], y);
    return static_cast<double>(count) / static_cast<double>(n_);
}

double EmpiricalProcesses::VX(double x) const { return V(x, std::numeric_limits<double>::infinity()); }

double EmpiricalProcesses::Lambda(double x, double y) const {
    double total = 0.0;
    const std::size_t m = last_jump_at_or_before(x);
    for (std::size_t i = 0; i < m; ++i)
        total += static_cast<double>(marks_at_most(jumps_[i], y)) / static_cast<double>(jumps_[i].at_risk);
    return total;
}

double EmpiricalProcesses::LambdaX(double x) const { return Lambda(x, std::numeric_limits<double>::infinity()); }

double EmpiricalProcesses::survival_product(double x) const {
    double prod = 1.0;
    const std::size_t m = last_jump_at_or_before(x);
    for (std::size_t i = 0; i < m; ++i)
        prod *= 1.0 - static_cast<double>(jumps_[i].event_marks.size()) / static_cast<double>(jumps_[i].at_risk);
    return prod;
}

EmpiricalProcesses empirical_processes(const OrderedDataset& ordered) { return EmpiricalProcesses(ordered); }

std::vector<ImputedRecord> impute_right_endpoints(const OrderedDataset& ordered) {
    std::vector<ImputedRecord> out;
    out.reserve(ordered.size());
    for (const auto& rec : ordered)
        out.push_back({rec.endpoints.u, rec.endpoints.delta_plus, rec.observation.mark(), rec.original_index});
    return out;
}

ImputedFit fit_imputed(std::span<const ImputedRecord> records) {
    std::vector<ImputedRecord> sorted(records.begin(), records.end());
    std::sort(sorted.begin(), sorted.end(), [](const ImputedRecord& a, const ImputedRecord& b) {
        if (a.u != b.u) return a.u < b.u;
        if (a.delta_plus != b.delta_plus) return a.delta_plus > b.delta_plus;
        return a.original_index < b.original_index;
    });
    std::vector<int> delta(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) delta[i] = sorted[i].delta_plus;
    const auto w = product_limit_weights<double>(delta);

    ImputedFit fit;
    std::map<std::pair<double, double>, std::size_t> seen;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i].delta_plus == 0) continue;
        auto [it, inserted] = seen.try_emplace({sorted[i].u, *sorted[i].mark}, fit.points.size());
        if (inserted) fit.points.push_back({sorted[i].u, *sorted[i].mark, 0.0});
        fit.points[it->second].mass += w.per_rank[i];
    }
    if (!sorted.empty() && sorted.back().delta_plus == 0) {
        fit.halfplane_u = sorted.back().u;
        fit.censored_tail = w.tail;
    }
    return fit;
}

NonuniquenessDiagnostics nonuniqueness_diagnostics(const MassVector& mv) {
    const auto segs = mv.segments();
    double longest = 0.0;
    for (std::size_t m = 0; m < segs.size(); ++m)
        if (mv.masses[m] > 0.0) longest = std::max(longest, segs[m].r - segs[m].d);
    return {longest, mv.censored_tail};
}

}  // namespace markmle
