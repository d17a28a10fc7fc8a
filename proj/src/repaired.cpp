#include "markmle/repaired.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace markmle {

MarkGrid::MarkGrid(std::vector<double> cutpoints) : cut_(std::move(cutpoints)) {
    if (cut_.empty()) throw std::invalid_argument("mark grid needs at least one cutpoint");
    for (std::size_t i = 0; i < cut_.size(); ++i) {
        if (!std::isfinite(cut_[i])) throw std::invalid_argument("mark grid cutpoints must be finite");
        if (i > 0 && !(cut_[i - 1] < cut_[i])) throw std::invalid_argument("mark grid must be strictly increasing");
    }
}

MarkGrid MarkGrid::equidistant(double y_min, double y_max, int K) {
    if (K < 1 || !(y_min < y_max)) throw std::invalid_argument("equidistant grid needs K >= 1 and y_min < y_max");
    std::vector<double> cut(static_cast<std::size_t>(K));
    for (int j = 1; j <= K; ++j) cut[static_cast<std::size_t>(j - 1)] = y_min + j * (y_max - y_min) / (K + 1);
    return MarkGrid(std::move(cut));
}

int MarkGrid::risk_of(double mark) const {
    return static_cast<int>(std::lower_bound(cut_.begin(), cut_.end(), mark) - cut_.begin()) + 1;
}

CompetingRisksDataset discretize_marks(std::span<const Observation> data, const MarkGrid& grid) {
    CompetingRisksDataset out;
    out.risks = grid.risks();
    out.records.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto ep = derive_endpoints(data[i]);
        if (ep.delta_plus == 1)
            out.records.push_back({ep.left, ep.right.value(), grid.risk_of(*data[i].mark()), i});
        else
            out.records.push_back({ep.left, std::numeric_limits<double>::infinity(), std::nullopt, i});
    }
    return out;
}

CrSupport cr_support_candidates(const CompetingRisksDataset& data) {
    struct Marker {
        double v;
        bool right;
    };
    std::vector<double> censored;
    std::vector<std::vector<const CompetingRisksRecord*>> by_risk(static_cast<std::size_t>(data.risks));
    double max_right = -std::numeric_limits<double>::infinity();
    for (const auto& r : data.records) {
        if (r.risk) {
            by_risk[static_cast<std::size_t>(*r.risk - 1)].push_back(&r);
            max_right = std::max(max_right, r.right);
        } else {
            censored.push_back(r.left);
        }
    }

    CrSupport out;
    for (int j = 1; j <= data.risks; ++j) {
        const auto& events = by_risk[static_cast<std::size_t>(j - 1)];
        if (events.empty()) continue;
        std::vector<Marker> markers;
        markers.reserve(censored.size() + 2 * events.size());
        for (double t : censored) markers.push_back({t, false});
        for (const auto* r : events) {
            markers.push_back({r->left, false});
            markers.push_back({r->right, true});
        }
        // Right endpoints sort before left endpoints at ties: (l, r] and (r, s]
        // share no point.
        std::sort(markers.begin(), markers.end(),
                  [](const Marker& p, const Marker& q) { return p.v != q.v ? p.v < q.v : p.right > q.right; });
        for (std::size_t i = 0; i + 1 < markers.size(); ++i)
            if (!markers[i].right && markers[i + 1].right) out.regions.push_back({j, markers[i].v, markers[i + 1].v});
    }
    if (!censored.empty()) {
        const double t_max = *std::max_element(censored.begin(), censored.end());
        if (!(max_right > t_max)) out.terminal_left = t_max;
    }
    return out;
}

double cr_log_likelihood(const CompetingRisksDataset& data, const CrSupport& support, std::span<const double> masses) {
    double ll = 0.0;
    for (const auto& rec : data.records) {
        double s = 0.0;
        for (std::size_t m = 0; m < support.regions.size(); ++m) {
            const auto& reg = support.regions[m];
            const bool inside = rec.risk ? reg.risk == *rec.risk && reg.a >= rec.left && reg.b <= rec.right
                                         : reg.a >= rec.left;
            if (inside) s += masses[m];
        }
        if (!rec.risk && support.terminal_left) s += masses[support.regions.size()];
        if (!(s > 0.0)) return -std::numeric_limits<double>::infinity();
        ll += std::log(s);
    }
    return ll;
}

namespace {

// Compatible candidates of every record as index ranges: observed events map
// to a contiguous block of their own risk line, censored records to a suffix
// of all candidates ordered by left endpoint (terminal region last).
struct EmLayout {
    std::size_t regions = 0, total = 0;
    std::vector<std::size_t> a_order;  // position -> candidate
    struct Range {
        bool by_line;
        std::size_t lo, hi;  // [lo, hi)
    };
    std::vector<Range> ranges;
};

EmLayout layout(const CompetingRisksDataset& data, const CrSupport& support) {
    EmLayout L;
    L.regions = support.regions.size();
    L.total = L.regions + (support.terminal_left ? 1 : 0);
    L.a_order.resize(L.regions);
    std::iota(L.a_order.begin(), L.a_order.end(), std::size_t{0});
    std::stable_sort(L.a_order.begin(), L.a_order.end(),
                     [&](std::size_t p, std::size_t q) { return support.regions[p].a < support.regions[q].a; });
    std::vector<double> a_sorted;
    for (std::size_t m : L.a_order) a_sorted.push_back(support.regions[m].a);
    if (support.terminal_left) {
        L.a_order.push_back(L.regions);
        a_sorted.push_back(*support.terminal_left);
    }

    const auto& regs = support.regions;
    for (const auto& rec : data.records) {
        if (rec.risk) {
            const int j = *rec.risk;
            auto line_begin = std::lower_bound(regs.begin(), regs.end(), j,
                                               [](const CrRegion& r, int risk) { return r.risk < risk; });
            auto line_end = std::upper_bound(line_begin, regs.end(), j,
                                             [](int risk, const CrRegion& r) { return risk < r.risk; });
            auto lo = std::lower_bound(line_begin, line_end, rec.left,
                                       [](const CrRegion& r, double v) { return r.a < v; });
            auto hi = std::upper_bound(lo, line_end, rec.right, [](double v, const CrRegion& r) { return v < r.b; });
            if (lo == hi) throw NumericError(NumericError::Kind::InternalConsistency, "observed set holds no candidate");
            L.ranges.push_back({true, static_cast<std::size_t>(lo - regs.begin()),
                                static_cast<std::size_t>(hi - regs.begin())});
        } else {
            const auto start = std::lower_bound(a_sorted.begin(), a_sorted.end(), rec.left);
            L.ranges.push_back({false, static_cast<std::size_t>(start - a_sorted.begin()), L.total});
        }
    }
    return L;
}

// One E-step: record probabilities S_i and per-candidate sums of 1/S_i.
// Long double prefix sums keep differences of nearly equal partial sums exact
// enough for tiny masses.
struct EStep {
    std::vector<long double> acc;
    double loglik;
};

EStep e_step(const EmLayout& L, std::span<const double> p) {
    std::vector<long double> line(L.regions + 1, 0.0L), by_a(L.total + 1, 0.0L);
    for (std::size_t m = 0; m < L.regions; ++m) line[m + 1] = line[m] + p[m];
    for (std::size_t q = 0; q < L.total; ++q) by_a[q + 1] = by_a[q] + p[L.a_order[q]];

    std::vector<long double> diff_line(L.regions + 1, 0.0L), diff_a(L.total + 1, 0.0L);
    double ll = 0.0;
    for (const auto& r : L.ranges) {
        const long double s = r.by_line ? line[r.hi] - line[r.lo] : by_a[r.hi] - by_a[r.lo];
        if (!(s > 0.0L)) {
            ll = -std::numeric_limits<double>::infinity();
            continue;
        }
        ll += std::log(static_cast<double>(s));
        auto& diff = r.by_line ? diff_line : diff_a;
        diff[r.lo] += 1.0L / s;
        diff[r.hi] -= 1.0L / s;
    }
    EStep out{std::vector<long double>(L.total, 0.0L), ll};
    long double run = 0.0L;
    for (std::size_t m = 0; m < L.regions; ++m) {
        run += diff_line[m];
        out.acc[m] = run;
    }
    run = 0.0L;
    for (std::size_t q = 0; q < L.total; ++q) {
        run += diff_a[q];
        out.acc[L.a_order[q]] += run;
    }
    return out;
}

}  // namespace

SubDistributionEstimate fit_cr_mle(const CompetingRisksDataset& data, const EmConfig& config) {
    if (data.records.empty()) throw DataError(DataError::Kind::Empty, "competing-risks dataset is empty");
    const CrSupport support = cr_support_candidates(data);
    const EmLayout L = layout(data, support);
    const double n = static_cast<double>(data.records.size());

    SubDistributionEstimate est;
    est.risks = data.risks;
    est.regions = support.regions;
    est.terminal_left = support.terminal_left;
    est.no_observed_events = support.regions.empty();

    std::vector<double> p(L.total, 1.0 / static_cast<double>(L.total));
    double previous = -std::numeric_limits<double>::infinity();
    for (int iter = 0;; ++iter) {
        const EStep e = e_step(L, p);
        est.trace.push_back(e.loglik);
        est.log_likelihood = e.loglik;
        if (iter > 0) {
            est.last_increment = e.loglik - previous;
            if (est.last_increment < -1e-12 * std::max(1.0, std::abs(previous))) est.monotone = false;
            double residual = 0.0;
            for (std::size_t m = 0; m < L.total; ++m)
                residual = std::max(residual, std::abs(p[m] - static_cast<double>(p[m] * e.acc[m] / n)));
            if (est.last_increment < config.tolerance && residual <= config.fixed_point_tolerance) {
                est.converged = true;
                break;
            }
        }
        if (iter == config.max_iterations) break;
        previous = e.loglik;
        for (std::size_t m = 0; m < L.total; ++m) p[m] = static_cast<double>(p[m] * e.acc[m] / n);
        est.iterations = iter + 1;
    }

    double kept = 0.0;
    for (double& m : p) {
        if (m < config.prune_below) m = 0.0;
        kept += m;
    }
    for (double& m : p) m /= kept;
    for (std::size_t m = 0; m < L.regions; ++m) est.regions[m].mass = p[m];
    if (support.terminal_left) est.censored_tail = p[L.regions];
    return est;
}

double self_consistency_residual(const CompetingRisksDataset& data, const SubDistributionEstimate& est) {
    const CrSupport support{est.regions, est.terminal_left};
    const EmLayout L = layout(data, support);
    std::vector<double> p;
    for (const auto& r : est.regions) p.push_back(r.mass);
    if (est.terminal_left) p.push_back(est.censored_tail);
    const EStep e = e_step(L, p);
    const double n = static_cast<double>(data.records.size());
    double worst = 0.0;
    for (std::size_t m = 0; m < L.total; ++m)
        worst = std::max(worst, std::abs(p[m] - static_cast<double>(p[m] * e.acc[m] / n)));
    return worst;
}

double eval_risk_F(const SubDistributionEstimate& est, double x, int risk, Bound bound) {
    if (risk < 1 || risk > est.risks) throw std::out_of_range("risk index outside 1..K+1");
    double total = 0.0;
    for (const auto& r : est.regions)
        if (r.risk == risk && (bound == Bound::Lower ? r.b <= x : r.a < x)) total += r.mass;
    return total;
}

double eval_repaired_F(const SubDistributionEstimate& est, double x, int j, Bound bound) {
    if (j < 1 || j > est.risks) throw std::out_of_range("grid index outside 1..K+1");
    double total = 0.0;
    for (const auto& r : est.regions)
        if (r.risk <= j && (bound == Bound::Lower ? r.b <= x : r.a < x)) total += r.mass;
    return total;
}

}  // namespace markmle
