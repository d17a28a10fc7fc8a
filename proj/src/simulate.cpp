#include "markmle/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "markmle/limits.hpp"
#include "markmle/maximal_intersections.hpp"
#include "markmle/population_model.hpp"
#include "markmle/product_limit.hpp"
#include "markmle/rng.hpp"

namespace markmle {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

Observation observe(double x, double y, std::vector<double> times) {
    const auto k = static_cast<int>(times.size());
    int j = k + 1;
    for (int i = 0; i < k; ++i)
        if (x <= times[static_cast<std::size_t>(i)]) {
            j = i + 1;
            break;
        }
    return Observation(std::move(times), j, j <= k ? std::optional<double>(y) : std::nullopt);
}

Observation draw(int id, RecordStream& rs) {
    switch (id) {
        case 1: {
            const double x = rs.next_uniform();
            const double y = -std::log(rs.next_uniform());
            const double t = 0.5 * rs.next_uniform();
            return observe(x, y, {t});
        }
        case 2: {
            const double x = rs.next_uniform();
            const double mean = 2.0 / (2.0 * x + 1.0);
            const double y = -mean * std::log(rs.next_uniform());
            const double t = rs.next_uniform();
            return observe(x, y, {t});
        }
        case 3: {
            const double x = 2.0 * rs.next_uniform();
            const double t1 = rs.next_uniform();
            const double t2 = 1.0 + rs.next_uniform();
            return observe(x, x, {t1, t2});
        }
        case 4: {
            const double a = rs.next_uniform(), b = rs.next_uniform();
            const double u = rs.next_uniform();
            std::vector<double> times = u < 0.3 ? std::vector<double>{0.25, 0.5}
                                        : u < 0.6 ? std::vector<double>{0.25, 0.75}
                                                  : std::vector<double>{0.5, 0.75};
            return observe(std::min(a, b), std::max(a, b), std::move(times));
        }
        default: throw std::invalid_argument("example id must be 1..4");
    }
}

}  // namespace

std::vector<Observation> gen_example(const ExampleSpec& spec, std::uint64_t replication) {
    if (spec.n < 1) throw std::invalid_argument("sample size must be at least 1");
    if (spec.id < 1 || spec.id > 4) throw std::invalid_argument("example id must be 1..4");
    std::vector<Observation> out;
    out.reserve(spec.n);
    for (std::size_t i = 0; i < spec.n; ++i) {
        RecordStream rs(spec.seed, replication, i);
        out.push_back(draw(spec.id, rs));
    }
    return out;
}

std::vector<double> step_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("grid needs step > 0 and hi >= lo");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> grid;
    grid.reserve(count + 1);
    // Rounded to 12 decimals so 0.02 * 3 prints as 0.06.
    for (std::size_t i = 0; i <= count; ++i) grid.push_back(std::round((lo + double(i) * step) * 1e12) / 1e12);
    return grid;
}

StudyConfig StudyConfig::defaults(const ExampleSpec& spec, double step) {
    const auto d = example_defaults(spec.id);
    const auto model = example_model(spec.id);
    StudyConfig c;
    c.example = spec;
    c.x_grid = step_grid(0.0, model.x_support_max, step);
    c.y_grid = step_grid(d.y_min, d.y_max, step);
    c.tau = d.tau;
    c.x0 = d.x0;
    return c;
}

double StudyResult::summary_value(const std::string& name) const {
    for (const auto& [key, value] : summary)
        if (key == name) return value;
    throw std::out_of_range("no summary entry " + name);
}

unsigned worker_count() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MARKMLE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) n = std::min<unsigned>(n, static_cast<unsigned>(v));
    }
    return n;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = count;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

double sup_gap_step_vs_continuous(const std::function<double(double)>& step, std::vector<double> jumps,
                                  const std::function<double(double)>& limit, double tau) {
    jumps.push_back(0.0);
    jumps.push_back(tau);
    double worst = 0.0;
    for (double u : jumps) {
        if (u < 0.0 || u > tau) continue;
        const double lim = limit(u);
        worst = std::max(worst, std::abs(step(u) - lim));
        // Left limits on both sides: the limit may jump too when the time law has atoms.
        if (u > 0.0) {
            const double before = std::nextafter(u, -kInf);
            worst = std::max(worst, std::abs(step(before) - limit(before)));
        }
    }
    return worst;
}

StudyResult run_study(const StudyConfig& config) {
    StudyResult result;
    result.data = gen_example(config.example, config.replication);
    const auto model = example_model(config.example.id);
    const auto defaults = example_defaults(config.example.id);
    const auto& F0 = model.marks.joint;

    const auto ordered = order_dataset(result.data);
    const auto support = maximal_intersections(ordered);
    const auto masses = fit_masses(ordered, support);
    const MarginalBounds bounds(masses);

    std::optional<LimitEngine> engine;
    if (config.include.limit_lower) engine.emplace(model, config.tau, config.quadrature);
    auto in_window = [&](double x) { return engine && x <= config.tau; };

    std::optional<SubDistributionEstimate> repaired;
    std::optional<MarkGrid> mark_grid;
    if (config.include.repaired) {
        mark_grid = MarkGrid::equidistant(defaults.y_min, defaults.y_max, config.mark_grid_k);
        repaired = fit_cr_mle(discretize_marks(result.data, *mark_grid), config.em);
    }
    const int all_risks = config.mark_grid_k + 1;

    auto opt = [](bool on, auto&& f) { return on ? f() : kNaN; };

    auto& marginal = result.marginal;
    marginal.columns = {"x", "mle_lower", "mle_upper", "limit_lower", "truth"};
    if (repaired) {
        marginal.columns.push_back("repaired_lower");
        marginal.columns.push_back("repaired_upper");
    }
    for (double x : config.x_grid) {
        std::vector<double> row{x,
                                opt(config.include.mle_lower, [&] { return bounds(x, Bound::Lower); }),
                                opt(config.include.mle_upper, [&] { return bounds(x, Bound::Upper); }),
                                opt(in_window(x), [&] { return engine->FXlim(x); }),
                                opt(config.include.truth, [&] { return model.marks.marginal_x(x); })};
        if (repaired) {
            row.push_back(eval_repaired_F(*repaired, x, all_risks, Bound::Lower));
            row.push_back(eval_repaired_F(*repaired, x, all_risks, Bound::Upper));
        }
        marginal.rows.push_back(std::move(row));
    }

    // Surface: one limit table per y, computed in parallel.
    std::vector<double> xs_window;
    for (double x : config.x_grid)
        if (in_window(x)) xs_window.push_back(x);
    std::vector<std::vector<double>> limit_by_y(config.y_grid.size());
    if (engine)
        parallel_for(config.y_grid.size(),
                     [&](std::size_t iy) { limit_by_y[iy] = engine->Flim_curve(config.y_grid[iy], xs_window); });
    auto& surface = result.surface;
    surface.columns = {"x", "y", "mle_lower", "limit_lower", "truth"};
    for (std::size_t ix = 0; ix < config.x_grid.size(); ++ix) {
        const double x = config.x_grid[ix];
        for (std::size_t iy = 0; iy < config.y_grid.size(); ++iy) {
            const double y = config.y_grid[iy];
            surface.rows.push_back({x, y, opt(config.include.mle_lower, [&] { return eval_F(masses, x, y, Bound::Lower); }),
                                    ix < xs_window.size() && engine ? limit_by_y[iy][ix] : kNaN,
                                    opt(config.include.truth, [&] { return F0(x, y); })});
        }
    }

    const double x0 = config.x0;
    auto& slice = result.slice;
    slice.columns = {"y", "mle_lower", "mle_upper", "limit_lower", "truth"};
    for (double y : config.y_grid)
        slice.rows.push_back({y, opt(config.include.mle_lower, [&] { return eval_F(masses, x0, y, Bound::Lower); }),
                              opt(config.include.mle_upper, [&] { return eval_F(masses, x0, y, Bound::Upper); }),
                              opt(in_window(x0), [&] { return engine->Flim(x0, y); }),
                              opt(config.include.truth, [&] { return F0(x0, y); })});

    auto& summary = result.summary;
    summary = {{"example", double(config.example.id)},
               {"n", double(config.example.n)},
               {"seed", double(config.example.seed)},
               {"replication", double(config.replication)},
               {"tau", config.tau},
               {"x0", x0},
               {"mle_lower_at_x0", bounds(x0, Bound::Lower)},
               {"truth_at_x0", model.marks.marginal_x(x0)},
               {"gap_truth_at_x0", std::abs(bounds(x0, Bound::Lower) - model.marks.marginal_x(x0))}};
    if (engine) {
        summary.emplace_back("limit_lower_at_x0", in_window(x0) ? engine->FXlim(x0) : kNaN);
        summary.emplace_back("sup_gap_marginal_limit",
                             sup_gap_step_vs_continuous([&](double x) { return bounds(x, Bound::Lower); },
                                                        bounds.jump_points(Bound::Lower),
                                                        [&](double x) { return engine->FXlim(x); }, config.tau));
    }

    if (repaired) {
        auto& sr = result.slice_repaired;
        sr.columns = {"j", "y", "repaired_lower", "repaired_upper", "truth"};
        const auto cuts = mark_grid->cutpoints();
        for (int j = 1; j <= all_risks; ++j) {
            const double y = j <= mark_grid->K() ? cuts[static_cast<std::size_t>(j - 1)] : kInf;
            sr.rows.push_back({double(j), y, eval_repaired_F(*repaired, x0, j, Bound::Lower),
                               eval_repaired_F(*repaired, x0, j, Bound::Upper), F0(x0, y)});
        }
        double worst = 0.0;
        for (double x : config.x_grid) {
            if (x > config.tau) continue;
            for (int j = 1; j <= mark_grid->K(); ++j) {
                const double y = cuts[static_cast<std::size_t>(j - 1)];
                worst = std::max(worst, std::abs(eval_repaired_F(*repaired, x, j, Bound::Lower) - F0(x, y)));
            }
        }
        summary.emplace_back("sup_gap_repaired_truth", worst);
        summary.emplace_back("em_iterations", double(repaired->iterations));
        summary.emplace_back("em_converged", repaired->converged ? 1.0 : 0.0);
    }
    return result;
}

}  // namespace markmle
