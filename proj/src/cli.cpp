#include "markmle/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "markmle/consistency.hpp"
#include "markmle/csv_io.hpp"
#include "markmle/limits.hpp"
#include "markmle/maximal_intersections.hpp"
#include "markmle/population_model.hpp"
#include "markmle/product_limit.hpp"
#include "markmle/repaired.hpp"
#include "markmle/simulate.hpp"

namespace markmle::cli {

namespace {

namespace fs = std::filesystem;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string sibling(const std::string& path, const std::string& suffix) {
    const fs::path p(path);
    return (p.parent_path() / (p.stem().string() + suffix + p.extension().string())).string();
}

Bound parse_bound(const std::string& s) { return s == "upper" ? Bound::Upper : Bound::Lower; }

// --- fit -------------------------------------------------------------------

struct FitArgs {
    std::string input, output, bound = "lower";
    bool marginal = false;
};

int fit(const FitArgs& a) {
    const auto data = read_observations_file(a.input);
    const auto ordered = order_dataset(data);
    const auto support = maximal_intersections(ordered);
    const auto masses = fit_masses(ordered, support);

    Table t{{"d", "r", "z", "mass"}, {}};
    const auto segs = masses.segments();
    for (std::size_t m = 0; m < segs.size(); ++m) t.rows.push_back({segs[m].d, segs[m].r, segs[m].mark, masses.masses[m]});
    if (support.has_halfplane()) t.rows.push_back({support.regions.back().u_last, kInf, kNaN, masses.censored_tail});
    write_table_file(a.output, t);

    if (a.marginal) {
        const MarginalBounds bounds(masses);
        const Bound bound = parse_bound(a.bound);
        // Each row gives the value of the step function from x onward.
        Table m{{"x", "value"}, {{0.0, 0.0}}};
        for (double x : bounds.jump_points(bound)) {
            const double after = bound == Bound::Lower ? bounds(x, bound) : bounds(std::nextafter(x, kInf), bound);
            if (x == 0.0)
                m.rows.front()[1] = after;
            else
                m.rows.push_back({x, after});
        }
        write_table_file(sibling(a.output, "_marginal"), m);
    }
    return Ok;
}

// --- limit -----------------------------------------------------------------

struct LimitArgs {
    int example = 1;
    double step = 0.02;
    std::optional<double> tau;
    std::string output;
    std::vector<double> extra_x;
};

int limit(const LimitArgs& a) {
    const auto model = example_model(a.example);
    const auto d = example_defaults(a.example);
    const double tau = a.tau.value_or(d.tau);
    const auto xs = step_grid(0.0, tau, a.step);
    const auto ys = step_grid(d.y_min, d.y_max, a.step);
    const auto window = EvaluationWindow::make(model, tau, xs);
    const LimitEngine engine(model, window.tau());

    std::vector<std::vector<double>> by_y(ys.size());
    parallel_for(ys.size(), [&](std::size_t iy) { by_y[iy] = engine.Flim_curve(ys[iy], xs); });
    Table surface{{"x", "y", "value"}, {}};
    for (std::size_t ix = 0; ix < xs.size(); ++ix)
        for (std::size_t iy = 0; iy < ys.size(); ++iy) surface.rows.push_back({xs[ix], ys[iy], by_y[iy][ix]});
    write_table_file(a.output, surface);

    std::vector<double> mx = xs;
    mx.insert(mx.end(), a.extra_x.begin(), a.extra_x.end());
    std::sort(mx.begin(), mx.end());
    mx.erase(std::unique(mx.begin(), mx.end()), mx.end());
    Table marginal{{"x", "value"}, {}};
    for (double x : mx) marginal.rows.push_back({x, engine.FXlim(x)});
    write_table_file(sibling(a.output, "_marginal"), marginal);
    return Ok;
}

// --- check -----------------------------------------------------------------

struct CheckArgs {
    std::optional<int> example;
    std::string model;
    double step = 0.05;
    double y_step = 0.25;
    std::optional<double> tau;
};

struct ResolvedModel {
    PopulationModel model;
    double tau;
};

ResolvedModel resolve(const CheckArgs& a) {
    if (a.example) return {example_model(*a.example), a.tau.value_or(example_defaults(*a.example).tau)};
    if (a.model == "degenerate") return {degenerate_model(), a.tau.value_or(1.2)};
    if (a.model.rfind("orderstat:", 0) == 0) {
        std::istringstream in(a.model.substr(10));
        int k = 0;
        char colon = 0;
        double theta = 0.0;
        if (!(in >> k >> colon >> theta) || colon != ':' || k < 1 || !(theta > 0.0))
            throw std::invalid_argument("model must look like orderstat:K:THETA");
        auto model = order_stat_uniform_model(k, theta, uniform_exponential_law(1.0));
        if (a.tau) return {std::move(model), *a.tau};
        const auto grid = step_grid(0.0, std::min(theta, 1.0) * (1.0 - 1e-9), a.step);
        const double tau = default_tau(model, grid);
        return {std::move(model), tau};
    }
    throw std::invalid_argument("unknown model '" + a.model + "' (use degenerate or orderstat:K:THETA)");
}

int check(const CheckArgs& a, std::ostream& out) {
    const auto [model, tau] = resolve(a);
    const auto window = EvaluationWindow::make(model, tau, step_grid(0.0, tau, a.step));
    const auto ys = step_grid(model.marks.y_min, model.marks.y_max, a.y_step);
    const auto report = check_consistency(model, window, ys);

    out << "model," << model.name << '\n' << "tau," << format_number(tau) << '\n';
    out << "x,lambda_limit,lambda_true,gap\n";
    for (const auto& r : report.rows)
        out << format_number(r.x) << ',' << format_number(r.lambda_limit) << ',' << format_number(r.lambda_true)
            << ',' << format_number(r.gap) << '\n';
    out << "hazard_x_gap," << format_number(report.hazard_x_gap) << '\n';
    out << "hazard_xy_gap," << format_number(report.hazard_xy_gap) << '\n';
    out << "threshold," << format_number(report.threshold) << '\n';

    const auto* times = std::get_if<ContinuousTimeLaw>(&model.times);
    if (times && times->k == 1) {
        const QuadratureConfig cfg;
        auto G = [&](double x) {
            return x <= 0.0 ? 0.0 : integrate(times->marginal_sum, 0.0, std::min(x, times->support_max), cfg,
                                              times->breakpoints);
        };
        try {
            const auto fit = logistic_family_check(G, model.marks.marginal_x, window.grid());
            out << "logistic_c_fit," << format_number(fit.c_fit) << '\n';
            out << "logistic_max_fit_error," << format_number(fit.max_fit_error) << '\n';
            out << "logistic_gamma," << format_number(fit.gamma) << '\n';
            out << "logistic_F_C_gamma," << format_number(fit.f_c_at_gamma) << '\n';
        } catch (const NumericError&) {
            // No usable grid points; the logistic family check does not apply.
        }
    }
    out << "verdict," << (report.verdict == Verdict::Inconsistent ? "inconsistent" : "consistent_within_tol") << '\n';
    return Ok;
}

// --- repair ----------------------------------------------------------------

struct RepairArgs {
    std::string input, output, bound = "lower";
    int grid_k = 20;
    double grid_min = 0.0, grid_max = 1.0;
};

int repair(const RepairArgs& a) {
    const auto data = read_observations_file(a.input);
    if (data.empty()) throw DataError(DataError::Kind::Empty, "dataset is empty");
    const auto grid = MarkGrid::equidistant(a.grid_min, a.grid_max, a.grid_k);
    const auto est = fit_cr_mle(discretize_marks(data, grid), EmConfig{});
    const Bound bound = parse_bound(a.bound);

    Table t{{"risk", "x", "value"}, {}};
    for (int j = 1; j <= grid.risks(); ++j) {
        std::vector<double> jumps;
        for (const auto& r : est.regions)
            if (r.risk == j && r.mass > 0.0) jumps.push_back(bound == Bound::Lower ? r.b : r.a);
        std::sort(jumps.begin(), jumps.end());
        jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());
        t.rows.push_back({double(j), 0.0, 0.0});
        for (double x : jumps) {
            const double v = bound == Bound::Lower ? eval_risk_F(est, x, j, bound)
                                                   : eval_risk_F(est, std::nextafter(x, kInf), j, bound);
            if (x == 0.0)
                t.rows.back()[2] = v;
            else
                t.rows.push_back({double(j), x, v});
        }
    }
    write_table_file(a.output, t);
    return Ok;
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
    int example = 1;
    std::size_t n = 10000;
    std::uint64_t seed = 0;
    std::uint64_t replication = 0;
    std::string out_dir;
    double step = 0.02;
    bool repaired = false;
};

int simulate(const SimulateArgs& a) {
    ExampleSpec spec{a.example, a.n, a.seed};
    auto cfg = StudyConfig::defaults(spec, a.step);
    cfg.replication = a.replication;
    cfg.include.repaired = a.repaired;
    const auto result = run_study(cfg);

    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    {
        std::ofstream f(dir / "dataset.csv", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir / "dataset.csv").string());
        write_observations(f, result.data);
    }
    write_table_file((dir / "marginal.csv").string(), result.marginal);
    write_table_file((dir / "surface.csv").string(), result.surface);
    write_table_file((dir / "slice.csv").string(), result.slice);
    if (a.repaired) write_table_file((dir / "slice_repaired.csv").string(), result.slice_repaired);
    std::ofstream s(dir / "summary.csv", std::ios::binary);
    s << "metric,value\n";
    for (const auto& [name, value] : result.summary)
        s << name << ',' << (name == "seed" ? std::to_string(a.seed) : format_number(value)) << '\n';
    return Ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Interval-censored survival with continuous marks"};
    app.require_subcommand(1);

    FitArgs fit_args;
    auto* fit_cmd = app.add_subcommand("fit", "Fit the product-limit MLE to a dataset");
    fit_cmd->add_option("--input", fit_args.input, "Observation CSV")->required();
    fit_cmd->add_option("--output", fit_args.output, "Masses CSV")->required();
    fit_cmd->add_option("--bound", fit_args.bound, "Bound for the marginal output")
        ->check(CLI::IsMember({"lower", "upper"}));
    fit_cmd->add_flag("--marginal", fit_args.marginal, "Also write <output>_marginal.csv");

    LimitArgs limit_args;
    auto* limit_cmd = app.add_subcommand("limit", "Tabulate the limit of the lower MLE for an example");
    limit_cmd->add_option("--example", limit_args.example)->required()->check(CLI::Range(1, 4));
    limit_cmd->add_option("--grid-step", limit_args.step)->check(CLI::PositiveNumber);
    limit_cmd->add_option("--tau", limit_args.tau);
    limit_cmd->add_option("--output", limit_args.output, "Surface CSV")->required();
    limit_cmd->add_option("--x", limit_args.extra_x, "Extra x points for the marginal CSV");

    CheckArgs check_args;
    auto* check_cmd = app.add_subcommand("check", "Compare limiting and true hazards");
    auto* ex_opt = check_cmd->add_option("--example", check_args.example)->check(CLI::Range(1, 4));
    auto* model_opt = check_cmd->add_option("--model", check_args.model, "degenerate or orderstat:K:THETA");
    ex_opt->excludes(model_opt);
    check_cmd->add_option("--grid-step", check_args.step)->check(CLI::PositiveNumber);
    check_cmd->add_option("--y-step", check_args.y_step)->check(CLI::PositiveNumber);
    check_cmd->add_option("--tau", check_args.tau);

    RepairArgs repair_args;
    auto* repair_cmd = app.add_subcommand("repair", "Fit the repaired (competing-risks) MLE");
    repair_cmd->add_option("--input", repair_args.input)->required();
    repair_cmd->add_option("--output", repair_args.output)->required();
    repair_cmd->add_option("--grid-k", repair_args.grid_k)->check(CLI::PositiveNumber);
    repair_cmd->add_option("--grid-min", repair_args.grid_min)->required();
    repair_cmd->add_option("--grid-max", repair_args.grid_max)->required();
    repair_cmd->add_option("--bound", repair_args.bound)->check(CLI::IsMember({"lower", "upper"}));

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate an example and write the study tables");
    sim_cmd->add_option("--example", sim_args.example)->required()->check(CLI::Range(1, 4));
    sim_cmd->add_option("--n", sim_args.n)->required()->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim_args.seed)->required();
    sim_cmd->add_option("--replication", sim_args.replication);
    sim_cmd->add_option("--out-dir", sim_args.out_dir)->required();
    sim_cmd->add_option("--grid-step", sim_args.step)->check(CLI::PositiveNumber);
    sim_cmd->add_flag("--repaired", sim_args.repaired);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Ok : Usage;
    }

    try {
        if (*fit_cmd) return fit(fit_args);
        if (*limit_cmd) return limit(limit_args);
        if (*check_cmd) {
            if (!check_args.example && check_args.model.empty()) {
                err << "check: one of --example or --model is required\n";
                return Usage;
            }
            return check(check_args, out);
        }
        if (*repair_cmd) return repair(repair_args);
        if (*sim_cmd) return simulate(sim_args);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return Parse;
    } catch (const RowError& e) {
        err << "invalid observation: " << e.what() << '\n';
        return Invariant;
    } catch (const DataError& e) {
        err << "invalid data: " << e.what() << '\n';
        return Invariant;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return Numeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return Usage;
    }
    return Usage;
}

}  // namespace markmle::cli
