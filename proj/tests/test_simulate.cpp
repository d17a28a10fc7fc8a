#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "markmle/cli.hpp"
#include "markmle/csv_io.hpp"
#include "markmle/simulate.hpp"

using namespace markmle;
using Catch::Approx;

namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code;
    std::string out, err;
};

CliResult run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "markmle");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("markmle_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

}  // namespace

TEST_CASE("example 1 observes the event a quarter of the time") {
    const auto d = gen_example({1, 1000000, 2024});
    std::size_t events = 0;
    for (const auto& o : d) events += o.event_observed() ? 1 : 0;
    const double p = double(events) / double(d.size());
    const double se = std::sqrt(0.25 * 0.75 / double(d.size()));
    CHECK(std::abs(p - 0.25) < 3.0 * se);
}

TEST_CASE("example 3 marks equal the failure time") {
    for (const auto& o : gen_example({3, 5000, 7})) {
        if (!o.event_observed()) continue;
        const auto ep = derive_endpoints(o);
        REQUIRE(*o.mark() > ep.left);
        REQUIRE(*o.mark() <= ep.right.value());
    }
}

TEST_CASE("example 4 draws the three time atoms") {
    std::map<std::pair<double, double>, int> counts;
    const int n = 100000;
    for (const auto& o : gen_example({4, std::size_t(n), 3})) ++counts[{o.times()[0], o.times()[1]}];
    REQUIRE(counts.size() == 3);
    CHECK(counts[{0.25, 0.5}] / double(n) == Approx(0.3).margin(0.01));
    CHECK(counts[{0.25, 0.75}] / double(n) == Approx(0.3).margin(0.01));
    CHECK(counts[{0.5, 0.75}] / double(n) == Approx(0.4).margin(0.01));
}

TEST_CASE("generation is deterministic and independent of sample size") {
    const auto a = gen_example({2, 500, 99});
    const auto b = gen_example({2, 500, 99});
    const auto c = gen_example({2, 800, 99});
    CHECK(a == b);
    CHECK(std::equal(a.begin(), a.end(), c.begin()));
    CHECK(gen_example({2, 500, 99}, 1) != a);
    CHECK_THROWS_AS(gen_example({2, 0, 99}), std::invalid_argument);
    CHECK(gen_example({2, 1, 99}).size() == 1);
}

TEST_CASE("study tables have the documented shape") {
    auto cfg = StudyConfig::defaults({1, 1, 5}, 0.1);
    cfg.include.repaired = true;
    const auto r = run_study(cfg);
    CHECK(r.marginal.columns.size() == 7);
    CHECK(r.marginal.rows.size() == cfg.x_grid.size());
    CHECK(r.surface.rows.size() == cfg.x_grid.size() * cfg.y_grid.size());
    CHECK(r.slice.rows.size() == cfg.y_grid.size());
    CHECK(r.slice_repaired.rows.size() == 21);
    CHECK(std::isinf(r.slice_repaired.rows.back()[1]));
    CHECK(r.summary_value("n") == 1.0);
    // Outside the window the limit column is undefined.
    CHECK(std::isnan(r.marginal.rows.back()[3]));
}

TEST_CASE("step-versus-limit gap checks both sides of each jump") {
    auto step = [](double x) { return x < 0.5 ? 0.0 : 1.0; };
    auto line = [](double x) { return x; };
    CHECK(sup_gap_step_vs_continuous(step, {0.5}, line, 1.0) == Approx(0.5));
}

TEST_CASE("cli fit writes masses and the marginal curve") {
    const auto dir = scratch("fit");
    write_text(dir / "in.csv", "t1,j,z\n1,1,0.5\n2,2,\n3,1,1.5\n");
    const auto r = run_cli({"fit", "--input", (dir / "in.csv").string(), "--output", (dir / "m.csv").string(),
                            "--marginal"});
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "m.csv") == "d,r,z,mass\n0,1,0.5,0.3333333333333333\n2,3,1.5,0.6666666666666667\n");
    CHECK(slurp(dir / "m_marginal.csv") == "x,value\n0,0\n1,0.3333333333333333\n3,1\n");
}

TEST_CASE("cli exit codes") {
    const auto dir = scratch("codes");
    write_text(dir / "empty.csv", "");
    write_text(dir / "bad.csv", "t1,j,z\n1,1,0.5\n1,2,0.7\n");
    const auto out = (dir / "o.csv").string();
    CHECK(run_cli({}).code == cli::Usage);
    CHECK(run_cli({"--help"}).code == cli::Ok);
    CHECK(run_cli({"fit", "--input", (dir / "missing.csv").string(), "--output", out}).code == cli::Usage);
    CHECK(run_cli({"fit", "--input", (dir / "empty.csv").string(), "--output", out}).code == cli::Parse);
    const auto bad = run_cli({"fit", "--input", (dir / "bad.csv").string(), "--output", out});
    CHECK(bad.code == cli::Invariant);
    CHECK(bad.err.find("row 2") != std::string::npos);
    const auto wide = run_cli({"limit", "--example", "1", "--tau", "0.6", "--output", out});
    CHECK(wide.code == cli::Numeric);
    CHECK_FALSE(wide.err.empty());
    CHECK(run_cli({"check", "--model", "nonsense"}).code == cli::Usage);
    CHECK(run_cli({"check"}).code == cli::Usage);
}

TEST_CASE("cli limit marginal at the slice point") {
    const auto dir = scratch("limit");
    const auto r = run_cli({"limit", "--example", "1", "--tau", "0.45", "--x", "0.25", "--output",
                            (dir / "s.csv").string()});
    REQUIRE(r.code == 0);
    std::istringstream in(slurp(dir / "s_marginal.csv"));
    std::string line;
    double at = -1.0;
    while (std::getline(in, line))
        if (line.rfind("0.25,", 0) == 0) at = std::stod(line.substr(5));
    CHECK(at == Approx(0.0920569).margin(1e-6));
}

TEST_CASE("cli check reports example 1") {
    const auto r = run_cli({"check", "--example", "1"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("verdict,inconsistent") != std::string::npos);
    CHECK(r.out.find("\n0.25,0.0965735902") != std::string::npos);
    const auto deg = run_cli({"check", "--model", "degenerate"});
    REQUIRE(deg.code == 0);
    CHECK(deg.out.find("verdict,consistent_within_tol") != std::string::npos);
    CHECK(run_cli({"check", "--model", "orderstat:5:1"}).code == 0);
}

TEST_CASE("cli simulate is deterministic and repair covers every risk") {
    const auto a = scratch("sim_a"), b = scratch("sim_b");
    for (const auto& d : {a, b})
        REQUIRE(run_cli({"simulate", "--example", "1", "--n", "2000", "--seed", "42", "--out-dir", d.string(),
                         "--grid-step", "0.05"})
                    .code == 0);
    for (const char* f : {"dataset.csv", "marginal.csv", "surface.csv", "slice.csv", "summary.csv"}) {
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK_FALSE(fs::exists(a / "slice_repaired.csv"));
    CHECK(read_observations_file((a / "dataset.csv").string()) == gen_example({1, 2000, 42}));

    const auto rep = a / "repair.csv";
    REQUIRE(run_cli({"repair", "--input", (a / "dataset.csv").string(), "--grid-k", "20", "--grid-min", "0",
                     "--grid-max", "4", "--output", rep.string()})
                .code == 0);
    std::set<std::string> risks;
    std::istringstream in(slurp(rep));
    std::string line;
    std::getline(in, line);
    CHECK(line == "risk,x,value");
    while (std::getline(in, line)) risks.insert(line.substr(0, line.find(',')));
    CHECK(risks.size() == 21);
}
