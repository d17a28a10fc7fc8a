#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "markmle/observation.hpp"
#include "markmle/quadrature.hpp"
#include "markmle/repaired.hpp"

namespace markmle {

struct ExampleSpec {
    int id = 1;
    std::size_t n = 10000;
    std::uint64_t seed = 0;
};

/// Draws the sample of an example. Record i of replication r uses only the
/// counter blocks of (seed, r, i), so output does not depend on scheduling.
std::vector<Observation> gen_example(const ExampleSpec& spec, std::uint64_t replication = 0);

struct StudyCurves {
    bool mle_lower = true;
    bool mle_upper = true;
    bool limit_lower = true;
    bool truth = true;
    bool repaired = false;
};

struct StudyConfig {
    ExampleSpec example;
    std::uint64_t replication = 0;
    std::vector<double> x_grid;
    std::vector<double> y_grid;
    double tau = 0.0;
    double x0 = 0.0;
    StudyCurves include;
    int mark_grid_k = 20;
    QuadratureConfig quadrature;
    EmConfig em;

    // Grids with the given step over the example's support, the example's
    // window and slice location.
    static StudyConfig defaults(const ExampleSpec& spec, double step = 0.02);
};

// Columns of doubles; NaN marks a value that is not defined (written empty).
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct StudyResult {
    std::vector<Observation> data;
    Table marginal;        // x, mle_lower, mle_upper, limit_lower, truth[, repaired_lower, repaired_upper]
    Table surface;         // x, y, mle_lower, limit_lower, truth
    Table slice;           // y, mle_lower, mle_upper, limit_lower, truth at x0
    Table slice_repaired;  // j, y, repaired_lower, repaired_upper, truth at x0
    std::vector<std::pair<std::string, double>> summary;

    double summary_value(const std::string& name) const;
};

StudyResult run_study(const StudyConfig& config);

/// sup over [0, tau] of |step - limit|, where step is a right-continuous step
/// function with the given jump points; both functions are compared at each
/// jump and just before it.
double sup_gap_step_vs_continuous(const std::function<double(double)>& step, std::vector<double> jumps,
                                  const std::function<double(double)>& limit, double tau);

// Worker count: MARKMLE_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

std::vector<double> step_grid(double lo, double hi, double step);

}  // namespace markmle
