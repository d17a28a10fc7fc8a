#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace markmle {

// Law of (X, Y). The joint CDF accepts y = +inf.
struct MarkedLaw {
    std::function<double(double, double)> joint;
    std::function<double(double)> marginal_x;
    std::function<double(double)> marginal_y;
    // d/dx F0(x, y) off the atoms of X; may be empty when X is purely atomic.
    std::function<double(double, double)> x_density;
    // Atoms of X and the jump of F0(., y) at each of them.
    std::vector<double> x_atoms;
    std::function<double(double, double)> x_jump;
    // Points in x where F0 or its density is not smooth.
    std::vector<double> breakpoints;
    // Range of marks used for evaluation grids.
    double y_min = 0.0, y_max = 1.0;
};

/// Observation-time law with densities, kept in the aggregated form used by
/// the limit formulas:
///   marginal_sum(t)       = sum_j g_j(t)
///   consecutive_sum(s, t) = sum_{j>=2} g_{j-1,j}(s, t),  0 <= s <= t
///   last_marginal(t)      = g_k(t)
struct ContinuousTimeLaw {
    int k = 1;
    std::function<double(double)> marginal_sum;
    std::function<double(double, double)> consecutive_sum;
    std::function<double(double)> last_marginal;
    std::vector<double> breakpoints;
    double support_max = 1.0;

    static ContinuousTimeLaw from_components(std::vector<std::function<double(double)>> marginals,
                                             std::vector<std::function<double(double, double)>> consecutive,
                                             std::vector<double> breakpoints, double support_max);
};

struct TimeAtom {
    std::vector<double> times;  // strictly increasing, size k
    double weight;
};

struct AtomicTimeLaw {
    int k = 1;
    std::vector<TimeAtom> atoms;
};

struct PopulationModel {
    std::string name;
    MarkedLaw marks;
    std::variant<ContinuousTimeLaw, AtomicTimeLaw> times;
    double x_support_max = 1.0;

    int k() const;
    bool atomic_times() const { return std::holds_alternative<AtomicTimeLaw>(times); }
};

/// Simulation example 1..4 with its hard-coded law.
PopulationModel example_model(int id);

struct ExampleDefaults {
    double tau;    // evaluation window
    double x0;     // slice location
    double y_min, y_max;
};
ExampleDefaults example_defaults(int id);

/// Times fixed at (0.5, 1, 1.5), X atomic on {0.5, 1, 2} with weights
/// (0.3, 0.3, 0.4), Y ~ Exp(1) independent of X. Every X below the last
/// inspection time coincides with an inspection time, so nothing is lost.
PopulationModel degenerate_model();

/// X ~ Unif(0, theta'), Y ~ Exp(1) independent; used as the default law for
/// the order-statistics construction.
MarkedLaw uniform_exponential_law(double x_max);

/// Times are the order statistics of k independent Unif(0, theta) variables.
PopulationModel order_stat_uniform_model(int k, double theta, MarkedLaw law);

/// V^k(x, y) = int_[0,x] F0(s, y) dQ_x^k(s), Q_x^k(s) = (1-(x-s)/theta)^k - (1-x/theta)^k.
double order_stat_direct_V(const MarkedLaw& law, int k, double theta, double x, double y);

}  // namespace markmle
