#pragma once

#include "offreach/setcalc.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace offreach {

using VectorField = std::function<void(double t, std::span<const double> x, std::span<const double> u,
                                       std::span<double> dx)>;

struct DynamicsModel {
    std::size_t n = 0;
    std::size_t m = 0;
    VectorField f;
    std::vector<Interval> control_box;
    std::vector<double> x0;
    std::string label = "nominal";

    void validate() const;
};

struct SamplerSettings {
    double t = 1.0;
    std::size_t n_traj = 10000;
    std::size_t n_switch = 8;
    std::size_t rk4_steps = 256; // step = t / rk4_steps
    std::uint64_t seed = 1;
    std::size_t vertex_cap = 4096;
    std::size_t threads = 0; // 0: hardware concurrency
};

struct SampleCloud {
    std::size_t n = 0;
    std::vector<double> endpoints; // row-major, one row per trajectory
    std::vector<double> env_lo;    // per-axis extremes over every RK4 step
    std::vector<double> env_hi;

    std::size_t size() const { return n == 0 ? 0 : endpoints.size() / n; }
    std::span<const double> point(std::size_t k) const { return {endpoints.data() + k * n, n}; }
};

// Piecewise-constant input: segment s holds u from step starts[s] on.
struct InputSignal {
    std::vector<std::size_t> starts;
    std::vector<std::vector<double>> values;

    const std::vector<double>& at_step(std::size_t step) const;
};

InputSignal make_input(const DynamicsModel& model, const SamplerSettings& s, std::size_t index);

// Fixed-step RK4 under a zero-order-hold input; `visit(step, x)` sees every state including x0.
void simulate(const DynamicsModel& model, const InputSignal& u, double t, std::size_t steps,
              std::span<double> x, const std::function<void(std::size_t, std::span<const double>)>& visit = {});

SampleCloud sample_endpoints(const DynamicsModel& model, const SamplerSettings& s);
Frame auto_frame(const SampleCloud& cloud, std::size_t cells, double margin = 0.1);
// Rasterises endpoints and dilates by one cell; points outside the frame raise OutOfGrid.
GridSet rasterize(const SampleCloud& cloud, const Frame& frame, bool dilate = true);
GridSet sample_reach(const DynamicsModel& model, const SamplerSettings& s, const Frame& frame);

struct LinearReach {
    Eigen::VectorXd center;
    Eigen::VectorXd half_width;
    std::vector<Interval> intervals;
};

using Drift = std::function<Eigen::VectorXd(double t)>;

LinearReach linear_box_reach(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Drift& d,
                             const std::vector<Interval>& control_box, const Eigen::VectorXd& x0, double t,
                             std::size_t quad = 4096);

// x' = A x + B u + c with constant drift c (empty c means zero).
DynamicsModel linear_dynamics(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::VectorXd& c,
                              std::vector<Interval> control_box, std::vector<double> x0, std::string label);

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

} // namespace offreach
