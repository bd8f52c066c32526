#pragma once

#include "offreach/bihari.hpp"
#include "offreach/frs.hpp"

#include <Eigen/Dense>

#include <numbers>
#include <string_view>
#include <vector>

namespace offreach {

constexpr double deg(double d) { return d * std::numbers::pi / 180.0; }

enum class NorrbinMode { Diminished, Slowdown, Speedup };

NorrbinMode parse_norrbin_mode(std::string_view s);
std::string_view to_string(NorrbinMode m) noexcept;

struct NorrbinParams {
    double v = 5.0;         // cruise speed, m/s
    double l = 45.0;        // vessel length, m
    double v_s = 5.0;       // off-nominal speed, m/s
    double u_max = deg(25); // nominal rudder bound, rad
    double u_bar = deg(20); // impaired rudder bound, rad
    std::vector<double> x0{0.0, deg(5)}; // heading (rad), heading rate (rad/s)

    double epsilon() const { return u_max - u_bar; }
    void validate() const;
};

// x1' = x2, x2' = -v/(2l)(x2 + x2^3) + v^2/(2l^2) u; off-nominal uses v_s and [-u_bar, u_bar].
DynamicsModel norrbin_dynamics(const NorrbinParams& p, bool offnominal);
double norrbin_gamma(const NorrbinParams& p, double M2, NorrbinMode mode);
GrowthSpec norrbin_growth_spec(const NorrbinParams& p, double M2, NorrbinMode mode);
// max |x2| over a sampled envelope, padded by a relative margin.
double norrbin_M2(const SampleCloud& nominal, double pad = 0.02);

struct CascadeParams {
    Eigen::MatrixXd A; // lower triangular
    Eigen::MatrixXd B;
    Eigen::VectorXd d;     // constant drift
    Eigen::VectorXd d_off; // off-nominal drift; empty means unchanged
    double epsilon = 0.1;
    std::vector<Interval> control_box;
    Eigen::VectorXd x0;

    std::size_t n() const { return static_cast<std::size_t>(A.rows()); }
    std::size_t m() const { return static_cast<std::size_t>(B.cols()); }
};

// A_ij = j/i (j <= i), B_ij = j/(n+4-i), d_i = 0.1, U = [-1,1]^m, eps = 0.1, x0 = 0.
CascadeParams cascade_example(std::size_t n = 5, std::size_t m = 8);
GrowthSpec cascade_growth_spec(const CascadeParams& p);
DynamicsModel cascade_dynamics(const CascadeParams& p, bool offnominal);

struct InterconnectParams {
    std::vector<Eigen::MatrixXd> A; // per subsystem, n_k x n_k
    std::vector<Eigen::MatrixXd> B; // per subsystem, n_k x m_k
    std::vector<Eigen::MatrixXd> K; // K[k] is n_k x n_{k-1}; K[0] unused
    double epsilon = 0.1;
    std::vector<Interval> control_box;
    Eigen::VectorXd x0;

    void validate() const;
    Eigen::MatrixXd full_A() const; // block diagonal A plus sub-diagonal K
    Eigen::MatrixXd full_B() const;
};

// Two subsystems (2 + 3 states, one input each), U = [-2,2]^2, eps = 0.1, x0 = 0.
InterconnectParams interconnect_example();

struct InterconnectSpec {
    GrowthSpec spec;                 // one dimension per subsystem
    std::vector<std::size_t> owner;  // state index -> subsystem
};

InterconnectSpec interconnect_growth_spec(const InterconnectParams& p);
// Copies each subsystem bound onto that subsystem's state components.
DeviationBound broadcast(const DeviationBound& per_subsystem, const std::vector<std::size_t>& owner);
DynamicsModel interconnect_dynamics(const InterconnectParams& p, bool offnominal);

std::vector<Interval> shrink_box(const std::vector<Interval>& box, double eps);

} // namespace offreach
