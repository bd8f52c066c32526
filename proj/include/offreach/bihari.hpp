#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace offreach {

using TimeFn = std::function<double(double t)>;
using ForcingFn = std::function<double(double t, double eps)>;
using GrowthFn = std::function<double(double s, double delta)>;

// Dimension `to` receives coeff * eta_from(t) as extra forcing.
struct CouplingEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    double coeff = 0.0;
};

// Per-dimension comparison data: |x~_i|' <= a_i(t) w_i(|x~_i|, eps) + b_i(t, eps) + gamma_i(t)
// plus the coupling forcing.
struct GrowthSpec {
    std::size_t dim = 0;
    std::vector<TimeFn> a;
    std::vector<ForcingFn> b;
    std::vector<GrowthFn> w;
    double epsilon = 0.0;
    double kappa = 0.0;
    std::vector<TimeFn> gamma; // empty, or one per dimension
    std::vector<CouplingEdge> coupling;

    // Structural checks only; sampled checks happen in eta().
    void validate() const;
    // Dimensions ordered so every coupling source precedes its target.
    std::vector<std::size_t> topological_order() const;
};

struct BoundSettings {
    std::size_t steps = 4096;    // internal quadrature points over [t0, tf]
    std::size_t lut_size = 8192; // G table nodes
    double r0 = 0.0;             // 0 selects the automatic anchor
};

class DeviationBound {
public:
    std::vector<double> t_grid;
    std::vector<std::vector<double>> eta; // eta[k][i] = eta_i(t_grid[k])
    double epsilon_used = 0.0;
    double kappa_used = 0.0;
    std::optional<double> escape_time;

    std::size_t dim() const { return eta.empty() ? 0 : eta.front().size(); }
    double t0() const { return t_grid.front(); }
    double tf() const { return t_grid.back(); }

    // Row at the first grid time >= t. The table is nondecreasing, so this over-approximates.
    const std::vector<double>& at(double t) const;
    std::vector<double> column(std::size_t i) const;
};

struct GTable {
    std::vector<double> r; // strictly increasing
    std::vector<double> g; // G(r), G(r0) = 0
    std::size_t anchor = 0; // index of r0 (1 when a linear cell [0, r0] is prepended)
};

// Log-spaced antiderivative of 1/w(., delta) on [r0, r_max]; with include_zero a linear
// first cell [0, r0] is prepended (requires w(0, delta) > 0).
GTable compute_G(const GrowthFn& w, double delta, double r0, double r_max,
                 std::size_t nodes = 8192, bool include_zero = false);

// G at an arbitrary r inside the table, integrating from the node below.
double evaluate_G(const GTable& table, const GrowthFn& w, double delta, double r);

class GInverse {
public:
    explicit GInverse(GTable table);

    double operator()(double y) const;
    double lower() const { return table_.g.front(); }
    double upper() const { return table_.g.back(); }
    const GTable& table() const { return table_; }

private:
    GTable table_;
};

GInverse invert_G(GTable table);

DeviationBound eta(const GrowthSpec& spec, const std::vector<double>& t_grid,
                   const BoundSettings& settings = {});

// Cumulative trapezoid of a sampled component bound, or eta_src(t_f) * (t - t0) when conservative.
std::vector<double> integrator_chain_bound(const std::vector<double>& eta_src,
                                           const std::vector<double>& t_grid,
                                           bool conservative = false);

double outer_epsilon(double delta, double epsilon);

std::vector<double> uniform_grid(double t0, double tf, std::size_t intervals);

} // namespace offreach
