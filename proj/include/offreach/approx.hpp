#pragma once

#include "offreach/bihari.hpp"
#include "offreach/setcalc.hpp"

#include <optional>
#include <vector>

namespace offreach {

struct InnerResult {
    GridSet set;
    VecBound rho;          // the eta* that was applied
    bool vacuous = false;  // empty inner set: valid but uninformative guarantee
};

// Guaranteed subset of the off-nominal reachable set on [t0, t0 + T]; the nominal set must be connected.
InnerResult inner_approx(const GridSet& nominal, const DeviationBound& bound, double T);
// Same construction with a bound built for kappa > 0 (changed initial set).
InnerResult inner_approx_changed_ic(const GridSet& nominal, const DeviationBound& bound_kk, double T);
// Conservative surrogate: slimming by the Euclidean norm of eta*.
InnerResult inner_approx_ball(const GridSet& nominal, const DeviationBound& bound, double T);

// Guaranteed superset; bound_out must be built with epsilon = outer_epsilon(delta, eps).
// Disconnected nominal sets only raise the warning flag.
GridSet outer_approx(const GridSet& nominal, const DeviationBound& bound_out, double t_f,
                     bool* disconnected = nullptr);

// Per axis, [min + eta_i, max - eta_i] of the nominal projection; empty intervals carry no guarantee.
std::vector<Interval> guaranteed_intervals(const GridSet& nominal, const DeviationBound& bound, double T);
std::vector<Interval> shrink_intervals(const std::vector<Interval>& proj, const VecBound& rho);

} // namespace offreach
