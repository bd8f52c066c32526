#pragma once

#include "offreach/setcalc.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace offreach {

enum class VerifyStatus { Guaranteed, NotGuaranteed, Indeterminate };

std::string_view to_string(VerifyStatus s) noexcept;

struct VerifyOutcome {
    VerifyStatus status = VerifyStatus::Indeterminate;
    std::size_t evaluations = 0;             // sdf lookups
    std::optional<std::vector<double>> witness; // cell centre that settled the answer
};

// Is x (resolved at its cell centre) in the hyperrectangular slimming of `nominal` by rho?
// Never answers Guaranteed for a state outside that slimming; may answer Indeterminate.
VerifyOutcome verify_state(std::span<const double> x, const GridSet& nominal, const VecBound& rho,
                           std::size_t n_eval_max = 32);

} // namespace offreach
