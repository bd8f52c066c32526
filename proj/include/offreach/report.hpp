#pragma once

#include "offreach/frs.hpp"
#include "offreach/setcalc.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace offreach {

struct TableRow {
    std::size_t dim = 0; // 1-based
    double hyperrect = 0.0;
    double ball = 0.0;
};

enum class TableStyle { Table1, Table2 };

TableStyle parse_table_style(std::string_view s);
std::string_view to_string(TableStyle s) noexcept;

// Per axis: (L_nom - 2 rho_i)+ / L_off and (L_nom - 2 |rho|)+ / L_off.
std::vector<TableRow> length_ratios(const std::vector<Interval>& nominal, const std::vector<Interval>& offnominal,
                                    const VecBound& rho);
// Same ratios measured on gridded inner sets against an off-nominal reference.
std::vector<TableRow> grid_ratios(const GridSet& inner_hyperrect, const GridSet& inner_ball,
                                  const std::vector<Interval>& offnominal);

// CSV with header `dim,hyperrect_ratio,ball_ratio`, ratios in percent.
std::string emit_table(const std::vector<TableRow>& rows, TableStyle style);

struct PlotLayers {
    const GridSet* nominal = nullptr;
    const GridSet* outer = nullptr;
    const GridSet* inner = nullptr;
    const GridSet* inner_ball = nullptr;
    const SampleCloud* offnominal = nullptr;
    std::vector<Interval> intervals;
    std::string title;
};

// Deterministic SVG overlay; sets with n != 2 need an explicit (0-based) axis pair.
std::string emit_plot(const PlotLayers& layers, std::optional<std::pair<std::size_t, std::size_t>> project = {});

// Occupancy projected onto two axes (any occupied cell along the others).
GridSet project_set(const GridSet& set, std::size_t i, std::size_t j);

} // namespace offreach
