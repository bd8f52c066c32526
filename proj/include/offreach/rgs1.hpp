#pragma once

#include "offreach/setcalc.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace offreach {

// Binary container, little-endian; layout in docs/rgs1.md.
void write_rgs1(std::ostream& os, const GridSet& set);
GridSet read_rgs1(std::istream& is);
void save_rgs1(const std::string& path, const GridSet& set);
GridSet load_rgs1(const std::string& path);

// `axis,min,max` with 1-based axes; empty intervals are written as `axis,nan,nan`.
void save_intervals_csv(const std::string& path, const std::vector<Interval>& iv);
std::vector<Interval> load_intervals_csv(const std::string& path);

} // namespace offreach
