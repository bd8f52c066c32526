#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace offreach {

// Uniform axis-aligned grid. Cell i along axis k covers
// [origin_k + i h_k, origin_k + (i+1) h_k]; storage is row-major (last axis fastest).
struct Frame {
    std::vector<double> origin;
    std::vector<double> spacing;
    std::vector<std::size_t> shape;

    std::size_t dim() const { return shape.size(); }
    std::size_t size() const;
    std::vector<std::size_t> strides() const;
    double center(std::size_t axis, std::ptrdiff_t i) const
    {
        return origin[axis] + (static_cast<double>(i) + 0.5) * spacing[axis];
    }
    bool operator==(const Frame& o) const = default;
    void validate() const;
};

Frame make_frame(std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> shape);

// Occupied cells are treated as closed boxes; sdf (when present) is the exact signed
// Euclidean distance of their union, negative inside, sampled at cell centres.
class GridSet {
public:
    GridSet() = default;
    explicit GridSet(Frame f);

    Frame frame;
    std::vector<std::uint8_t> occ;
    std::vector<double> sdf;

    std::size_t dim() const { return frame.dim(); }
    std::size_t size() const { return occ.size(); }
    std::size_t count() const;
    bool empty() const { return count() == 0; }
    bool has_sdf() const { return sdf.size() == occ.size() && !occ.empty(); }

    void unravel(std::size_t flat, std::span<std::size_t> idx) const;
    std::size_t ravel(std::span<const std::size_t> idx) const;
    std::vector<double> center_of(std::size_t flat) const;
    std::optional<std::size_t> locate(std::span<const double> x) const;
};

using VecBound = std::vector<double>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool empty() const { return !(hi >= lo); }
    double length() const { return empty() ? 0.0 : hi - lo; }
};

struct Projection {
    std::vector<Interval> intervals;
    bool connected = true;
};

struct FattenOptions {
    bool expand = true; // false: raise RadiusClipped instead of growing the frame
};

GridSet signed_distance(const GridSet& set);
double hausdorff(const GridSet& a, const GridSet& b);
VecBound hyperrect_distance(const GridSet& a, const GridSet& b);
GridSet fatten_ball(const GridSet& set, double r, const FattenOptions& opt = {});
GridSet fatten_hyperrect(const GridSet& set, const VecBound& rho, const FattenOptions& opt = {});
GridSet slim_hyperrect(const GridSet& set, const VecBound& rho);
GridSet slim_ball(const GridSet& set, double r);
Projection projection_intervals(const GridSet& set);
bool is_connected(const GridSet& set);

std::vector<std::uint8_t> boundary_mask(const GridSet& set);
bool is_boundary_cell(const GridSet& set, std::size_t flat);
GridSet keep_largest_component(const GridSet& set);
// Copies `set` into an aligned frame; throws FrameMismatch when not aligned or not contained.
GridSet embed(const GridSet& set, const Frame& target);
// Smallest frame aligned with both inputs' common spacing that contains both.
Frame union_frame(const Frame& a, const Frame& b);
bool is_subset(const GridSet& a, const GridSet& b);
double euclidean_norm(const VecBound& v);

} // namespace offreach
