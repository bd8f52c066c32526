#include "offreach/setcalc.hpp"

#include "offreach/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace offreach {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Index-space slack used when rounding box extents; slimming errs towards removal.
constexpr double kIndexTol = 1e-9;

template <class Fn>
void for_each_line(const Frame& f, std::size_t axis, Fn&& fn)
{
    const auto st = f.strides();
    const std::size_t stride = st[axis];
    const std::size_t len = f.shape[axis];
    const std::size_t block = stride * len;
    const std::size_t total = f.size();
    for (std::size_t o = 0; o < total; o += block)
        for (std::size_t in = 0; in < stride; ++in)
            fn(o + in, stride, len);
}

// Lower envelope of parabolas h2 (x - v)^2 + f with strictly increasing vertices.
class Envelope {
public:
    void clear()
    {
        v_.clear();
        f_.clear();
        id_.clear();
    }
    void add(double v, double f, std::ptrdiff_t id)
    {
        v_.push_back(v);
        f_.push_back(f);
        id_.push_back(id);
    }
    // out[i] = min(out[i], envelope(i)), recording the winning id in arg.
    void apply(double h2, std::size_t len, double* out, std::ptrdiff_t* arg)
    {
        const std::size_t m = v_.size();
        if (m == 0)
            return;
        hull_.assign(m, 0);
        z_.assign(m + 1, kInf);
        std::size_t k = 0;
        z_[0] = -kInf;
        for (std::size_t q = 1; q < m; ++q) {
            double s = cross(q, hull_[k], h2);
            while (s <= z_[k]) {
                --k;
                s = cross(q, hull_[k], h2);
            }
            ++k;
            hull_[k] = q;
            z_[k] = s;
            z_[k + 1] = kInf;
        }
        k = 0;
        for (std::size_t i = 0; i < len; ++i) {
            const double x = static_cast<double>(i);
            while (z_[k + 1] < x)
                ++k;
            const std::size_t p = hull_[k];
            const double d = x - v_[p];
            const double val = h2 * d * d + f_[p];
            if (val < out[i]) {
                out[i] = val;
                arg[i] = id_[p];
            }
        }
    }

private:
    double cross(std::size_t q, std::size_t p, double h2) const
    {
        return ((f_[q] + h2 * v_[q] * v_[q]) - (f_[p] + h2 * v_[p] * v_[p]))
            / (2.0 * h2 * (v_[q] - v_[p]));
    }

    std::vector<double> v_, f_, z_;
    std::vector<std::ptrdiff_t> id_;
    std::vector<std::size_t> hull_;
};

// Per-axis kernels: Center ((d h)^2), Face (((|d|-1/2)+ h)^2), Gap (((|d|-1)+ h)^2).
enum class Kernel { Center, Face, Gap };

// Squared separable distance to feature cells. With `exterior`, everything outside the grid
// counts as a feature. `arg` (Center only) receives the flat index of the nearest feature.
std::vector<double> distance_sq(const Frame& fr, const std::vector<std::uint8_t>& feature, Kernel kernel,
                                bool exterior, std::vector<std::ptrdiff_t>* arg)
{
    const std::size_t total = fr.size();
    std::vector<double> D(total);
    std::vector<std::ptrdiff_t> A(arg ? total : 0, -1);
    for (std::size_t i = 0; i < total; ++i) {
        D[i] = feature[i] ? 0.0 : kInf;
        if (arg && feature[i])
            A[i] = static_cast<std::ptrdiff_t>(i);
    }
    const double shift = kernel == Kernel::Face ? 0.5 : 1.0;
    std::vector<double> vals, out;
    std::vector<std::ptrdiff_t> vargs, oargs;
    Envelope env;
    for (std::size_t axis = 0; axis < fr.dim(); ++axis) {
        const double h = fr.spacing[axis];
        const double h2 = h * h;
        for_each_line(fr, axis, [&](std::size_t base, std::size_t stride, std::size_t len) {
            vals.resize(len);
            out.resize(len);
            vargs.assign(len, -1);
            oargs.assign(len, -1);
            for (std::size_t i = 0; i < len; ++i) {
                vals[i] = D[base + i * stride];
                if (arg)
                    vargs[i] = A[base + i * stride];
            }
            if (kernel == Kernel::Center) {
                std::fill(out.begin(), out.end(), kInf);
                env.clear();
                for (std::size_t q = 0; q < len; ++q)
                    if (vals[q] < kInf)
                        env.add(static_cast<double>(q), vals[q], static_cast<std::ptrdiff_t>(q));
                env.apply(h2, len, out.data(), oargs.data());
                for (std::size_t i = 0; i < len; ++i)
                    if (oargs[i] >= 0)
                        oargs[i] = vargs[static_cast<std::size_t>(oargs[i])];
            } else {
                out = vals;
                env.clear();
                if (exterior)
                    env.add(-1.0 + shift, 0.0, -1);
                for (std::size_t q = 0; q < len; ++q)
                    if (vals[q] < kInf)
                        env.add(static_cast<double>(q) + shift, vals[q], -1);
                env.apply(h2, len, out.data(), oargs.data());
                env.clear();
                for (std::size_t q = 0; q < len; ++q)
                    if (vals[q] < kInf)
                        env.add(static_cast<double>(q) - shift, vals[q], -1);
                if (exterior)
                    env.add(static_cast<double>(len) - shift, 0.0, -1);
                env.apply(h2, len, out.data(), oargs.data());
            }
            for (std::size_t i = 0; i < len; ++i) {
                D[base + i * stride] = out[i];
                if (arg)
                    A[base + i * stride] = oargs[i];
            }
        });
    }
    if (arg)
        *arg = std::move(A);
    return D;
}

// out(i) = OR of in(i - d) for d in [lo, hi] along one axis.
std::vector<std::uint8_t> dilate_axis(const Frame& fr, const std::vector<std::uint8_t>& in, std::size_t axis,
                                      std::ptrdiff_t lo, std::ptrdiff_t hi)
{
    std::vector<std::uint8_t> out(in.size(), 0);
    if (lo > hi)
        return out;
    std::vector<std::size_t> prefix;
    for_each_line(fr, axis, [&](std::size_t base, std::size_t stride, std::size_t len) {
        prefix.assign(len + 1, 0);
        for (std::size_t i = 0; i < len; ++i)
            prefix[i + 1] = prefix[i] + (in[base + i * stride] ? 1 : 0);
        const auto L = static_cast<std::ptrdiff_t>(len);
        for (std::ptrdiff_t i = 0; i < L; ++i) {
            const std::ptrdiff_t a = std::max<std::ptrdiff_t>(0, i - hi);
            const std::ptrdiff_t b = std::min<std::ptrdiff_t>(L - 1, i - lo);
            if (a <= b && prefix[static_cast<std::size_t>(b + 1)] > prefix[static_cast<std::size_t>(a)])
                out[base + static_cast<std::size_t>(i) * stride] = 1;
        }
    });
    return out;
}

void require_nonempty(const GridSet& s, const char* what)
{
    if (s.size() == 0 || s.empty())
        throw Error(ErrorCode::EmptySet, std::string(what) + " is empty; distance is infinite");
}

void require_same_frame(const GridSet& a, const GridSet& b)
{
    if (!(a.frame == b.frame))
        throw Error(ErrorCode::FrameMismatch, "sets live on different grids");
}

// Occupied index range per axis.
void occupied_bounds(const GridSet& s, std::vector<std::size_t>& lo, std::vector<std::size_t>& hi)
{
    const std::size_t n = s.dim();
    lo.assign(n, std::numeric_limits<std::size_t>::max());
    hi.assign(n, 0);
    std::vector<std::size_t> idx(n);
    for (std::size_t f = 0; f < s.size(); ++f) {
        if (!s.occ[f])
            continue;
        s.unravel(f, idx);
        for (std::size_t k = 0; k < n; ++k) {
            lo[k] = std::min(lo[k], idx[k]);
            hi[k] = std::max(hi[k], idx[k]);
        }
    }
}

// Grows the frame so a dilation by m cells per axis stays on the grid.
GridSet expand_for(const GridSet& s, const std::vector<std::size_t>& m, bool allow)
{
    std::vector<std::size_t> lo, hi;
    occupied_bounds(s, lo, hi);
    Frame target = s.frame;
    bool grow = false;
    for (std::size_t k = 0; k < s.dim(); ++k) {
        const std::size_t pad_lo = m[k] > lo[k] ? m[k] - lo[k] : 0;
        const std::size_t room_hi = s.frame.shape[k] - 1 - hi[k];
        const std::size_t pad_hi = m[k] > room_hi ? m[k] - room_hi : 0;
        if (pad_lo + pad_hi > 0)
            grow = true;
        target.origin[k] -= static_cast<double>(pad_lo) * s.frame.spacing[k];
        target.shape[k] += pad_lo + pad_hi;
    }
    if (!grow)
        return s;
    if (!allow)
        throw Error(ErrorCode::RadiusClipped, "fattening leaves the grid window");
    return embed(s, target);
}

std::vector<std::size_t> cells_for(const Frame& fr, const VecBound& rho)
{
    std::vector<std::size_t> m(fr.dim());
    for (std::size_t k = 0; k < fr.dim(); ++k)
        m[k] = static_cast<std::size_t>(std::ceil(rho[k] / fr.spacing[k]));
    return m;
}

void check_rho(const GridSet& s, const VecBound& rho)
{
    if (rho.size() != s.dim())
        throw Error(ErrorCode::InvalidSpec, "rho has wrong dimension");
    for (double r : rho)
        if (!std::isfinite(r) || r < 0.0)
            throw Error(ErrorCode::InvalidSpec, "rho must be finite and >= 0");
}

std::vector<int> label_components(const GridSet& s, std::size_t& n_comp)
{
    std::vector<int> label(s.size(), -1);
    const auto st = s.frame.strides();
    std::vector<std::size_t> queue, idx(s.dim());
    n_comp = 0;
    for (std::size_t start = 0; start < s.size(); ++start) {
        if (!s.occ[start] || label[start] >= 0)
            continue;
        const int id = static_cast<int>(n_comp++);
        queue.assign(1, start);
        label[start] = id;
        for (std::size_t h = 0; h < queue.size(); ++h) {
            const std::size_t f = queue[h];
            s.unravel(f, idx);
            for (std::size_t k = 0; k < s.dim(); ++k) {
                if (idx[k] > 0) {
                    const std::size_t g = f - st[k];
                    if (s.occ[g] && label[g] < 0) {
                        label[g] = id;
                        queue.push_back(g);
                    }
                }
                if (idx[k] + 1 < s.frame.shape[k]) {
                    const std::size_t g = f + st[k];
                    if (s.occ[g] && label[g] < 0) {
                        label[g] = id;
                        queue.push_back(g);
                    }
                }
            }
        }
    }
    return label;
}

} // namespace

std::size_t Frame::size() const
{
    std::size_t s = 1;
    for (auto v : shape)
        s *= v;
    return shape.empty() ? 0 : s;
}

std::vector<std::size_t> Frame::strides() const
{
    std::vector<std::size_t> st(shape.size(), 1);
    for (std::size_t k = shape.size(); k-- > 1;)
        st[k - 1] = st[k] * shape[k];
    return st;
}

void Frame::validate() const
{
    if (shape.empty() || origin.size() != shape.size() || spacing.size() != shape.size())
        throw Error(ErrorCode::InvalidSpec, "frame origin/spacing/shape sizes differ");
    for (std::size_t k = 0; k < shape.size(); ++k) {
        if (shape[k] == 0)
            throw Error(ErrorCode::InvalidSpec, "frame has a zero-length axis");
        if (!(spacing[k] > 0.0) || !std::isfinite(spacing[k]) || !std::isfinite(origin[k]))
            throw Error(ErrorCode::InvalidSpec, "frame spacing must be positive and finite");
    }
}

Frame make_frame(std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> shape)
{
    Frame f;
    f.origin = lo;
    f.shape = std::move(shape);
    f.spacing.resize(lo.size());
    for (std::size_t k = 0; k < lo.size(); ++k)
        f.spacing[k] = (hi.at(k) - lo[k]) / static_cast<double>(f.shape.at(k));
    f.validate();
    return f;
}

GridSet::GridSet(Frame f) : frame(std::move(f))
{
    frame.validate();
    occ.assign(frame.size(), 0);
}

std::size_t GridSet::count() const
{
    return static_cast<std::size_t>(std::count(occ.begin(), occ.end(), std::uint8_t{1}));
}

void GridSet::unravel(std::size_t flat, std::span<std::size_t> idx) const
{
    for (std::size_t k = dim(); k-- > 0;) {
        idx[k] = flat % frame.shape[k];
        flat /= frame.shape[k];
    }
}

std::size_t GridSet::ravel(std::span<const std::size_t> idx) const
{
    std::size_t f = 0;
    for (std::size_t k = 0; k < dim(); ++k)
        f = f * frame.shape[k] + idx[k];
    return f;
}

std::vector<double> GridSet::center_of(std::size_t flat) const
{
    std::vector<std::size_t> idx(dim());
    unravel(flat, idx);
    std::vector<double> c(dim());
    for (std::size_t k = 0; k < dim(); ++k)
        c[k] = frame.center(k, static_cast<std::ptrdiff_t>(idx[k]));
    return c;
}

std::optional<std::size_t> GridSet::locate(std::span<const double> x) const
{
    if (x.size() != dim())
        return std::nullopt;
    std::size_t f = 0;
    for (std::size_t k = 0; k < dim(); ++k) {
        const double u = (x[k] - frame.origin[k]) / frame.spacing[k];
        if (!(u >= 0.0) || !(u <= static_cast<double>(frame.shape[k])))
            return std::nullopt;
        const auto i = std::min(static_cast<std::size_t>(u), frame.shape[k] - 1);
        f = f * frame.shape[k] + i;
    }
    return f;
}

double euclidean_norm(const VecBound& v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

GridSet signed_distance(const GridSet& set)
{
    require_nonempty(set, "set");
    std::vector<std::uint8_t> outside(set.size());
    for (std::size_t i = 0; i < set.size(); ++i)
        outside[i] = set.occ[i] ? 0 : 1;
    const auto d_out = distance_sq(set.frame, set.occ, Kernel::Face, false, nullptr);
    const auto d_in = distance_sq(set.frame, outside, Kernel::Face, true, nullptr);
    GridSet r = set;
    r.sdf.resize(set.size());
    for (std::size_t i = 0; i < set.size(); ++i)
        r.sdf[i] = set.occ[i] ? -std::sqrt(d_in[i]) : std::sqrt(d_out[i]);
    return r;
}

namespace {

double directed_hausdorff(const GridSet& from, const GridSet& to)
{
    std::vector<std::ptrdiff_t> arg;
    distance_sq(to.frame, to.occ, Kernel::Center, false, &arg);
    std::vector<std::size_t> ia(from.dim()), ib(from.dim());
    double worst = 0.0;
    for (std::size_t f = 0; f < from.size(); ++f) {
        if (!from.occ[f])
            continue;
        from.unravel(f, ia);
        to.unravel(static_cast<std::size_t>(arg[f]), ib);
        double s = 0.0;
        for (std::size_t k = 0; k < from.dim(); ++k) {
            const double d = from.frame.center(k, static_cast<std::ptrdiff_t>(ia[k]))
                - to.frame.center(k, static_cast<std::ptrdiff_t>(ib[k]));
            s += d * d;
        }
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

double directed_axis(const GridSet& from, const GridSet& to, std::size_t axis)
{
    const std::size_t len = to.frame.shape[axis];
    std::vector<std::uint8_t> mark(len, 0);
    std::vector<std::size_t> idx(to.dim());
    for (std::size_t f = 0; f < to.size(); ++f)
        if (to.occ[f]) {
            to.unravel(f, idx);
            mark[idx[axis]] = 1;
        }
    // Nearest marked index per position.
    std::vector<std::ptrdiff_t> near(len, -1);
    std::ptrdiff_t last = -1;
    for (std::size_t i = 0; i < len; ++i) {
        if (mark[i])
            last = static_cast<std::ptrdiff_t>(i);
        near[i] = last;
    }
    last = -1;
    for (std::size_t i = len; i-- > 0;) {
        if (mark[i])
            last = static_cast<std::ptrdiff_t>(i);
        const auto ii = static_cast<std::ptrdiff_t>(i);
        if (last >= 0 && (near[i] < 0 || last - ii < ii - near[i]))
            near[i] = last;
    }
    double worst = 0.0;
    for (std::size_t f = 0; f < from.size(); ++f) {
        if (!from.occ[f])
            continue;
        from.unravel(f, idx);
        const double d = std::abs(from.frame.center(axis, static_cast<std::ptrdiff_t>(idx[axis]))
                                  - to.frame.center(axis, near[idx[axis]]));
        worst = std::max(worst, d);
    }
    return worst;
}

} // namespace

double hausdorff(const GridSet& a, const GridSet& b)
{
    require_nonempty(a, "first set");
    require_nonempty(b, "second set");
    require_same_frame(a, b);
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

VecBound hyperrect_distance(const GridSet& a, const GridSet& b)
{
    require_nonempty(a, "first set");
    require_nonempty(b, "second set");
    require_same_frame(a, b);
    VecBound d(a.dim());
    for (std::size_t k = 0; k < a.dim(); ++k)
        d[k] = std::max(directed_axis(a, b, k), directed_axis(b, a, k));
    return d;
}

GridSet fatten_hyperrect(const GridSet& set, const VecBound& rho, const FattenOptions& opt)
{
    require_nonempty(set, "set");
    check_rho(set, rho);
    const auto m = cells_for(set.frame, rho);
    GridSet g = expand_for(set, m, opt.expand);
    g.sdf.clear();
    for (std::size_t k = 0; k < g.dim(); ++k) {
        const auto mk = static_cast<std::ptrdiff_t>(m[k]);
        if (mk > 0)
            g.occ = dilate_axis(g.frame, g.occ, k, -mk, mk);
    }
    return g;
}

GridSet fatten_ball(const GridSet& set, double r, const FattenOptions& opt)
{
    require_nonempty(set, "set");
    if (!std::isfinite(r) || r < 0.0)
        throw Error(ErrorCode::InvalidSpec, "radius must be finite and >= 0");
    const auto m = cells_for(set.frame, VecBound(set.dim(), r));
    GridSet g = expand_for(set, m, opt.expand);
    g.sdf.clear();
    if (r == 0.0)
        return g;
    const auto gap = distance_sq(g.frame, g.occ, Kernel::Gap, false, nullptr);
    const double r2 = r * r;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (gap[i] < r2)
            g.occ[i] = 1;
    return g;
}

std::vector<std::uint8_t> boundary_mask(const GridSet& set)
{
    std::vector<std::uint8_t> b(set.size(), 0);
    for (std::size_t f = 0; f < set.size(); ++f)
        if (set.occ[f] && is_boundary_cell(set, f))
            b[f] = 1;
    return b;
}

bool is_boundary_cell(const GridSet& set, std::size_t flat)
{
    if (!set.occ[flat])
        return false;
    const auto st = set.frame.strides();
    std::size_t rem = flat;
    for (std::size_t k = 0; k < set.dim(); ++k) {
        const std::size_t i = (rem / st[k]) % set.frame.shape[k];
        if (i == 0 || i + 1 == set.frame.shape[k])
            return true;
        if (!set.occ[flat - st[k]] || !set.occ[flat + st[k]])
            return true;
    }
    return false;
}

GridSet slim_hyperrect(const GridSet& set, const VecBound& rho)
{
    check_rho(set, rho);
    GridSet out = set;
    out.sdf.clear();
    if (set.empty())
        return out;
    const std::size_t n = set.dim();
    const auto st = set.frame.strides();
    std::vector<double> a(n);
    std::vector<std::ptrdiff_t> side(n);
    for (std::size_t k = 0; k < n; ++k) {
        a[k] = rho[k] / set.frame.spacing[k];
        side[k] = static_cast<std::ptrdiff_t>(std::floor(a[k] + 0.5 + kIndexTol));
    }
    std::vector<std::uint8_t> removed = boundary_mask(set);
    std::vector<std::size_t> idx(n);
    std::vector<std::uint8_t> fam(set.size());
    for (std::size_t j = 0; j < n; ++j) {
        for (int s : {-1, 1}) {
            // Cells whose face on side s of axis j borders the complement or the grid exterior.
            bool any = false;
            for (std::size_t f = 0; f < set.size(); ++f) {
                fam[f] = 0;
                if (!set.occ[f])
                    continue;
                set.unravel(f, idx);
                bool face;
                if (s < 0)
                    face = idx[j] == 0 || !set.occ[f - st[j]];
                else
                    face = idx[j] + 1 == set.frame.shape[j] || !set.occ[f + st[j]];
                if (face) {
                    fam[f] = 1;
                    any = true;
                }
            }
            if (!any)
                continue;
            const double c = 0.5 * s;
            const auto lo = static_cast<std::ptrdiff_t>(std::ceil(c - a[j] - kIndexTol));
            const auto hi = static_cast<std::ptrdiff_t>(std::floor(c + a[j] + kIndexTol));
            auto d = dilate_axis(set.frame, fam, j, lo, hi);
            for (std::size_t k = 0; k < n; ++k)
                if (k != j && side[k] > 0)
                    d = dilate_axis(set.frame, d, k, -side[k], side[k]);
            for (std::size_t f = 0; f < set.size(); ++f)
                removed[f] |= d[f];
        }
    }
    for (std::size_t f = 0; f < set.size(); ++f)
        out.occ[f] = set.occ[f] && !removed[f];
    return out;
}

GridSet slim_ball(const GridSet& set, double r)
{
    if (!std::isfinite(r) || r < 0.0)
        throw Error(ErrorCode::InvalidSpec, "radius must be finite and >= 0");
    GridSet out = set;
    out.sdf.clear();
    if (set.empty())
        return out;
    const GridSet sd = set.has_sdf() ? set : signed_distance(set);
    // Strict with a margin larger than the slimming rounding slack, so ball-slimming stays inside.
    double hn = 0.0;
    for (double h : set.frame.spacing)
        hn += h * h;
    const double margin = 1e-8 * std::sqrt(hn) + 1e-12 * r;
    const auto bnd = boundary_mask(set);
    for (std::size_t f = 0; f < set.size(); ++f)
        out.occ[f] = set.occ[f] && !bnd[f] && sd.sdf[f] < -(r + margin);
    return out;
}

Projection projection_intervals(const GridSet& set)
{
    require_nonempty(set, "set");
    std::vector<std::size_t> lo, hi;
    occupied_bounds(set, lo, hi);
    Projection p;
    for (std::size_t k = 0; k < set.dim(); ++k) {
        const double h = set.frame.spacing[k];
        p.intervals.push_back({set.frame.center(k, static_cast<std::ptrdiff_t>(lo[k])) - 0.5 * h,
                               set.frame.center(k, static_cast<std::ptrdiff_t>(hi[k])) + 0.5 * h});
    }
    p.connected = is_connected(set);
    return p;
}

bool is_connected(const GridSet& set)
{
    if (set.size() == 0)
        return false;
    std::size_t n = 0;
    label_components(set, n);
    return n == 1;
}

GridSet keep_largest_component(const GridSet& set)
{
    std::size_t n = 0;
    const auto label = label_components(set, n);
    GridSet out = set;
    out.sdf.clear();
    if (n <= 1)
        return out;
    std::vector<std::size_t> sizes(n, 0);
    for (int l : label)
        if (l >= 0)
            ++sizes[static_cast<std::size_t>(l)];
    const auto best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    for (std::size_t f = 0; f < set.size(); ++f)
        out.occ[f] = label[f] == best ? 1 : 0;
    return out;
}

GridSet embed(const GridSet& set, const Frame& target)
{
    target.validate();
    if (target.dim() != set.dim())
        throw Error(ErrorCode::FrameMismatch, "dimension differs");
    std::vector<std::ptrdiff_t> off(set.dim());
    for (std::size_t k = 0; k < set.dim(); ++k) {
        const double h = set.frame.spacing[k];
        if (std::abs(target.spacing[k] - h) > 1e-12 * h)
            throw Error(ErrorCode::FrameMismatch, "spacing differs on axis " + std::to_string(k));
        const double u = (set.frame.origin[k] - target.origin[k]) / h;
        const double ru = std::round(u);
        if (std::abs(u - ru) > 1e-6)
            throw Error(ErrorCode::FrameMismatch, "origins not aligned on axis " + std::to_string(k));
        off[k] = static_cast<std::ptrdiff_t>(ru);
    }
    GridSet out(target);
    std::vector<std::size_t> idx(set.dim());
    for (std::size_t f = 0; f < set.size(); ++f) {
        if (!set.occ[f])
            continue;
        set.unravel(f, idx);
        for (std::size_t k = 0; k < set.dim(); ++k) {
            const auto j = static_cast<std::ptrdiff_t>(idx[k]) + off[k];
            if (j < 0 || j >= static_cast<std::ptrdiff_t>(target.shape[k]))
                throw Error(ErrorCode::FrameMismatch, "set does not fit in target frame");
            idx[k] = static_cast<std::size_t>(j);
        }
        out.occ[out.ravel(idx)] = 1;
    }
    return out;
}

Frame union_frame(const Frame& a, const Frame& b)
{
    if (a.dim() != b.dim())
        throw Error(ErrorCode::FrameMismatch, "dimension differs");
    Frame u = a;
    for (std::size_t k = 0; k < a.dim(); ++k) {
        const double h = a.spacing[k];
        if (std::abs(b.spacing[k] - h) > 1e-12 * h)
            throw Error(ErrorCode::FrameMismatch, "spacing differs on axis " + std::to_string(k));
        const double u_off = (b.origin[k] - a.origin[k]) / h;
        const auto off = static_cast<std::ptrdiff_t>(std::round(u_off));
        if (std::abs(u_off - static_cast<double>(off)) > 1e-6)
            throw Error(ErrorCode::FrameMismatch, "origins not aligned on axis " + std::to_string(k));
        const std::ptrdiff_t lo = std::min<std::ptrdiff_t>(0, off);
        const std::ptrdiff_t hi = std::max<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(a.shape[k]),
                                                           off + static_cast<std::ptrdiff_t>(b.shape[k]));
        u.origin[k] = a.origin[k] + static_cast<double>(lo) * h;
        u.shape[k] = static_cast<std::size_t>(hi - lo);
    }
    return u;
}

bool is_subset(const GridSet& a, const GridSet& b)
{
    if (a.frame == b.frame) {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (a.occ[i] && !b.occ[i])
                return false;
        return true;
    }
    const Frame u = union_frame(a.frame, b.frame);
    return is_subset(embed(a, u), embed(b, u));
}

} // namespace offreach
