#include "offreach/bihari.hpp"

#include "offreach/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace offreach {

namespace {

constexpr double kGaussX[4] = {-0.8611363115940526, -0.3399810435848563,
                               0.3399810435848563, 0.8611363115940526};
constexpr double kGaussW[4] = {0.3478548451374538, 0.6521451548625461,
                               0.6521451548625461, 0.3478548451374538};

// Beyond this the comparison solution is treated as having escaped.
constexpr double kRCap = 1e150;

double checked_w(const GrowthFn& w, double s, double delta)
{
    const double v = w(s, delta);
    if (!(v > 0.0))
        throw Error(ErrorCode::NonPositiveW, "w(" + std::to_string(s) + ") = " + std::to_string(v));
    return v;
}

// \int_{lo}^{hi} ds / w(s), substituted s = e^u.
double quad_log(const GrowthFn& w, double delta, double lo, double hi)
{
    const double ul = std::log(lo);
    const double uh = std::log(hi);
    const double half = 0.5 * (uh - ul);
    const double mid = 0.5 * (uh + ul);
    double acc = 0.0;
    for (int q = 0; q < 4; ++q) {
        const double s = std::exp(mid + half * kGaussX[q]);
        acc += kGaussW[q] * s / checked_w(w, s, delta);
    }
    return acc * half;
}

double quad_lin(const GrowthFn& w, double delta, double lo, double hi)
{
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double acc = 0.0;
    for (int q = 0; q < 4; ++q)
        acc += kGaussW[q] / checked_w(w, mid + half * kGaussX[q], delta);
    return acc * half;
}

double quad_cell(const GrowthFn& w, double delta, double lo, double hi)
{
    return lo > 0.0 ? quad_log(w, delta, lo, hi) : quad_lin(w, delta, lo, hi);
}

void require_sample(double v, const char* what, std::size_t i)
{
    if (!std::isfinite(v) || v < 0.0)
        throw Error(ErrorCode::InvalidSpec, std::string(what) + " of dimension " + std::to_string(i)
                        + " is negative or non-finite");
}

// Smallest doubling node whose G reaches the target, with one extra doubling as margin.
double find_r_max(const GrowthFn& w, double delta, double r0, double b_final, double a_final)
{
    double r = r0;
    double g = 0.0;
    double g_target = -1.0;
    while (r < kRCap) {
        double next = std::min(2.0 * r, kRCap);
        if (g_target < 0.0 && next >= b_final) {
            g_target = g + (b_final > r ? quad_log(w, delta, r, b_final) : 0.0) + a_final;
        }
        g += quad_log(w, delta, r, next);
        r = next;
        if (g_target >= 0.0 && g >= g_target)
            return std::min(2.0 * r, kRCap);
    }
    return kRCap;
}

} // namespace

void GrowthSpec::validate() const
{
    if (dim == 0)
        throw Error(ErrorCode::InvalidSpec, "dimension must be positive");
    if (a.size() != dim || b.size() != dim || w.size() != dim)
        throw Error(ErrorCode::InvalidSpec, "a, b, w must have one entry per dimension");
    if (!gamma.empty() && gamma.size() != dim)
        throw Error(ErrorCode::InvalidSpec, "gamma must be empty or have one entry per dimension");
    if (!(epsilon >= 0.0) || !(kappa >= 0.0) || !std::isfinite(epsilon) || !std::isfinite(kappa))
        throw Error(ErrorCode::InvalidSpec, "epsilon and kappa must be finite and >= 0");
    for (std::size_t i = 0; i < dim; ++i) {
        if (!a[i] || !b[i] || !w[i] || (!gamma.empty() && !gamma[i]))
            throw Error(ErrorCode::InvalidSpec, "empty function in dimension " + std::to_string(i));
    }
    for (const auto& e : coupling) {
        if (e.from >= dim || e.to >= dim)
            throw Error(ErrorCode::InvalidSpec, "coupling edge out of range");
        if (!std::isfinite(e.coeff))
            throw Error(ErrorCode::InvalidSpec, "coupling coefficient not finite");
    }
}

std::vector<std::size_t> GrowthSpec::topological_order() const
{
    std::vector<std::size_t> indeg(dim, 0);
    for (const auto& e : coupling) {
        if (e.from == e.to)
            throw Error(ErrorCode::CouplingCycle, "self edge on dimension " + std::to_string(e.from));
        ++indeg[e.to];
    }
    std::vector<std::size_t> order;
    std::vector<bool> done(dim, false);
    order.reserve(dim);
    // Kahn's algorithm, always taking the lowest ready index so the order is stable.
    while (order.size() < dim) {
        std::size_t pick = dim;
        for (std::size_t i = 0; i < dim; ++i) {
            if (!done[i] && indeg[i] == 0) {
                pick = i;
                break;
            }
        }
        if (pick == dim)
            throw Error(ErrorCode::CouplingCycle, "coupling graph has a cycle");
        done[pick] = true;
        order.push_back(pick);
        for (const auto& e : coupling)
            if (e.from == pick)
                --indeg[e.to];
    }
    return order;
}

const std::vector<double>& DeviationBound::at(double t) const
{
    const double tol = 1e-12 * std::max(1.0, std::abs(tf()));
    if (t > tf() + tol) {
        if (escape_time)
            throw Error(ErrorCode::BoundEscaped, "bound escaped at t = " + std::to_string(*escape_time));
        throw Error(ErrorCode::HorizonExceedsBound,
                    "t = " + std::to_string(t) + " beyond bound horizon " + std::to_string(tf()));
    }
    if (t < t0() - tol)
        throw Error(ErrorCode::HorizonExceedsBound, "t = " + std::to_string(t) + " before t0");
    const auto it = std::lower_bound(t_grid.begin(), t_grid.end(), t - tol);
    return eta[static_cast<std::size_t>(it - t_grid.begin())];
}

std::vector<double> DeviationBound::column(std::size_t i) const
{
    std::vector<double> c;
    c.reserve(eta.size());
    for (const auto& row : eta)
        c.push_back(row.at(i));
    return c;
}

GTable compute_G(const GrowthFn& w, double delta, double r0, double r_max, std::size_t nodes,
                 bool include_zero)
{
    if (!(r0 > 0.0) || !(r_max > r0) || !std::isfinite(r_max))
        throw Error(ErrorCode::DegenerateRange, "need 0 < r0 < r_max");
    nodes = std::max<std::size_t>(nodes, 2);

    GTable t;
    const std::size_t offset = include_zero ? 1 : 0;
    t.r.resize(nodes + offset);
    t.g.resize(nodes + offset);
    t.anchor = offset;

    const double l0 = std::log(r0);
    const double step = (std::log(r_max) - l0) / static_cast<double>(nodes - 1);
    for (std::size_t k = 0; k < nodes; ++k)
        t.r[k + offset] = std::exp(l0 + step * static_cast<double>(k));
    t.r[offset] = r0;
    t.r.back() = r_max;

    double w_prev = checked_w(w, r0, delta);
    t.g[offset] = 0.0;
    for (std::size_t k = offset + 1; k < t.r.size(); ++k) {
        const double wk = checked_w(w, t.r[k], delta);
        if (wk < w_prev * (1.0 - 1e-12))
            throw Error(ErrorCode::InvalidSpec, "w is decreasing near s = " + std::to_string(t.r[k]));
        w_prev = wk;
        t.g[k] = t.g[k - 1] + quad_log(w, delta, t.r[k - 1], t.r[k]);
        if (!(t.g[k] > t.g[k - 1])) {
            // G has saturated in double precision; larger r is unreachable.
            if (k < offset + 2)
                throw Error(ErrorCode::DegenerateRange, "G does not grow on [r0, r_max]");
            t.r.resize(k);
            t.g.resize(k);
            break;
        }
    }
    if (include_zero) {
        checked_w(w, 0.0, delta);
        t.r[0] = 0.0;
        t.g[0] = -quad_lin(w, delta, 0.0, r0);
    }
    return t;
}

double evaluate_G(const GTable& table, const GrowthFn& w, double delta, double r)
{
    if (!(r >= table.r.front()) || !(r <= table.r.back()))
        throw Error(ErrorCode::OutOfDomain, "r = " + std::to_string(r) + " outside G table");
    auto it = std::upper_bound(table.r.begin(), table.r.end(), r);
    std::size_t k = static_cast<std::size_t>(it - table.r.begin());
    k = k == 0 ? 0 : k - 1;
    if (k + 1 == table.r.size() || r == table.r[k])
        return table.g[k];
    return table.g[k] + quad_cell(w, delta, table.r[k], r);
}

GInverse::GInverse(GTable table) : table_(std::move(table))
{
    for (std::size_t k = 1; k < table_.g.size(); ++k)
        if (!(table_.g[k] > table_.g[k - 1]))
            throw Error(ErrorCode::InvalidSpec, "G table not strictly increasing");
}

double GInverse::operator()(double y) const
{
    const auto& g = table_.g;
    const auto& r = table_.r;
    const double tol = 1e-12 * std::max(1.0, std::abs(g.back()));
    if (!(y >= g.front() - tol) || !(y <= g.back() + tol))
        throw Error(ErrorCode::OutOfDomain, "y = " + std::to_string(y) + " outside range of G");
    if (y >= g.back())
        return r.back();
    if (y <= g.front())
        return r.front();
    auto it = std::upper_bound(g.begin(), g.end(), y);
    const std::size_t k = static_cast<std::size_t>(it - g.begin()) - 1;
    const double frac = (y - g[k]) / (g[k + 1] - g[k]);
    if (frac <= 0.0)
        return r[k];
    if (r[k] == 0.0)
        return frac * r[k + 1];
    const double lr = std::log(r[k]);
    return std::exp(lr + frac * (std::log(r[k + 1]) - lr));
}

GInverse invert_G(GTable table) { return GInverse(std::move(table)); }

std::vector<double> uniform_grid(double t0, double tf, std::size_t intervals)
{
    intervals = std::max<std::size_t>(intervals, 1);
    std::vector<double> g(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k)
        g[k] = t0 + (tf - t0) * static_cast<double>(k) / static_cast<double>(intervals);
    g.back() = tf;
    return g;
}

DeviationBound eta(const GrowthSpec& spec, const std::vector<double>& t_grid,
                   const BoundSettings& settings)
{
    spec.validate();
    if (t_grid.empty())
        throw Error(ErrorCode::InvalidSpec, "empty time grid");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (!(t_grid[k] > t_grid[k - 1]))
            throw Error(ErrorCode::InvalidSpec, "time grid not strictly increasing");
    const auto order = spec.topological_order();
    const std::size_t n = spec.dim;
    const double eps = spec.epsilon;

    // Internal grid: every output interval subdivided in proportion to its length.
    std::vector<double> fine{t_grid.front()};
    std::vector<std::size_t> out_index{0};
    const double span = t_grid.back() - t_grid.front();
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        const double len = t_grid[k] - t_grid[k - 1];
        const auto sub = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(static_cast<double>(settings.steps) * len / span)));
        for (std::size_t s = 1; s <= sub; ++s)
            fine.push_back(s == sub ? t_grid[k]
                                    : t_grid[k - 1] + len * static_cast<double>(s) / static_cast<double>(sub));
        out_index.push_back(fine.size() - 1);
    }
    const std::size_t F = fine.size();

    std::vector<std::vector<double>> col(n, std::vector<double>(F, 0.0));
    std::vector<std::size_t> valid(n, F);
    std::vector<double> bh(F), B(F), A(F);

    for (const std::size_t i : order) {
        std::size_t limit = F;
        for (std::size_t j = 0; j < F; ++j) {
            double bj = spec.b[i](fine[j], eps);
            require_sample(bj, "b", i);
            if (!spec.gamma.empty()) {
                const double gj = spec.gamma[i](fine[j]);
                require_sample(gj, "gamma", i);
                bj += gj;
            }
            bh[j] = bj;
            A[j] = spec.a[i](fine[j]);
            require_sample(A[j], "a", i);
        }
        for (const auto& e : spec.coupling) {
            if (e.to != i)
                continue;
            limit = std::min(limit, valid[e.from]);
            const double c = std::abs(e.coeff);
            const auto& src = col[e.from];
            for (std::size_t j = 0; j < limit; ++j)
                bh[j] += c * src[j];
        }

        B[0] = spec.kappa;
        double acc_a = 0.0;
        double a_prev = A[0];
        A[0] = 0.0;
        for (std::size_t j = 1; j < F; ++j) {
            const double dt = fine[j] - fine[j - 1];
            B[j] = B[j - 1] + 0.5 * (bh[j - 1] + bh[j]) * dt;
            const double aj = A[j];
            acc_a += 0.5 * (a_prev + aj) * dt;
            a_prev = aj;
            A[j] = acc_a;
        }

        auto& c = col[i];
        c[0] = spec.kappa;
        const double b_last = B[limit - 1];
        const double a_last = A[limit - 1];
        const double w0 = spec.w[i](0.0, eps);

        if (a_last == 0.0) {
            std::copy(B.begin(), B.begin() + static_cast<std::ptrdiff_t>(limit), c.begin());
        } else if (b_last == 0.0 && w0 == 0.0) {
            // Zero forcing from zero: the comparison solution stays at zero.
            std::fill(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(limit), 0.0);
        } else {
            const double scale = b_last > 0.0 ? b_last : 1.0;
            double r0 = settings.r0 > 0.0 ? settings.r0 : 1e-9 * scale;
            for (std::size_t j = 0; j < limit; ++j)
                if (B[j] > 0.0) {
                    r0 = std::min(r0, B[j]);
                    break;
                }
            const bool with_zero = w0 > 0.0;
            const double r_max = find_r_max(spec.w[i], eps, r0, std::max(b_last, r0), a_last);
            const GInverse inv(compute_G(spec.w[i], eps, r0, r_max, settings.lut_size, with_zero));
            const GTable& tab = inv.table();
            for (std::size_t j = 1; j < limit; ++j) {
                const double b_eff = with_zero ? B[j] : std::max(B[j], r0);
                if (b_eff > tab.r.back()) {
                    limit = j;
                    break;
                }
                const double y = evaluate_G(tab, spec.w[i], eps, b_eff) + A[j];
                if (y > inv.upper()) {
                    limit = j;
                    break;
                }
                c[j] = std::max({inv(y), B[j], c[j - 1]});
            }
        }
        for (std::size_t j = limit; j < F; ++j)
            c[j] = std::numeric_limits<double>::infinity();
        valid[i] = limit;
    }

    const std::size_t ok = *std::min_element(valid.begin(), valid.end());
    DeviationBound out;
    out.epsilon_used = eps;
    out.kappa_used = spec.kappa;
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        if (out_index[k] >= ok)
            break;
        out.t_grid.push_back(t_grid[k]);
        std::vector<double> row(n);
        for (std::size_t i = 0; i < n; ++i)
            row[i] = col[i][out_index[k]];
        out.eta.push_back(std::move(row));
    }
    if (ok < F)
        out.escape_time = fine[ok];
    return out;
}

std::vector<double> integrator_chain_bound(const std::vector<double>& eta_src,
                                           const std::vector<double>& t_grid, bool conservative)
{
    if (eta_src.size() != t_grid.size() || t_grid.empty())
        throw Error(ErrorCode::InvalidSpec, "eta_src and t_grid sizes differ");
    std::vector<double> out(t_grid.size(), 0.0);
    if (conservative) {
        for (std::size_t k = 0; k < t_grid.size(); ++k)
            out[k] = eta_src.back() * (t_grid[k] - t_grid.front());
        return out;
    }
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        out[k] = out[k - 1] + 0.5 * (eta_src[k - 1] + eta_src[k]) * (t_grid[k] - t_grid[k - 1]);
    return out;
}

double outer_epsilon(double delta, double epsilon)
{
    if (!(delta >= 0.0) || !(epsilon >= 0.0))
        throw Error(ErrorCode::InvalidSpec, "delta and epsilon must be >= 0");
    return 2.0 * delta + epsilon;
}

} // namespace offreach
