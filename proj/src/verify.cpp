#include "offreach/verify.hpp"

#include "offreach/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace offreach {

std::string_view to_string(VerifyStatus s) noexcept
{
    switch (s) {
    case VerifyStatus::Guaranteed: return "GUARANTEED";
    case VerifyStatus::NotGuaranteed: return "NOT_GUARANTEED";
    case VerifyStatus::Indeterminate: return "INDETERMINATE";
    }
    return "INDETERMINATE";
}

namespace {

struct Box {
    std::vector<double> lo, hi;
};

class Query {
public:
    Query(const GridSet& g, std::size_t budget) : g_(g), budget_(budget) {}

    bool can_spend(std::size_t k = 1) const { return used_ + k <= budget_; }
    std::size_t used() const { return used_; }

    double psi(std::size_t flat)
    {
        ++used_;
        return g_.sdf[flat];
    }

private:
    const GridSet& g_;
    std::size_t budget_;
    std::size_t used_ = 0;
};

VerifyOutcome finish(VerifyStatus s, const Query& q, std::optional<std::vector<double>> w = std::nullopt)
{
    return {s, q.used(), std::move(w)};
}

} // namespace

VerifyOutcome verify_state(std::span<const double> x, const GridSet& nominal, const VecBound& rho,
                           std::size_t n_eval_max)
{
    if (!nominal.has_sdf())
        throw Error(ErrorCode::NoSdf, "verification needs a signed distance field");
    const std::size_t n = nominal.dim();
    if (rho.size() != n || x.size() != n)
        throw Error(ErrorCode::InvalidSpec, "state or rho has wrong dimension");
    for (double r : rho)
        if (!std::isfinite(r) || r < 0.0)
            throw Error(ErrorCode::InvalidSpec, "rho must be finite and >= 0");
    n_eval_max = std::max<std::size_t>(n_eval_max, 1);
    const auto cell = nominal.locate(x);
    if (!cell)
        throw Error(ErrorCode::OutOfGrid, "state lies outside the grid");

    const Frame& fr = nominal.frame;
    const auto st = fr.strides();
    double h_max = 0.0;
    for (double h : fr.spacing)
        h_max = std::max(h_max, h);
    // Acceptance margin is larger than the rounding slack used by the slimming itself.
    const double tol = 1e-7 * h_max;
    const auto xc = nominal.center_of(*cell);
    Query q(nominal, n_eval_max + 1);

    // Step 1: must lie in the nominal set, away from its boundary layer.
    const double p0 = q.psi(*cell);
    if (p0 > 0.0 || is_boundary_cell(nominal, *cell))
        return finish(VerifyStatus::NotGuaranteed, q);

    // Step 2: the nearest boundary point lies in the rho-box when it is closer than min rho.
    const double rho_min = *std::min_element(rho.begin(), rho.end());
    const double rho_norm = euclidean_norm(rho);
    if (-p0 <= rho_min)
        return finish(VerifyStatus::NotGuaranteed, q);
    // Step 2a: the rho-box fits inside the ball of radius |psi|.
    if (-p0 > rho_norm + tol)
        return finish(VerifyStatus::Guaranteed, q);

    // Step 2b (refutation): cell-step ascent on psi towards the boundary. A cell z with
    // |x_i - z_i| + |psi(z)| <= rho_i puts a boundary point inside the rho-box of x.
    auto witness = [&](std::size_t z, double pz) {
        const auto c = nominal.center_of(z);
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(xc[i] - c[i]) + std::abs(pz) > rho[i])
                return false;
        return true;
    };
    const std::size_t ascent_budget = 1 + n_eval_max / 2;
    std::size_t z = *cell;
    double pz = p0;
    std::vector<std::size_t> idx(n);
    while (true) {
        if (witness(z, pz))
            return finish(VerifyStatus::NotGuaranteed, q, nominal.center_of(z));
        if (std::abs(pz) <= h_max || q.used() + 2 * n > ascent_budget)
            break;
        nominal.unravel(z, idx);
        std::size_t best = z;
        double best_p = pz;
        for (std::size_t k = 0; k < n; ++k) {
            if (idx[k] > 0) {
                const double p = q.psi(z - st[k]);
                if (p > best_p) {
                    best_p = p;
                    best = z - st[k];
                }
            }
            if (idx[k] + 1 < fr.shape[k]) {
                const double p = q.psi(z + st[k]);
                if (p > best_p) {
                    best_p = p;
                    best = z + st[k];
                }
            }
        }
        if (best == z)
            break;
        z = best;
        pz = best_p;
    }

    // Step 2b (certificate): cover the rho-box by boxes each inside a boundary-free ball.
    Box root;
    for (std::size_t k = 0; k < n; ++k) {
        const double pad = 1e-8 * fr.spacing[k];
        const double g_lo = fr.origin[k];
        const double g_hi = fr.origin[k] + static_cast<double>(fr.shape[k]) * fr.spacing[k];
        root.lo.push_back(std::max(g_lo, xc[k] - rho[k] - pad));
        root.hi.push_back(std::min(g_hi, xc[k] + rho[k] + pad));
    }
    std::vector<Box> stack{root};
    std::vector<double> mid(n);
    while (!stack.empty()) {
        if (!q.can_spend())
            return finish(VerifyStatus::Indeterminate, q);
        Box b = std::move(stack.back());
        stack.pop_back();
        for (std::size_t k = 0; k < n; ++k)
            mid[k] = 0.5 * (b.lo[k] + b.hi[k]);
        const auto zc = nominal.locate(mid);
        if (!zc)
            return finish(VerifyStatus::Indeterminate, q);
        const double p = q.psi(*zc);
        const auto c = nominal.center_of(*zc);
        if (p >= 0.0) {
            bool inside = true;
            for (std::size_t k = 0; k < n; ++k)
                inside = inside && std::abs(c[k] - xc[k]) <= rho[k];
            // x is inside the set and c is not: the segment between them crosses the boundary.
            if (inside)
                return finish(VerifyStatus::NotGuaranteed, q, c);
        }
        double far = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double d = std::max(std::abs(b.lo[k] - c[k]), std::abs(b.hi[k] - c[k]));
            far += d * d;
        }
        if (std::abs(p) > std::sqrt(far) + tol)
            continue;
        std::size_t axis = 0;
        for (std::size_t k = 1; k < n; ++k)
            if (b.hi[k] - b.lo[k] > b.hi[axis] - b.lo[axis])
                axis = k;
        Box other = b;
        const double cut = 0.5 * (b.lo[axis] + b.hi[axis]);
        b.hi[axis] = cut;
        other.lo[axis] = cut;
        stack.push_back(std::move(other));
        stack.push_back(std::move(b));
    }
    return finish(VerifyStatus::Guaranteed, q);
}

} // namespace offreach
