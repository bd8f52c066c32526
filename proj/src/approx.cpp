#include "offreach/approx.hpp"

#include "offreach/error.hpp"

namespace offreach {

namespace {

const std::vector<double>& eta_star(const DeviationBound& bound, double T, std::size_t dim)
{
    if (bound.dim() != dim)
        throw Error(ErrorCode::InvalidSpec, "bound dimension differs from the set dimension");
    return bound.at(bound.t0() + T);
}

void require_connected(const GridSet& nominal)
{
    if (nominal.empty())
        throw Error(ErrorCode::EmptySet, "nominal set is empty");
    if (!is_connected(nominal))
        throw Error(ErrorCode::DisconnectedNominal, "nominal set has more than one component");
}

} // namespace

InnerResult inner_approx(const GridSet& nominal, const DeviationBound& bound, double T)
{
    require_connected(nominal);
    InnerResult r;
    r.rho = eta_star(bound, T, nominal.dim());
    r.set = slim_hyperrect(nominal, r.rho);
    r.vacuous = r.set.empty();
    return r;
}

InnerResult inner_approx_changed_ic(const GridSet& nominal, const DeviationBound& bound_kk, double T)
{
    return inner_approx(nominal, bound_kk, T);
}

InnerResult inner_approx_ball(const GridSet& nominal, const DeviationBound& bound, double T)
{
    require_connected(nominal);
    InnerResult r;
    r.rho = eta_star(bound, T, nominal.dim());
    r.set = slim_ball(nominal, euclidean_norm(r.rho));
    r.vacuous = r.set.empty();
    return r;
}

GridSet outer_approx(const GridSet& nominal, const DeviationBound& bound_out, double t_f, bool* disconnected)
{
    if (nominal.empty())
        throw Error(ErrorCode::EmptySet, "nominal set is empty");
    if (disconnected)
        *disconnected = !is_connected(nominal);
    return fatten_hyperrect(nominal, eta_star(bound_out, t_f, nominal.dim()));
}

std::vector<Interval> shrink_intervals(const std::vector<Interval>& proj, const VecBound& rho)
{
    std::vector<Interval> out;
    for (std::size_t k = 0; k < proj.size(); ++k)
        out.push_back({proj[k].lo + rho.at(k), proj[k].hi - rho.at(k)});
    return out;
}

std::vector<Interval> guaranteed_intervals(const GridSet& nominal, const DeviationBound& bound, double T)
{
    require_connected(nominal);
    return shrink_intervals(projection_intervals(nominal).intervals, eta_star(bound, T, nominal.dim()));
}

} // namespace offreach
