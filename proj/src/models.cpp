#include "offreach/models.hpp"

#include "offreach/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace offreach {

namespace {

GrowthFn linear_w()
{
    return [](double s, double) { return s; };
}

TimeFn constant(double c)
{
    return [c](double) { return c; };
}

double abs_sum(const Eigen::MatrixXd& M) { return M.cwiseAbs().sum(); }

} // namespace

NorrbinMode parse_norrbin_mode(std::string_view s)
{
    if (s == "diminished")
        return NorrbinMode::Diminished;
    if (s == "slowdown")
        return NorrbinMode::Slowdown;
    if (s == "speedup")
        return NorrbinMode::Speedup;
    throw Error(ErrorCode::ConfigError, "unknown norrbin mode '" + std::string(s) + "'");
}

std::string_view to_string(NorrbinMode m) noexcept
{
    switch (m) {
    case NorrbinMode::Diminished: return "diminished";
    case NorrbinMode::Slowdown: return "slowdown";
    case NorrbinMode::Speedup: return "speedup";
    }
    return "diminished";
}

void NorrbinParams::validate() const
{
    if (!(v > 0.0) || !(l > 0.0) || !(v_s > 0.0) || !(u_max > 0.0))
        throw Error(ErrorCode::InvalidSpec, "norrbin needs v, l, v_s, u_max > 0");
    if (!(u_bar >= 0.0) || u_bar > u_max)
        throw Error(ErrorCode::InvalidSpec, "norrbin needs 0 <= u_bar <= u_max");
    if (x0.size() != 2)
        throw Error(ErrorCode::InvalidSpec, "norrbin initial state has two components");
}

DynamicsModel norrbin_dynamics(const NorrbinParams& p, bool offnominal)
{
    p.validate();
    const double v = offnominal ? p.v_s : p.v;
    const double ub = offnominal ? p.u_bar : p.u_max;
    const double c1 = v / (2.0 * p.l);
    const double c2 = v * v / (2.0 * p.l * p.l);
    DynamicsModel m;
    m.n = 2;
    m.m = 1;
    m.x0 = p.x0;
    m.control_box = {{-ub, ub}};
    m.label = offnominal ? "off-nominal" : "nominal";
    m.f = [c1, c2](double, std::span<const double> x, std::span<const double> u, std::span<double> dx) {
        dx[0] = x[1];
        dx[1] = -c1 * (x[1] + x[1] * x[1] * x[1]) + c2 * u[0];
    };
    return m;
}

double norrbin_gamma(const NorrbinParams& p, double M2, NorrbinMode mode)
{
    if (mode == NorrbinMode::Diminished)
        return 0.0;
    // |g - f| <= |v_s - v|/(2l) |x2 + x2^3| + |v_s^2 - v^2|/(2l^2) |u| with |x2| <= M2, |u| <= u_max.
    return std::abs(p.v_s - p.v) / (2.0 * p.l) * (M2 + M2 * M2 * M2)
        + std::abs(p.v * p.v - p.v_s * p.v_s) / (2.0 * p.l * p.l) * p.u_max;
}

GrowthSpec norrbin_growth_spec(const NorrbinParams& p, double M2, NorrbinMode mode)
{
    p.validate();
    if (!std::isfinite(M2) || M2 < 0.0)
        throw Error(ErrorCode::MissingM2, "M2 must be a finite bound on |x2| over the nominal set");
    GrowthSpec s;
    s.dim = 2;
    s.epsilon = p.epsilon();
    const double rate = p.v / (2.0 * p.l);
    const double gain = p.v * p.v / (2.0 * p.l * p.l);
    const double gamma = norrbin_gamma(p, M2, mode);
    // Heading deviation is the integral of the rate deviation.
    s.a = {constant(0.0), constant(rate)};
    s.w = {linear_w(), [M2](double x, double) { return x + x * x * x + 3.0 * x * x * M2 + 3.0 * x * M2 * M2; }};
    s.b = {[](double, double) { return 0.0; }, [gain](double, double eps) { return gain * eps; }};
    s.gamma = {constant(0.0), constant(gamma)};
    s.coupling = {{1, 0, 1.0}};
    return s;
}

double norrbin_M2(const SampleCloud& nominal, double pad)
{
    if (nominal.n != 2 || nominal.env_lo.size() != 2)
        throw Error(ErrorCode::MissingM2, "no sampled envelope for the heading rate");
    const double m = std::max(std::abs(nominal.env_lo[1]), std::abs(nominal.env_hi[1]));
    return m * (1.0 + pad);
}

CascadeParams cascade_example(std::size_t n, std::size_t m)
{
    CascadeParams p;
    p.A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    p.B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= i; ++j)
            p.A(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1))
                = static_cast<double>(j) / static_cast<double>(i);
        for (std::size_t j = 1; j <= m; ++j)
            p.B(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1))
                = static_cast<double>(j) / static_cast<double>(n + 4 - i);
    }
    p.d = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 0.1);
    p.epsilon = 0.1;
    p.control_box.assign(m, {-1.0, 1.0});
    p.x0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    return p;
}

GrowthSpec cascade_growth_spec(const CascadeParams& p)
{
    const auto n = static_cast<Eigen::Index>(p.n());
    if (p.A.cols() != n || p.B.rows() != n || p.n() == 0)
        throw Error(ErrorCode::InvalidSpec, "cascade matrices have inconsistent shapes");
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (p.A(i, j) != 0.0)
                throw Error(ErrorCode::NotLowerTriangular,
                            "A(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") is nonzero");
    GrowthSpec s;
    s.dim = p.n();
    s.epsilon = p.epsilon;
    const bool changed = p.d_off.size() == n;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double bsum = p.B.row(i).cwiseAbs().sum();
        s.a.push_back(constant(std::abs(p.A(i, i))));
        s.w.push_back(linear_w());
        s.b.push_back([bsum](double, double eps) { return bsum * eps; });
        s.gamma.push_back(constant(changed ? std::abs(p.d[i] - p.d_off[i]) : 0.0));
        for (Eigen::Index j = 0; j < i; ++j)
            if (p.A(i, j) != 0.0)
                s.coupling.push_back({static_cast<std::size_t>(j), static_cast<std::size_t>(i), std::abs(p.A(i, j))});
    }
    return s;
}

std::vector<Interval> shrink_box(const std::vector<Interval>& box, double eps)
{
    std::vector<Interval> out;
    for (const auto& c : box) {
        Interval s{c.lo + eps, c.hi - eps};
        if (s.empty()) {
            const double mid = 0.5 * (c.lo + c.hi);
            s = {mid, mid};
        }
        out.push_back(s);
    }
    return out;
}

DynamicsModel cascade_dynamics(const CascadeParams& p, bool offnominal)
{
    const Eigen::VectorXd& d = offnominal && p.d_off.size() == p.d.size() ? p.d_off : p.d;
    return linear_dynamics(p.A, p.B, d, offnominal ? shrink_box(p.control_box, p.epsilon) : p.control_box,
                           std::vector<double>(p.x0.data(), p.x0.data() + p.x0.size()),
                           offnominal ? "off-nominal" : "nominal");
}

void InterconnectParams::validate() const
{
    if (A.empty() || A.size() != B.size() || K.size() != A.size())
        throw Error(ErrorCode::BlockShapeMismatch, "need matching A, B, K block lists");
    Eigen::Index states = 0, inputs = 0;
    for (std::size_t k = 0; k < A.size(); ++k) {
        if (A[k].rows() != A[k].cols() || B[k].rows() != A[k].rows())
            throw Error(ErrorCode::BlockShapeMismatch, "subsystem " + std::to_string(k + 1) + " blocks disagree");
        if (k > 0 && (K[k].rows() != A[k].rows() || K[k].cols() != A[k - 1].rows()))
            throw Error(ErrorCode::BlockShapeMismatch, "coupling block " + std::to_string(k + 1) + " has wrong shape");
        states += A[k].rows();
        inputs += B[k].cols();
    }
    if (x0.size() != states || static_cast<Eigen::Index>(control_box.size()) != inputs)
        throw Error(ErrorCode::BlockShapeMismatch, "x0 or control box size disagrees with blocks");
}

Eigen::MatrixXd InterconnectParams::full_A() const
{
    validate();
    const Eigen::Index n = x0.size();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    Eigen::Index r = 0, prev = 0;
    for (std::size_t k = 0; k < A.size(); ++k) {
        M.block(r, r, A[k].rows(), A[k].cols()) = A[k];
        if (k > 0)
            M.block(r, prev, K[k].rows(), K[k].cols()) = K[k];
        prev = r;
        r += A[k].rows();
    }
    return M;
}

Eigen::MatrixXd InterconnectParams::full_B() const
{
    validate();
    Eigen::Index rows = 0, cols = 0;
    for (std::size_t k = 0; k < B.size(); ++k) {
        rows += B[k].rows();
        cols += B[k].cols();
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, cols);
    Eigen::Index r = 0, c = 0;
    for (const auto& b : B) {
        M.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return M;
}

InterconnectParams interconnect_example()
{
    InterconnectParams p;
    Eigen::MatrixXd A1(2, 2), A2(3, 3), B1(2, 1), B2(3, 1), K2(3, 2);
    A1 << -1, 1, 0, -1;
    A2 << -0.5, 0.5, -0.1, -0.5, -0.1, 1, 0, 0.1, -0.5;
    B1 << 0.1, 1;
    B2 << 0.1, 0.1, 0.1;
    K2 << 0, 0, 0.1, 0, 0, 0.5;
    p.A = {A1, A2};
    p.B = {B1, B2};
    p.K = {Eigen::MatrixXd(), K2};
    p.epsilon = 0.1;
    p.control_box = {{-2.0, 2.0}, {-2.0, 2.0}};
    p.x0 = Eigen::VectorXd::Zero(5);
    return p;
}

InterconnectSpec interconnect_growth_spec(const InterconnectParams& p)
{
    p.validate();
    InterconnectSpec out;
    GrowthSpec& s = out.spec;
    s.dim = p.A.size();
    s.epsilon = p.epsilon;
    for (std::size_t k = 0; k < p.A.size(); ++k) {
        const double bsum = abs_sum(p.B[k]);
        s.a.push_back(constant(abs_sum(p.A[k])));
        s.w.push_back(linear_w());
        s.b.push_back([bsum](double, double eps) { return bsum * eps; });
        if (k > 0)
            s.coupling.push_back({k - 1, k, abs_sum(p.K[k])});
        for (Eigen::Index i = 0; i < p.A[k].rows(); ++i)
            out.owner.push_back(k);
    }
    return out;
}

DeviationBound broadcast(const DeviationBound& per_subsystem, const std::vector<std::size_t>& owner)
{
    DeviationBound out = per_subsystem;
    for (std::size_t r = 0; r < out.eta.size(); ++r) {
        std::vector<double> row(owner.size());
        for (std::size_t i = 0; i < owner.size(); ++i)
            row[i] = per_subsystem.eta[r].at(owner[i]);
        out.eta[r] = std::move(row);
    }
    return out;
}

DynamicsModel interconnect_dynamics(const InterconnectParams& p, bool offnominal)
{
    return linear_dynamics(p.full_A(), p.full_B(), Eigen::VectorXd(),
                           offnominal ? shrink_box(p.control_box, p.epsilon) : p.control_box,
                           std::vector<double>(p.x0.data(), p.x0.data() + p.x0.size()),
                           offnominal ? "off-nominal" : "nominal");
}

} // namespace offreach
