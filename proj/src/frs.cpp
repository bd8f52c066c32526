#include "offreach/frs.hpp"

#include "offreach/error.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace offreach {

namespace {

std::size_t vertex_sequences(std::size_t m, std::size_t segments, std::size_t cap)
{
    const std::size_t bits = m * segments;
    if (bits >= 63)
        return 0;
    const std::uint64_t count = std::uint64_t{1} << bits;
    return count <= cap ? static_cast<std::size_t>(count) : 0;
}

std::vector<double> vertex(const DynamicsModel& model, std::uint64_t bits)
{
    std::vector<double> u(model.m);
    for (std::size_t j = 0; j < model.m; ++j)
        u[j] = (bits >> j) & 1u ? model.control_box[j].hi : model.control_box[j].lo;
    return u;
}

} // namespace

void DynamicsModel::validate() const
{
    if (n == 0 || !f || x0.size() != n || control_box.size() != m)
        throw Error(ErrorCode::InvalidSpec, "dynamics model is incomplete");
    for (const auto& c : control_box)
        if (c.empty() || !std::isfinite(c.lo) || !std::isfinite(c.hi))
            throw Error(ErrorCode::InvalidSpec, "control box must be nonempty and bounded");
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

const std::vector<double>& InputSignal::at_step(std::size_t step) const
{
    auto it = std::upper_bound(starts.begin(), starts.end(), step);
    return values[static_cast<std::size_t>(it - starts.begin()) - 1];
}

InputSignal make_input(const DynamicsModel& model, const SamplerSettings& s, std::size_t index)
{
    const std::size_t steps = std::max<std::size_t>(s.rk4_steps, 1);
    const std::size_t segs = std::clamp<std::size_t>(s.n_switch, 1, steps);
    std::mt19937_64 rng(stream_seed(s.seed, index));
    const std::uint64_t vmask = model.m >= 64 ? ~0ull : (std::uint64_t{1} << model.m) - 1;
    std::uniform_int_distribution<std::uint64_t> pick_vertex(0, vmask);

    InputSignal sig;
    auto uniform_starts = [&] {
        for (std::size_t k = 0; k < segs; ++k)
            sig.starts.push_back(k * steps / segs);
    };

    const std::size_t V = vertex_sequences(model.m, segs, s.vertex_cap);
    if (index < V) {
        uniform_starts();
        std::size_t code = index;
        for (std::size_t k = 0; k < segs; ++k) {
            sig.values.push_back(vertex(model, code & vmask));
            code >>= model.m;
        }
        return sig;
    }
    switch ((index - V) % 4) {
    case 0:
        uniform_starts();
        for (std::size_t k = 0; k < segs; ++k) {
            std::vector<double> u(model.m);
            for (std::size_t j = 0; j < model.m; ++j)
                u[j] = std::uniform_real_distribution<double>(model.control_box[j].lo, model.control_box[j].hi)(rng);
            sig.values.push_back(std::move(u));
        }
        break;
    case 1:
        uniform_starts();
        for (std::size_t k = 0; k < segs; ++k)
            sig.values.push_back(vertex(model, pick_vertex(rng)));
        break;
    case 2: {
        sig.starts.push_back(0);
        if (steps > 1) {
            std::uniform_int_distribution<std::size_t> cut(1, steps - 1);
            for (std::size_t k = 1; k < segs; ++k)
                sig.starts.push_back(cut(rng));
        }
        std::sort(sig.starts.begin(), sig.starts.end());
        sig.starts.erase(std::unique(sig.starts.begin(), sig.starts.end()), sig.starts.end());
        for (std::size_t k = 0; k < sig.starts.size(); ++k)
            sig.values.push_back(vertex(model, pick_vertex(rng)));
        break;
    }
    default: {
        sig.starts.push_back(0);
        sig.values.push_back(vertex(model, pick_vertex(rng)));
        if (steps > 1) {
            sig.starts.push_back(std::uniform_int_distribution<std::size_t>(1, steps - 1)(rng));
            sig.values.push_back(vertex(model, pick_vertex(rng)));
        }
        break;
    }
    }
    return sig;
}

void simulate(const DynamicsModel& model, const InputSignal& u, double t, std::size_t steps, std::span<double> x,
              const std::function<void(std::size_t, std::span<const double>)>& visit)
{
    const std::size_t n = model.n;
    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    const double dt = t / static_cast<double>(steps);
    if (visit)
        visit(0, x);
    for (std::size_t j = 0; j < steps; ++j) {
        const auto& uj = u.at_step(j);
        const double tj = dt * static_cast<double>(j);
        model.f(tj, x, uj, k1);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = x[i] + 0.5 * dt * k1[i];
        model.f(tj + 0.5 * dt, tmp, uj, k2);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = x[i] + 0.5 * dt * k2[i];
        model.f(tj + 0.5 * dt, tmp, uj, k3);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = x[i] + dt * k3[i];
        model.f(tj + dt, tmp, uj, k4);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (!std::isfinite(x[i]))
                throw Error(ErrorCode::NonFiniteState, "trajectory left the finite range at step " + std::to_string(j));
        }
        if (visit)
            visit(j + 1, x);
    }
}

SampleCloud sample_endpoints(const DynamicsModel& model, const SamplerSettings& s)
{
    model.validate();
    if (!(s.t > 0.0) || s.n_traj == 0)
        throw Error(ErrorCode::InvalidSpec, "sampler needs t > 0 and n_traj >= 1");
    const std::size_t n = model.n;
    const std::size_t K = s.n_traj;
    const std::size_t steps = std::max<std::size_t>(s.rk4_steps, 1);
    SampleCloud cloud;
    cloud.n = n;
    cloud.endpoints.resize(K * n);

    std::size_t T = s.threads ? s.threads : std::max(1u, std::thread::hardware_concurrency());
    T = std::min(T, K);
    std::vector<std::vector<double>> lo(T, std::vector<double>(n, std::numeric_limits<double>::infinity()));
    std::vector<std::vector<double>> hi(T, std::vector<double>(n, -std::numeric_limits<double>::infinity()));
    std::vector<std::exception_ptr> errors(T);

    auto work = [&](std::size_t w) {
        try {
            std::vector<double> x(n);
            auto visit = [&](std::size_t, std::span<const double> xs) {
                for (std::size_t i = 0; i < n; ++i) {
                    lo[w][i] = std::min(lo[w][i], xs[i]);
                    hi[w][i] = std::max(hi[w][i], xs[i]);
                }
            };
            for (std::size_t k = w; k < K; k += T) {
                std::copy(model.x0.begin(), model.x0.end(), x.begin());
                simulate(model, make_input(model, s, k), s.t, steps, x, visit);
                std::copy(x.begin(), x.end(), cloud.endpoints.begin() + static_cast<std::ptrdiff_t>(k * n));
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < T; ++w)
        pool.emplace_back(work, w);
    work(0);
    for (auto& th : pool)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    cloud.env_lo = lo[0];
    cloud.env_hi = hi[0];
    for (std::size_t w = 1; w < T; ++w)
        for (std::size_t i = 0; i < n; ++i) {
            cloud.env_lo[i] = std::min(cloud.env_lo[i], lo[w][i]);
            cloud.env_hi[i] = std::max(cloud.env_hi[i], hi[w][i]);
        }
    return cloud;
}

Frame auto_frame(const SampleCloud& cloud, std::size_t cells, double margin)
{
    const std::size_t n = cloud.n;
    if (cloud.size() == 0 || cells < 8)
        throw Error(ErrorCode::InvalidSpec, "auto frame needs samples and at least 8 cells per axis");
    std::vector<double> lo(n, std::numeric_limits<double>::infinity());
    std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < cloud.size(); ++k) {
        const auto p = cloud.point(k);
        for (std::size_t i = 0; i < n; ++i) {
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    }
    Frame f;
    f.shape.assign(n, cells);
    for (std::size_t i = 0; i < n; ++i) {
        double w = hi[i] - lo[i];
        if (!(w > 0.0))
            w = 1e-6 * std::max(1.0, std::abs(lo[i]));
        const double h = w * (1.0 + 2.0 * margin) / static_cast<double>(cells - 6);
        f.spacing.push_back(h);
        f.origin.push_back(lo[i] - margin * w - 3.0 * h);
    }
    f.validate();
    return f;
}

GridSet rasterize(const SampleCloud& cloud, const Frame& frame, bool dilate)
{
    GridSet g(frame);
    for (std::size_t k = 0; k < cloud.size(); ++k) {
        const auto c = g.locate(cloud.point(k));
        if (!c)
            throw Error(ErrorCode::OutOfGrid, "sample " + std::to_string(k) + " lies outside the grid frame");
        g.occ[*c] = 1;
    }
    if (!dilate)
        return g;
    // One-cell box dilation, clipped at the frame edge; only occupied cells are visited.
    const auto st = frame.strides();
    std::vector<std::size_t> live;
    for (std::size_t f = 0; f < g.size(); ++f)
        if (g.occ[f])
            live.push_back(f);
    for (std::size_t axis = 0; axis < frame.dim(); ++axis) {
        const std::size_t extent = frame.shape[axis];
        const std::size_t nlive = live.size();
        for (std::size_t k = 0; k < nlive; ++k) {
            const std::size_t f = live[k];
            const std::size_t i = (f / st[axis]) % extent;
            if (i > 0 && !g.occ[f - st[axis]]) {
                g.occ[f - st[axis]] = 1;
                live.push_back(f - st[axis]);
            }
            if (i + 1 < extent && !g.occ[f + st[axis]]) {
                g.occ[f + st[axis]] = 1;
                live.push_back(f + st[axis]);
            }
        }
    }
    return g;
}

GridSet sample_reach(const DynamicsModel& model, const SamplerSettings& s, const Frame& frame)
{
    return rasterize(sample_endpoints(model, s), frame, true);
}

LinearReach linear_box_reach(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Drift& d,
                             const std::vector<Interval>& control_box, const Eigen::VectorXd& x0, double t,
                             std::size_t quad)
{
    const auto n = A.rows();
    if (A.cols() != n || B.rows() != n || x0.size() != n
        || static_cast<std::size_t>(B.cols()) != control_box.size())
        throw Error(ErrorCode::InvalidSpec, "linear system shapes disagree");
    if (!(t >= 0.0))
        throw Error(ErrorCode::InvalidSpec, "t must be >= 0");
    quad = std::max<std::size_t>(quad, 1);
    Eigen::VectorXd uc(B.cols()), ur(B.cols());
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
        const auto& c = control_box[static_cast<std::size_t>(j)];
        uc[j] = 0.5 * (c.lo + c.hi);
        ur[j] = 0.5 * (c.hi - c.lo);
    }
    const double dt = t / static_cast<double>(quad);
    const Eigen::MatrixXd step = (A * dt).exp();
    Eigen::MatrixXd E = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd center = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd half = Eigen::VectorXd::Zero(n);
    const Eigen::VectorXd Buc = B * uc;
    // s is the age of the input: contribution e^{A s} (B u(t - s) + d(t - s)).
    for (std::size_t k = 0; k <= quad; ++k) {
        const double s = dt * static_cast<double>(k);
        const double wgt = (k == 0 || k == quad) ? 0.5 * dt : dt;
        Eigen::VectorXd drive = Buc;
        if (d)
            drive += d(t - s);
        center += wgt * (E * drive);
        half += wgt * ((E * B).cwiseAbs() * ur);
        if (k < quad)
            E = E * step;
    }
    center += E * x0;
    LinearReach r;
    r.center = center;
    r.half_width = half;
    for (Eigen::Index i = 0; i < n; ++i)
        r.intervals.push_back({center[i] - half[i], center[i] + half[i]});
    return r;
}

DynamicsModel linear_dynamics(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::VectorXd& c,
                              std::vector<Interval> control_box, std::vector<double> x0, std::string label)
{
    DynamicsModel m;
    m.n = static_cast<std::size_t>(A.rows());
    m.m = static_cast<std::size_t>(B.cols());
    m.control_box = std::move(control_box);
    m.x0 = std::move(x0);
    m.label = std::move(label);
    // Row-major copies keep the hot loop allocation-free.
    std::vector<double> a(m.n * m.n), b(m.n * m.m), drift(m.n, 0.0);
    for (std::size_t i = 0; i < m.n; ++i) {
        for (std::size_t j = 0; j < m.n; ++j)
            a[i * m.n + j] = A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        for (std::size_t j = 0; j < m.m; ++j)
            b[i * m.m + j] = B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (c.size() > 0)
            drift[i] = c[static_cast<Eigen::Index>(i)];
    }
    const std::size_t n = m.n;
    const std::size_t mu = m.m;
    m.f = [a, b, drift, n, mu](double, std::span<const double> x, std::span<const double> u, std::span<double> dx) {
        for (std::size_t i = 0; i < n; ++i) {
            double v = drift[i];
            for (std::size_t j = 0; j < n; ++j)
                v += a[i * n + j] * x[j];
            for (std::size_t j = 0; j < mu; ++j)
                v += b[i * mu + j] * u[j];
            dx[i] = v;
        }
    };
    return m;
}

} // namespace offreach
