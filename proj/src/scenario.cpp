#include "offreach/scenario.hpp"

#include "offreach/approx.hpp"
#include "offreach/error.hpp"
#include "offreach/report.hpp"
#include "offreach/rgs1.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

namespace offreach {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys)
{
    if (!j.is_object())
        config_error(where + " must be an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, _] : j.items())
        if (!ok.count(k))
            config_error("unknown key '" + k + "' in " + where);
}

double number(const json& j, const std::string& what)
{
    if (!j.is_number())
        config_error(what + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        config_error(what + " must be finite");
    return v;
}

std::size_t count(const json& j, const std::string& what)
{
    if (!j.is_number_integer() || j.get<long long>() < 0)
        config_error(what + " must be a non-negative integer");
    return j.get<std::size_t>();
}

std::vector<double> numbers(const json& j, const std::string& what)
{
    if (!j.is_array())
        config_error(what + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : j)
        out.push_back(number(e, what));
    return out;
}

// Reads `key` in radians or `key_deg` in degrees; returns nullopt when neither is present.
std::optional<double> angle(const json& j, const std::string& key)
{
    const bool rad = j.contains(key), dg = j.contains(key + "_deg");
    if (rad && dg)
        config_error("give either " + key + " or " + key + "_deg, not both");
    if (rad)
        return number(j.at(key), key);
    if (dg)
        return deg(number(j.at(key + "_deg"), key + "_deg"));
    return std::nullopt;
}

std::optional<std::vector<double>> angles(const json& j, const std::string& key)
{
    const bool rad = j.contains(key), dg = j.contains(key + "_deg");
    if (rad && dg)
        config_error("give either " + key + " or " + key + "_deg, not both");
    if (rad)
        return numbers(j.at(key), key);
    if (dg) {
        auto v = numbers(j.at(key + "_deg"), key + "_deg");
        for (double& x : v)
            x = deg(x);
        return v;
    }
    return std::nullopt;
}

Eigen::MatrixXd matrix(const json& j, const std::string& what)
{
    if (!j.is_array() || j.empty())
        config_error(what + " must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = -1;
    Eigen::MatrixXd M;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto row = numbers(j[static_cast<std::size_t>(r)], what);
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
            M.resize(rows, cols);
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            config_error(what + " has ragged rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c)
            M(r, c) = row[static_cast<std::size_t>(c)];
    }
    return M;
}

Eigen::VectorXd vec(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())); }

std::vector<Interval> box(const json& j, const std::string& what)
{
    if (!j.is_array() || j.empty())
        config_error(what + " must be an array of [lo, hi] pairs");
    std::vector<Interval> out;
    for (const auto& e : j) {
        const auto p = numbers(e, what);
        if (p.size() != 2 || !(p[0] <= p[1]))
            config_error(what + " entries must be [lo, hi] with lo <= hi");
        out.push_back({p[0], p[1]});
    }
    return out;
}

json matrix_json(const Eigen::MatrixXd& M)
{
    json out = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c)
            row.push_back(M(r, c));
        out.push_back(row);
    }
    return out;
}

json box_json(const std::vector<Interval>& b)
{
    json out = json::array();
    for (const auto& c : b)
        out.push_back({c.lo, c.hi});
    return out;
}

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void parse_norrbin(ScenarioConfig& c, const json& p)
{
    allow_keys(p, "params", {"v", "l", "v_s", "u_max", "u_max_deg", "u_bar", "u_bar_deg", "x0", "x0_deg", "mode",
                             "m2_pad"});
    NorrbinParams& n = c.norrbin;
    if (p.contains("v"))
        n.v = number(p["v"], "v");
    if (p.contains("l"))
        n.l = number(p["l"], "l");
    n.v_s = p.contains("v_s") ? number(p["v_s"], "v_s") : n.v;
    if (auto a = angle(p, "u_max"))
        n.u_max = *a;
    if (auto a = angle(p, "u_bar"))
        n.u_bar = *a;
    if (auto a = angles(p, "x0"))
        n.x0 = *a;
    if (p.contains("mode")) {
        if (!p["mode"].is_string())
            config_error("mode must be a string");
        c.norrbin_mode = parse_norrbin_mode(p["mode"].get<std::string>());
    }
    if (p.contains("m2_pad"))
        c.m2_pad = number(p["m2_pad"], "m2_pad");
    try {
        n.validate();
    } catch (const Error& e) {
        config_error(e.what());
    }
    c.resolved["params"] = {{"v", n.v}, {"l", n.l}, {"v_s", n.v_s}, {"u_max", n.u_max}, {"u_bar", n.u_bar},
                            {"x0", n.x0}, {"mode", to_string(c.norrbin_mode)}, {"m2_pad", c.m2_pad}};
}

void parse_cascade(ScenarioConfig& c, const json& p)
{
    allow_keys(p, "params", {"example", "A", "B", "d", "d_off", "epsilon", "control_box", "x0"});
    CascadeParams& k = c.cascade;
    if (p.contains("example")) {
        const json& e = p["example"];
        allow_keys(e, "params.example", {"n", "m"});
        k = cascade_example(e.contains("n") ? count(e["n"], "n") : 5, e.contains("m") ? count(e["m"], "m") : 8);
    } else if (!p.contains("A") || !p.contains("B")) {
        config_error("cascade needs either example or A and B");
    }
    if (p.contains("A"))
        k.A = matrix(p["A"], "A");
    if (p.contains("B"))
        k.B = matrix(p["B"], "B");
    const auto n = k.A.rows();
    if (k.A.cols() != n || k.B.rows() != n)
        config_error("A must be square and B must have as many rows as A");
    if (p.contains("d"))
        k.d = vec(numbers(p["d"], "d"));
    else if (k.d.size() != n)
        k.d = Eigen::VectorXd::Zero(n);
    if (p.contains("d_off"))
        k.d_off = vec(numbers(p["d_off"], "d_off"));
    if (p.contains("epsilon"))
        k.epsilon = number(p["epsilon"], "epsilon");
    if (p.contains("control_box"))
        k.control_box = box(p["control_box"], "control_box");
    if (p.contains("x0"))
        k.x0 = vec(numbers(p["x0"], "x0"));
    else if (k.x0.size() != n)
        k.x0 = Eigen::VectorXd::Zero(n);
    if (k.d.size() != n || (k.d_off.size() != 0 && k.d_off.size() != n) || k.x0.size() != n
        || static_cast<std::size_t>(k.B.cols()) != k.control_box.size())
        config_error("cascade vector sizes disagree with A and B");
    if (!(k.epsilon >= 0.0))
        config_error("epsilon must be >= 0");
    json r = {{"A", matrix_json(k.A)}, {"B", matrix_json(k.B)}, {"d", vec_json(k.d)}, {"epsilon", k.epsilon},
              {"control_box", box_json(k.control_box)}, {"x0", vec_json(k.x0)}};
    if (k.d_off.size())
        r["d_off"] = vec_json(k.d_off);
    c.resolved["params"] = r;
}

void parse_interconnect(ScenarioConfig& c, const json& p)
{
    allow_keys(p, "params", {"example", "A", "B", "K", "epsilon", "control_box", "x0"});
    InterconnectParams& k = c.interconnect;
    if (p.contains("example")) {
        if (!p["example"].is_boolean() || !p["example"].get<bool>())
            config_error("interconnect example must be true");
        k = interconnect_example();
    } else if (!p.contains("A") || !p.contains("B") || !p.contains("K")) {
        config_error("interconnect needs either example or A, B and K block lists");
    }
    auto blocks = [&](const char* key, std::vector<Eigen::MatrixXd>& dst) {
        if (!p.contains(key))
            return;
        if (!p[key].is_array())
            config_error(std::string(key) + " must be a list of matrices");
        dst.clear();
        for (const auto& b : p[key])
            dst.push_back(b.is_null() ? Eigen::MatrixXd() : matrix(b, key));
    };
    blocks("A", k.A);
    blocks("B", k.B);
    blocks("K", k.K);
    if (p.contains("epsilon"))
        k.epsilon = number(p["epsilon"], "epsilon");
    if (p.contains("control_box"))
        k.control_box = box(p["control_box"], "control_box");
    Eigen::Index states = 0;
    for (const auto& a : k.A)
        states += a.rows();
    if (p.contains("x0"))
        k.x0 = vec(numbers(p["x0"], "x0"));
    else if (k.x0.size() != states)
        k.x0 = Eigen::VectorXd::Zero(states);
    try {
        k.validate();
    } catch (const Error& e) {
        config_error(e.what());
    }
    json A = json::array(), B = json::array(), K = json::array();
    for (std::size_t i = 0; i < k.A.size(); ++i) {
        A.push_back(matrix_json(k.A[i]));
        B.push_back(matrix_json(k.B[i]));
        K.push_back(i == 0 ? json(nullptr) : matrix_json(k.K[i]));
    }
    c.resolved["params"] = {{"A", A}, {"B", B}, {"K", K}, {"epsilon", k.epsilon},
                            {"control_box", box_json(k.control_box)}, {"x0", vec_json(k.x0)}};
}

std::size_t state_dim(const ScenarioConfig& c)
{
    if (c.model == "norrbin")
        return 2;
    if (c.model == "cascade")
        return c.cascade.n();
    return static_cast<std::size_t>(c.interconnect.x0.size());
}

} // namespace

ScenarioConfig parse_config(const json& j)
{
    allow_keys(j, "config", {"scenario", "model", "params", "times", "horizon", "grid", "sampler", "bound", "outputs"});
    ScenarioConfig c;
    if (!j.contains("model") || !j["model"].is_string())
        config_error("model must be one of norrbin, cascade, interconnect");
    c.model = j["model"].get<std::string>();
    c.name = j.contains("scenario") && j["scenario"].is_string() ? j["scenario"].get<std::string>() : c.model;
    const json params = j.contains("params") ? j["params"] : json::object();
    if (c.model == "norrbin")
        parse_norrbin(c, params);
    else if (c.model == "cascade")
        parse_cascade(c, params);
    else if (c.model == "interconnect")
        parse_interconnect(c, params);
    else
        config_error("unknown model '" + c.model + "'");

    if (!j.contains("times"))
        config_error("times is required");
    c.times = numbers(j["times"], "times");
    if (c.times.empty())
        config_error("times must list at least one evaluation time");
    for (double t : c.times)
        if (!(t > 0.0))
            config_error("evaluation times must be positive");
    std::sort(c.times.begin(), c.times.end());
    c.times.erase(std::unique(c.times.begin(), c.times.end()), c.times.end());
    c.horizon = j.contains("horizon") ? number(j["horizon"], "horizon") : c.times.back();
    if (c.times.back() > c.horizon)
        config_error("evaluation times must not exceed the horizon");

    const std::size_t n = state_dim(c);
    c.cells = n == 2 ? 256 : 32;
    if (j.contains("grid")) {
        const json& g = j["grid"];
        allow_keys(g, "grid", {"cells", "margin"});
        if (g.contains("cells"))
            c.cells = count(g["cells"], "grid.cells");
        if (g.contains("margin"))
            c.margin = number(g["margin"], "grid.margin");
    }
    if (c.cells < 8)
        config_error("grid.cells must be at least 8");
    if (!(c.margin >= 0.0))
        config_error("grid.margin must be >= 0");

    c.sampler.n_traj = 20000;
    if (j.contains("sampler")) {
        const json& s = j["sampler"];
        allow_keys(s, "sampler", {"n_traj", "n_switch", "rk4_steps", "seed", "threads"});
        if (s.contains("n_traj"))
            c.sampler.n_traj = count(s["n_traj"], "sampler.n_traj");
        if (s.contains("n_switch"))
            c.sampler.n_switch = count(s["n_switch"], "sampler.n_switch");
        if (s.contains("rk4_steps"))
            c.sampler.rk4_steps = count(s["rk4_steps"], "sampler.rk4_steps");
        if (s.contains("seed"))
            c.sampler.seed = count(s["seed"], "sampler.seed");
        if (s.contains("threads"))
            c.sampler.threads = count(s["threads"], "sampler.threads");
    }
    if (c.sampler.n_traj == 0 || c.sampler.n_switch == 0 || c.sampler.rk4_steps == 0)
        config_error("sampler counts must be positive");

    if (j.contains("bound")) {
        const json& b = j["bound"];
        allow_keys(b, "bound", {"steps", "lut_size", "r0", "points", "delta"});
        if (b.contains("steps"))
            c.bound.steps = count(b["steps"], "bound.steps");
        if (b.contains("lut_size"))
            c.bound.lut_size = count(b["lut_size"], "bound.lut_size");
        if (b.contains("r0"))
            c.bound.r0 = number(b["r0"], "bound.r0");
        if (b.contains("points"))
            c.bound_points = count(b["points"], "bound.points");
        if (auto d = angle(b, "delta"))
            c.delta = *d;
    }
    if (c.bound.steps == 0 || c.bound.lut_size < 2 || c.bound_points == 0 || c.bound.r0 < 0.0 || c.delta < 0.0)
        config_error("bound settings out of range");

    const bool linear = c.model != "norrbin";
    c.table = c.model == "cascade" ? "table1" : c.model == "interconnect" ? "table2" : "";
    c.reference = linear ? "linear" : "sampled";
    if (j.contains("outputs")) {
        const json& o = j["outputs"];
        allow_keys(o, "outputs", {"table", "reference"});
        if (o.contains("table")) {
            if (!o["table"].is_string())
                config_error("outputs.table must be a string");
            c.table = o["table"].get<std::string>();
            parse_table_style(c.table);
        }
        if (o.contains("reference")) {
            if (!o["reference"].is_string())
                config_error("outputs.reference must be a string");
            c.reference = o["reference"].get<std::string>();
        }
    }
    if (c.reference != "linear" && c.reference != "sampled")
        config_error("outputs.reference must be linear or sampled");
    if (c.reference == "linear" && !linear)
        config_error("the linear reference needs a linear model");

    c.resolved["scenario"] = c.name;
    c.resolved["model"] = c.model;
    c.resolved["times"] = c.times;
    c.resolved["horizon"] = c.horizon;
    c.resolved["grid"] = {{"cells", c.cells}, {"margin", c.margin}};
    c.resolved["sampler"] = {{"n_traj", c.sampler.n_traj}, {"n_switch", c.sampler.n_switch},
                             {"rk4_steps", c.sampler.rk4_steps}, {"seed", c.sampler.seed},
                             {"vertex_cap", c.sampler.vertex_cap}};
    c.resolved["bound"] = {{"steps", c.bound.steps}, {"lut_size", c.bound.lut_size}, {"r0", c.bound.r0},
                           {"points", c.bound_points}, {"delta", c.delta}};
    c.resolved["outputs"] = {{"table", c.table}, {"reference", c.reference}};
    return c;
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        config_error(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

std::string time_dir_name(double t)
{
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, t);
    return "t" + std::string(buf, r.ptr);
}

namespace {

struct Setup {
    DynamicsModel nominal;
    DynamicsModel offnominal;
    GrowthSpec spec;
    std::vector<std::size_t> owner; // interconnect only
    std::optional<double> M2;
    // Linear data for the exact reference.
    bool linear = false;
    Eigen::MatrixXd A, B;
    Eigen::VectorXd d, d_off, x0;
    std::vector<Interval> box, box_off;
};

Setup build_setup(const ScenarioConfig& c, const SamplerSettings& s, std::ostream& log)
{
    Setup st;
    if (c.model == "norrbin") {
        st.nominal = norrbin_dynamics(c.norrbin, false);
        st.offnominal = norrbin_dynamics(c.norrbin, true);
        SamplerSettings hs = s;
        hs.t = c.horizon;
        st.M2 = norrbin_M2(sample_endpoints(st.nominal, hs), c.m2_pad);
        st.spec = norrbin_growth_spec(c.norrbin, *st.M2, c.norrbin_mode);
        log << "M2 = " << *st.M2 << " rad/s\n";
    } else if (c.model == "cascade") {
        const auto& p = c.cascade;
        st.nominal = cascade_dynamics(p, false);
        st.offnominal = cascade_dynamics(p, true);
        st.spec = cascade_growth_spec(p);
        st.linear = true;
        st.A = p.A;
        st.B = p.B;
        st.d = p.d;
        st.d_off = p.d_off.size() ? p.d_off : p.d;
        st.x0 = p.x0;
        st.box = p.control_box;
        st.box_off = shrink_box(p.control_box, p.epsilon);
    } else {
        const auto& p = c.interconnect;
        st.nominal = interconnect_dynamics(p, false);
        st.offnominal = interconnect_dynamics(p, true);
        auto is = interconnect_growth_spec(p);
        st.spec = std::move(is.spec);
        st.owner = std::move(is.owner);
        st.linear = true;
        st.A = p.full_A();
        st.B = p.full_B();
        st.d = Eigen::VectorXd::Zero(st.A.rows());
        st.d_off = st.d;
        st.x0 = p.x0;
        st.box = p.control_box;
        st.box_off = shrink_box(p.control_box, p.epsilon);
    }
    return st;
}

DeviationBound state_bound(const Setup& st, const GrowthSpec& spec, const std::vector<double>& grid,
                           const BoundSettings& bs)
{
    DeviationBound b = eta(spec, grid, bs);
    return st.owner.empty() ? b : broadcast(b, st.owner);
}

Drift const_drift(const Eigen::VectorXd& d)
{
    return [d](double) { return d; };
}

void write_text(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    if (!out || !(out << text))
        throw Error(ErrorCode::IoError, "cannot write " + p.string());
}

json intervals_json(const std::vector<Interval>& iv)
{
    json out = json::array();
    for (const auto& i : iv)
        out.push_back(i.empty() ? json(nullptr) : json({i.lo, i.hi}));
    return out;
}

json frame_json(const Frame& f)
{
    return {{"origin", f.origin}, {"spacing", f.spacing}, {"shape", f.shape}};
}

std::vector<Interval> cloud_intervals(const SampleCloud& c)
{
    std::vector<Interval> out(c.n, Interval{std::numeric_limits<double>::infinity(),
                                            -std::numeric_limits<double>::infinity()});
    for (std::size_t k = 0; k < c.size(); ++k) {
        const auto p = c.point(k);
        for (std::size_t i = 0; i < c.n; ++i) {
            out[i].lo = std::min(out[i].lo, p[i]);
            out[i].hi = std::max(out[i].hi, p[i]);
        }
    }
    return out;
}

} // namespace

void run_scenario(ScenarioConfig cfg, const RunOptions& opt, std::ostream& log)
{
    static const std::set<std::string> verbs{"nominal", "inner", "outer", "intervals", "table", "plot", "all"};
    if (!verbs.count(opt.verb))
        config_error("unknown verb '" + opt.verb + "'");
    if (opt.seed) {
        cfg.sampler.seed = *opt.seed;
        cfg.resolved["sampler"]["seed"] = *opt.seed;
    }
    const std::string& v = opt.verb;
    const bool all = v == "all";
    const bool want_inner = all || v == "inner" || v == "plot" || v == "table";
    const bool want_outer = all || v == "outer" || v == "plot";
    const bool want_intervals = all || v == "intervals" || v == "plot";
    const bool want_table = (all && !cfg.table.empty()) || v == "table";
    const bool want_plot = all || v == "plot";
    if (v == "table" && cfg.table.empty())
        config_error("no table style configured for this scenario");

    const std::size_t n = state_dim(cfg);
    if (opt.project && (opt.project->first >= n || opt.project->second >= n || opt.project->first == opt.project->second))
        throw Error(ErrorCode::UnsupportedDim, "projection axes out of range");
    if (want_plot && n != 2 && !opt.project)
        throw Error(ErrorCode::UnsupportedDim, "plotting a " + std::to_string(n) + "-D scenario needs --project i j");

    std::error_code ec;
    fs::create_directories(opt.out, ec);
    if (ec)
        throw Error(ErrorCode::IoError, "cannot create " + opt.out);

    const Setup st = build_setup(cfg, cfg.sampler, log);

    std::vector<double> grid = uniform_grid(0.0, cfg.horizon, cfg.bound_points);
    grid.insert(grid.end(), cfg.times.begin(), cfg.times.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               grid.end());

    const DeviationBound bound = state_bound(st, st.spec, grid, cfg.bound);
    GrowthSpec out_spec = st.spec;
    out_spec.epsilon = outer_epsilon(cfg.delta, st.spec.epsilon);
    const DeviationBound bound_out = want_outer ? state_bound(st, out_spec, grid, cfg.bound) : DeviationBound{};

    json meta;
    meta["config"] = cfg.resolved;
    meta["seed"] = cfg.sampler.seed;
    meta["verb"] = v;
    meta["tolerances"] = {{"slim_offset", 1e-9}, {"ball_margin_rel", 1e-8}, {"ball_margin_radius", 1e-12},
                          {"raster_dilation_cells", 1}};
    if (st.M2)
        meta["M2"] = *st.M2;
    meta["epsilon"] = st.spec.epsilon;
    meta["epsilon_outer"] = out_spec.epsilon;
    meta["reference"] = cfg.reference == "linear" ? "exact linear box propagation" : "sampled off-nominal endpoints";
    if (bound.escape_time)
        meta["bound_escape_time"] = *bound.escape_time;
    {
        json tab = json::array();
        const std::size_t stride = std::max<std::size_t>(1, bound.t_grid.size() / 64);
        for (std::size_t k = 0; k < bound.t_grid.size(); k += stride)
            tab.push_back({{"t", bound.t_grid[k]}, {"eta", bound.eta[k]}});
        if ((bound.t_grid.size() - 1) % stride)
            tab.push_back({{"t", bound.t_grid.back()}, {"eta", bound.eta.back()}});
        meta["eta_table"] = tab;
    }

    json runs = json::array();
    bool first_table = true;
    for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
        const double t = cfg.times[ti];
        const fs::path dir = fs::path(opt.out) / time_dir_name(t);
        fs::create_directories(dir, ec);
        if (ec)
            throw Error(ErrorCode::IoError, "cannot create " + dir.string());
        log << "t = " << t << "\n";

        SamplerSettings s = cfg.sampler;
        s.t = t;
        const SampleCloud cloud = sample_endpoints(st.nominal, s);
        const Frame frame = auto_frame(cloud, cfg.cells, cfg.margin);
        const GridSet nominal = signed_distance(rasterize(cloud, frame, true));
        save_rgs1((dir / "nominal.rgs1").string(), nominal);

        json run;
        run["t"] = t;
        run["frame"] = frame_json(frame);
        run["nominal_cells"] = nominal.count();
        run["nominal_connected"] = is_connected(nominal);
        const VecBound rho = bound.at(t);
        run["rho"] = rho;
        run["rho_norm"] = euclidean_norm(rho);

        std::optional<InnerResult> inner, ball;
        std::optional<GridSet> outer;
        std::vector<Interval> gi;
        if (want_inner) {
            inner = inner_approx(nominal, bound, t);
            ball = inner_approx_ball(nominal, bound, t);
            save_rgs1((dir / "inner.rgs1").string(), inner->set);
            save_rgs1((dir / "inner_ball.rgs1").string(), ball->set);
            run["inner_cells"] = inner->set.count();
            run["inner_ball_cells"] = ball->set.count();
            run["status"] = inner->vacuous ? "vacuous guarantee" : "guaranteed";
            run["ball_status"] = ball->vacuous ? "vacuous guarantee" : "guaranteed";
        }
        if (want_outer) {
            bool disconnected = false;
            outer = outer_approx(nominal, bound_out, t, &disconnected);
            save_rgs1((dir / "outer.rgs1").string(), *outer);
            run["rho_outer"] = bound_out.at(t);
            run["outer_cells"] = outer->count();
            run["outer_frame"] = frame_json(outer->frame);
            if (disconnected) {
                run["warnings"].push_back("nominal set is disconnected");
                log << "warning: nominal set at t = " << t << " is disconnected\n";
            }
        }
        if (want_intervals) {
            gi = guaranteed_intervals(nominal, bound, t);
            save_intervals_csv((dir / "intervals.csv").string(), gi);
            run["intervals"] = intervals_json(gi);
        }

        std::optional<SampleCloud> off_cloud;
        auto offnominal_cloud = [&]() -> const SampleCloud& {
            if (!off_cloud) {
                SamplerSettings so = s;
                so.seed = stream_seed(cfg.sampler.seed, 0x0ff);
                off_cloud = sample_endpoints(st.offnominal, so);
            }
            return *off_cloud;
        };

        if (want_table) {
            std::vector<Interval> nom_iv, off_iv;
            if (cfg.reference == "linear") {
                if (!st.linear)
                    throw Error(ErrorCode::MissingReference, "no exact reference for a nonlinear model");
                nom_iv = linear_box_reach(st.A, st.B, const_drift(st.d), st.box, st.x0, t).intervals;
                off_iv = linear_box_reach(st.A, st.B, const_drift(st.d_off), st.box_off, st.x0, t).intervals;
            } else {
                nom_iv = projection_intervals(nominal).intervals;
                off_iv = cloud_intervals(offnominal_cloud());
            }
            const auto style = parse_table_style(cfg.table);
            const auto rows = length_ratios(nom_iv, off_iv, rho);
            const std::string csv = emit_table(rows, style);
            write_text(dir / (cfg.table + ".csv"), csv);
            if (first_table) {
                write_text(fs::path(opt.out) / (cfg.table + ".csv"), csv);
                meta["table_time"] = t;
                first_table = false;
            }
            run["reference_nominal"] = intervals_json(nom_iv);
            run["reference_offnominal"] = intervals_json(off_iv);
        }

        if (want_plot) {
            PlotLayers layers;
            layers.nominal = &nominal;
            layers.outer = outer ? &*outer : nullptr;
            layers.inner = inner ? &inner->set : nullptr;
            layers.inner_ball = ball ? &ball->set : nullptr;
            layers.offnominal = &offnominal_cloud();
            layers.intervals = gi;
            std::ostringstream title;
            title << cfg.name << ", t = " << t << " s";
            layers.title = title.str();
            write_text(dir / "plot.svg", emit_plot(layers, opt.project));
        }

        write_text(dir / "meta.json", json({{"scenario", cfg.name}, {"seed", cfg.sampler.seed}, {"run", run}}).dump(2) + "\n");
        runs.push_back(run);
    }
    meta["runs"] = runs;
    write_text(fs::path(opt.out) / "meta.json", meta.dump(2) + "\n");
}

VerifyOutcome verify_result(const std::string& dir, const std::vector<double>& x, std::size_t n_eval_max)
{
    const fs::path d(dir);
    const GridSet nominal = load_rgs1((d / "nominal.rgs1").string());
    std::ifstream in(d / "meta.json");
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + (d / "meta.json").string());
    json meta;
    try {
        in >> meta;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::IoError, std::string("malformed meta.json: ") + e.what());
    }
    if (!meta.contains("run") || !meta["run"].contains("rho"))
        throw Error(ErrorCode::IoError, "meta.json has no rho for this result");
    const auto rho = meta["run"]["rho"].get<std::vector<double>>();
    if (x.size() != nominal.dim())
        throw Error(ErrorCode::ConfigError, "state has " + std::to_string(x.size()) + " components, set has "
                                                + std::to_string(nominal.dim()));
    return verify_state(x, nominal, rho, n_eval_max);
}

int exit_code(const std::exception& e) noexcept
{
    if (const auto* err = dynamic_cast<const Error*>(&e))
        return is_config_error(err->code()) ? 2 : 3;
    if (dynamic_cast<const json::exception*>(&e))
        return 2;
    return 3;
}

json error_json(const std::exception& e)
{
    json j;
    if (const auto* err = dynamic_cast<const Error*>(&e))
        j["error"] = std::string(to_string(err->code()));
    else
        j["error"] = "Internal";
    j["message"] = e.what();
    j["exit_code"] = exit_code(e);
    return j;
}

} // namespace offreach
