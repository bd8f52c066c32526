#include "offreach/report.hpp"

#include "offreach/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace offreach {

namespace {

std::string fmt(double v, int prec = 3)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    std::string s = buf;
    if (s == "-0.000" || s == "-0.0" || s == "-0")
        s.erase(0, 1);
    return s;
}

double ratio(double num, double den)
{
    if (!(den > 0.0))
        throw Error(ErrorCode::MissingReference, "off-nominal reference has zero length");
    return std::max(num, 0.0) / den;
}

} // namespace

TableStyle parse_table_style(std::string_view s)
{
    if (s == "table1")
        return TableStyle::Table1;
    if (s == "table2")
        return TableStyle::Table2;
    throw Error(ErrorCode::ConfigError, "table style must be table1 or table2");
}

std::string_view to_string(TableStyle s) noexcept
{
    return s == TableStyle::Table1 ? "table1" : "table2";
}

std::vector<TableRow> length_ratios(const std::vector<Interval>& nominal, const std::vector<Interval>& offnominal,
                                    const VecBound& rho)
{
    if (offnominal.empty() || offnominal.size() != nominal.size())
        throw Error(ErrorCode::MissingReference, "no off-nominal reference for every axis");
    if (rho.size() != nominal.size())
        throw Error(ErrorCode::InvalidSpec, "rho and interval dimensions differ");
    const double norm = euclidean_norm(rho);
    std::vector<TableRow> rows;
    for (std::size_t i = 0; i < nominal.size(); ++i) {
        const double len = nominal[i].length();
        rows.push_back({i + 1, ratio(len - 2.0 * rho[i], offnominal[i].length()),
                        ratio(len - 2.0 * norm, offnominal[i].length())});
    }
    return rows;
}

std::vector<TableRow> grid_ratios(const GridSet& inner_hyperrect, const GridSet& inner_ball,
                                  const std::vector<Interval>& offnominal)
{
    if (offnominal.size() != inner_hyperrect.dim() || offnominal.size() != inner_ball.dim())
        throw Error(ErrorCode::MissingReference, "no off-nominal reference for every axis");
    const auto ph = projection_intervals(inner_hyperrect).intervals;
    const auto pb = projection_intervals(inner_ball).intervals;
    std::vector<TableRow> rows;
    for (std::size_t i = 0; i < offnominal.size(); ++i)
        rows.push_back({i + 1, ratio(ph[i].length(), offnominal[i].length()),
                        ratio(pb[i].length(), offnominal[i].length())});
    return rows;
}

std::string emit_table(const std::vector<TableRow>& rows, TableStyle)
{
    std::string out = "dim,hyperrect_ratio,ball_ratio\n";
    for (const auto& r : rows)
        out += std::to_string(r.dim) + "," + fmt(100.0 * r.hyperrect, 1) + "," + fmt(100.0 * r.ball, 1) + "\n";
    return out;
}

GridSet project_set(const GridSet& set, std::size_t i, std::size_t j)
{
    if (i >= set.dim() || j >= set.dim() || i == j)
        throw Error(ErrorCode::UnsupportedDim, "projection axes out of range");
    const Frame& f = set.frame;
    GridSet out(Frame{{f.origin[i], f.origin[j]}, {f.spacing[i], f.spacing[j]}, {f.shape[i], f.shape[j]}});
    std::vector<std::size_t> idx(set.dim());
    for (std::size_t c = 0; c < set.size(); ++c) {
        if (!set.occ[c])
            continue;
        set.unravel(c, idx);
        out.occ[idx[i] * f.shape[j] + idx[j]] = 1;
    }
    return out;
}

namespace {

struct View {
    double x0, x1, y0, y1;
    double W = 640.0, H = 640.0, pad = 48.0;

    double px(double x) const { return pad + (x - x0) / (x1 - x0) * (W - 2 * pad); }
    double py(double y) const { return H - pad - (y - y0) / (y1 - y0) * (H - 2 * pad); }
};

// One rect per horizontal run of occupied cells.
void cells(std::ostringstream& os, const GridSet& g, const View& v, const std::string& style)
{
    const Frame& f = g.frame;
    os << "<g " << style << ">\n";
    for (std::size_t a = 0; a < f.shape[0]; ++a) {
        std::size_t b = 0;
        while (b < f.shape[1]) {
            if (!g.occ[a * f.shape[1] + b]) {
                ++b;
                continue;
            }
            std::size_t e = b;
            while (e < f.shape[1] && g.occ[a * f.shape[1] + e])
                ++e;
            const double xa = f.origin[0] + static_cast<double>(a) * f.spacing[0];
            const double ya = f.origin[1] + static_cast<double>(b) * f.spacing[1];
            const double yb = f.origin[1] + static_cast<double>(e) * f.spacing[1];
            os << "<rect x=\"" << fmt(v.px(xa), 2) << "\" y=\"" << fmt(v.py(yb), 2) << "\" width=\""
               << fmt(v.px(xa + f.spacing[0]) - v.px(xa), 2) << "\" height=\"" << fmt(v.py(ya) - v.py(yb), 2)
               << "\"/>\n";
            b = e;
        }
    }
    os << "</g>\n";
}

} // namespace

std::string emit_plot(const PlotLayers& layers, std::optional<std::pair<std::size_t, std::size_t>> project)
{
    if (!layers.nominal)
        throw Error(ErrorCode::EmptySet, "plot needs a nominal set");
    const std::size_t n = layers.nominal->dim();
    std::size_t ai = 0, aj = 1;
    if (project) {
        ai = project->first;
        aj = project->second;
    } else if (n != 2) {
        throw Error(ErrorCode::UnsupportedDim, "plotting a " + std::to_string(n) + "-D set needs --project i j");
    }
    if (ai >= n || aj >= n || ai == aj)
        throw Error(ErrorCode::UnsupportedDim, "projection axes out of range");

    auto proj = [&](const GridSet* g) -> std::optional<GridSet> {
        if (!g)
            return std::nullopt;
        return n == 2 && ai == 0 && aj == 1 ? GridSet(*g) : project_set(*g, ai, aj);
    };
    const auto nom = proj(layers.nominal);
    const auto out = proj(layers.outer);
    const auto inn = proj(layers.inner);
    const auto ball = proj(layers.inner_ball);

    // Viewport: union of the drawn frames.
    const GridSet& base = out ? *out : *nom;
    View v{base.frame.origin[0], base.frame.origin[0] + static_cast<double>(base.frame.shape[0]) * base.frame.spacing[0],
           base.frame.origin[1], base.frame.origin[1] + static_cast<double>(base.frame.shape[1]) * base.frame.spacing[1]};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << v.W << "\" height=\"" << v.H + 60
       << "\" viewBox=\"0 0 " << v.W << " " << v.H + 60 << "\">\n";
    os << "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" "
          "patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#555\" "
          "stroke-width=\"1\"/></pattern></defs>\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!layers.title.empty())
        os << "<text x=\"" << v.pad << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << layers.title
           << "</text>\n";
    if (out)
        cells(os, *out, v, "fill=\"#f4c7a1\"");
    cells(os, *nom, v, "fill=\"#9ecae1\"");
    if (inn)
        cells(os, *inn, v, "fill=\"#31a354\" fill-opacity=\"0.8\"");
    if (ball)
        cells(os, *ball, v, "fill=\"#006d2c\"");

    if (layers.offnominal) {
        const auto& c = *layers.offnominal;
        const std::size_t K = c.size();
        const std::size_t stride = std::max<std::size_t>(1, K / 2000);
        os << "<g fill=\"#000\">\n";
        for (std::size_t k = 0; k < K; k += stride) {
            const auto p = c.point(k);
            os << "<circle cx=\"" << fmt(v.px(p[ai]), 2) << "\" cy=\"" << fmt(v.py(p[aj]), 2) << "\" r=\"0.8\"/>\n";
        }
        os << "</g>\n";
    }

    // Guaranteed intervals as hatched bands along the two axes.
    if (layers.intervals.size() == n) {
        const Interval& ix = layers.intervals[ai];
        const Interval& iy = layers.intervals[aj];
        if (!ix.empty())
            os << "<rect x=\"" << fmt(v.px(ix.lo), 2) << "\" y=\"" << fmt(v.H - v.pad + 4, 2) << "\" width=\""
               << fmt(v.px(ix.hi) - v.px(ix.lo), 2) << "\" height=\"10\" fill=\"url(#hatch)\" stroke=\"#555\"/>\n";
        if (!iy.empty())
            os << "<rect x=\"" << fmt(v.pad - 14, 2) << "\" y=\"" << fmt(v.py(iy.hi), 2)
               << "\" width=\"10\" height=\"" << fmt(v.py(iy.lo) - v.py(iy.hi), 2)
               << "\" fill=\"url(#hatch)\" stroke=\"#555\"/>\n";
    }

    os << "<rect x=\"" << v.pad << "\" y=\"" << v.pad << "\" width=\"" << v.W - 2 * v.pad << "\" height=\""
       << v.H - 2 * v.pad << "\" fill=\"none\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << v.W / 2 << "\" y=\"" << v.H - 12 << "\" font-family=\"sans-serif\" font-size=\"12\">x"
       << ai + 1 << "</text>\n";
    os << "<text x=\"8\" y=\"" << v.H / 2 << "\" font-family=\"sans-serif\" font-size=\"12\">x" << aj + 1
       << "</text>\n";

    const bool vacuous = layers.inner && layers.inner->empty();
    if (vacuous)
        os << "<text x=\"" << v.W / 2 << "\" y=\"" << v.pad + 20
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" fill=\"#b30000\">"
              "vacuous guarantee</text>\n";

    // Legend.
    const double ly = v.H + 16;
    const char* names[] = {"outer", "nominal", "inner (box)", "inner (ball)", "off-nominal samples"};
    const char* colors[] = {"#f4c7a1", "#9ecae1", "#31a354", "#006d2c", "#000"};
    for (int k = 0; k < 5; ++k) {
        const double lx = v.pad + 112.0 * k;
        os << "<rect x=\"" << lx << "\" y=\"" << ly << "\" width=\"10\" height=\"10\" fill=\"" << colors[k]
           << "\"/><text x=\"" << lx + 14 << "\" y=\"" << ly + 9 << "\" font-family=\"sans-serif\" font-size=\"11\">"
           << names[k] << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace offreach
