#include "pnpvem/study.hpp"

#include "pnpvem/errors.hpp"
#include "pnpvem/mesh_generators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace pnpvem {

namespace {

constexpr std::array<const char*, 3> field_names{"phi", "p1", "p2"};

std::string fmt(const char* spec, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

} // namespace

FieldErrors compute_field_errors(const Discretization& disc, const std::vector<double>& dofs,
                                 const std::function<double(Point)>& u,
                                 const std::function<Point(Point)>& grad_u)
{
    const auto& map = disc.dof_map();
    double l2 = 0.0, h1 = 0.0;
    for (int e = 0; e < map.num_elements(); ++e) {
        const auto& s = disc.spaces()[e];
        Eigen::VectorXd local(s.num_dofs());
        gather(map, e, dofs, {local.data(), static_cast<std::size_t>(local.size())});
        const Eigen::VectorXd coeffs = s.pi_nabla * local;
        const auto rule = polygon_quadrature(s.vertices, 2 * s.k + 4);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Point p = rule.points[q];
            const double diff = u(p) - coeffs.dot(s.basis.values(p));
            const Eigen::Vector2d g = s.basis.gradients(p) * coeffs;
            const Point gu = grad_u(p);
            l2 += rule.weights[q] * diff * diff;
            h1 += rule.weights[q] * ((gu.x - g[0]) * (gu.x - g[0]) + (gu.y - g[1]) * (gu.y - g[1]));
        }
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

std::array<FieldErrors, 3> compute_errors(const Discretization& disc, const PNPState& state,
                                          const ManufacturedCase& mc, double t)
{
    std::array<FieldErrors, 3> out;
    const std::array<const std::vector<double>*, 3> dofs{&state.phi, &state.p[0], &state.p[1]};
    for (int f = 0; f < 3; ++f) {
        const Field field = static_cast<Field>(f);
        out[f] = compute_field_errors(
            disc, *dofs[f], [&](Point p) { return mc.value(field, t, p.x, p.y); },
            [&](Point p) { return mc.gradient(field, t, p.x, p.y); });
    }
    return out;
}

std::optional<double> observed_order(double e0, double e1, double h0, double h1)
{
    if (!(e0 > 0.0) || !(e1 > 0.0) || !(h0 > 0.0) || !(h1 > 0.0) || h0 == h1)
        return std::nullopt;
    return std::log(e0 / e1) / std::log(h0 / h1);
}

std::optional<MeshFamily> parse_mesh_family(std::string_view name)
{
    for (auto f : {MeshFamily::triangle, MeshFamily::square, MeshFamily::nonconvex, MeshFamily::mixed,
                   MeshFamily::voronoi, MeshFamily::voronoi_smooth})
        if (to_string(f) == name)
            return f;
    return std::nullopt;
}

std::string_view to_string(MeshFamily family)
{
    switch (family) {
    case MeshFamily::triangle: return "triangle";
    case MeshFamily::square: return "square";
    case MeshFamily::nonconvex: return "nonconvex";
    case MeshFamily::mixed: return "mixed";
    case MeshFamily::voronoi: return "voronoi";
    case MeshFamily::voronoi_smooth: return "voronoi-smooth";
    }
    return "?";
}

PolygonalMesh make_mesh(MeshFamily family, int n, std::uint64_t seed)
{
    switch (family) {
    case MeshFamily::triangle: return generate_structured(StructuredKind::triangle, n);
    case MeshFamily::square: return generate_structured(StructuredKind::square, n);
    case MeshFamily::nonconvex: return generate_structured(StructuredKind::nonconvex, n);
    case MeshFamily::mixed: return generate_structured(StructuredKind::mixed, n);
    case MeshFamily::voronoi: return generate_voronoi(n * n, 0, seed);
    case MeshFamily::voronoi_smooth: return generate_voronoi(n * n, 20, seed);
    }
    throw Error("unknown mesh family");
}

bool StudyResult::all_ok() const
{
    return std::all_of(levels.begin(), levels.end(), [](const LevelResult& l) { return l.ok; });
}

std::optional<double> StudyResult::order(std::size_t i, int field, int norm) const
{
    if (i == 0 || i >= levels.size() || !levels[i].ok || !levels[i - 1].ok)
        return std::nullopt;
    const auto& a = levels[i - 1];
    const auto& b = levels[i];
    const double ea = norm == 0 ? a.errors[field].l2 : a.errors[field].h1;
    const double eb = norm == 0 ? b.errors[field].l2 : b.errors[field].h1;
    return observed_order(ea, eb, a.h, b.h);
}

LevelResult run_level(const StudyConfig& config, int level)
{
    LevelResult r;
    r.level = level;
    const auto start = std::chrono::steady_clock::now();
    try {
        const PolygonalMesh mesh = make_mesh(config.family, level, config.seed);
        r.num_elements = mesh.num_elements();
        r.h = mesh_size(mesh);
        const Discretization disc(mesh, config.k, config.exec);
        const ManufacturedCase mc(config.q[0], config.q[1]);
        SolverConfig sc;
        sc.tau = config.tau ? *config.tau : r.h * r.h;
        sc.T = config.T;
        sc.gummel_tol = config.gummel_tol;
        sc.gummel_max_iters = config.gummel_max_iters;
        sc.linear_tol = config.linear_tol;
        sc.load_quadrature_order = config.load_quadrature_order;
        sc.q = config.q;
        sc.exec = config.exec;
        const PNPSolver solver(disc, ProblemData::manufactured(mc), sc);
        auto run = solver.run();
        r.errors = compute_errors(disc, run.state, mc, config.T);
        for (const auto& rec : run.log) {
            r.max_gummel_iters = std::max(r.max_gummel_iters, rec.gummel_iters);
            r.max_residual = std::max({r.max_residual, rec.poisson_residual, rec.np_residual[0],
                                       rec.np_residual[1]});
        }
        r.log = std::move(run.log);
        r.ok = true;
    } catch (const std::exception& ex) {
        r.message = ex.what();
    }
    if (config.record_time)
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

StudyResult run_study(const StudyConfig& config, const std::function<void(const LevelResult&)>& progress)
{
    StudyResult result;
    result.config = config;
    for (int level : config.levels) {
        result.levels.push_back(run_level(config, level));
        if (progress)
            progress(result.levels.back());
    }
    return result;
}

void write_study_csv(std::ostream& os, const StudyResult& result)
{
    os << "level,h,NE,field,eL2,eH1,order_L2,order_H1,seconds\n";
    for (std::size_t i = 0; i < result.levels.size(); ++i) {
        const auto& l = result.levels[i];
        for (int f = 0; f < 3; ++f) {
            auto order = [&](int norm) {
                const auto o = result.order(i, f, norm);
                return o ? fmt("%.6f", *o) : std::string();
            };
            os << l.level << ',' << fmt("%.12g", l.h) << ',' << l.num_elements << ',' << field_names[f] << ',';
            if (l.ok)
                os << fmt("%.10e", l.errors[f].l2) << ',' << fmt("%.10e", l.errors[f].h1);
            else
                os << ',';
            os << ',' << order(0) << ',' << order(1) << ',' << fmt("%.3f", l.seconds) << '\n';
        }
    }
}

void write_study_svg(std::ostream& os, const StudyResult& result)
{
    struct Curve
    {
        std::string label;
        std::string color;
        bool dashed;
        std::vector<std::pair<double, double>> pts; // (log10 h, log10 e)
    };
    const std::array<const char*, 3> colors{"#1f77b4", "#d62728", "#2ca02c"};
    std::vector<Curve> curves;
    for (int norm = 0; norm < 2; ++norm)
        for (int f = 0; f < 3; ++f) {
            Curve c{std::string(field_names[f]) + (norm == 0 ? " L2" : " H1"), colors[f], norm == 1, {}};
            for (const auto& l : result.levels) {
                const double e = norm == 0 ? l.errors[f].l2 : l.errors[f].h1;
                if (l.ok && e > 0.0)
                    c.pts.emplace_back(std::log10(l.h), std::log10(e));
            }
            curves.push_back(std::move(c));
        }

    // Reference slopes through the coarsest phi point of each norm.
    for (int norm = 0; norm < 2; ++norm) {
        const auto& base = curves[norm * 3].pts;
        if (base.size() < 2)
            continue;
        const double slope = norm == 0 ? 2.0 : 1.0;
        const auto [x0, y0] = base.front();
        const double x1 = base.back().first;
        curves.push_back({"slope " + std::to_string(static_cast<int>(slope)), "#777777", norm == 1,
                          {{x0, y0 + 0.3}, {x1, y0 + 0.3 + slope * (x1 - x0)}}});
    }

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& c : curves)
        for (const auto& [x, y] : c.pts) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (xmin > xmax) {
        xmin = -2;
        xmax = 0;
        ymin = -4;
        ymax = 0;
    }
    xmin = std::floor(xmin * 10) / 10 - 0.05;
    xmax = std::ceil(xmax * 10) / 10 + 0.05;
    ymin = std::floor(ymin) - 0.1;
    ymax = std::ceil(ymax) + 0.1;

    const double width = 720, height = 520, left = 80, right = 170, top = 40, bottom = 60;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (width - left - right); };
    auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * (height - top - bottom); };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << to_string(result.config.family) << " mesh, k=" << result.config.k << ", t=" << fmt("%g", result.config.T)
       << "</text>\n";
    for (int d = static_cast<int>(std::ceil(ymin)); d <= static_cast<int>(std::floor(ymax)); ++d) {
        os << "<line x1=\"" << sx(xmin) << "\" y1=\"" << sy(d) << "\" x2=\"" << sx(xmax) << "\" y2=\"" << sy(d)
           << "\" stroke=\"#e0e0e0\"/>\n";
        os << "<text x=\"" << sx(xmin) - 6 << "\" y=\"" << sy(d) + 4 << "\" text-anchor=\"end\">1e" << d
           << "</text>\n";
    }
    for (const auto& l : result.levels) {
        if (!(l.h > 0.0))
            continue;
        const double x = std::log10(l.h);
        os << "<line x1=\"" << sx(x) << "\" y1=\"" << sy(ymin) << "\" x2=\"" << sx(x) << "\" y2=\"" << sy(ymax)
           << "\" stroke=\"#f0f0f0\"/>\n";
        os << "<text x=\"" << sx(x) << "\" y=\"" << sy(ymin) + 16 << "\" text-anchor=\"middle\">"
           << fmt("%.3g", l.h) << "</text>\n";
    }
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
       << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 15
       << "\" text-anchor=\"middle\">h</text>\n";
    os << "<text x=\"18\" y=\"" << (top + height - bottom) / 2 << "\" transform=\"rotate(-90 18 "
       << (top + height - bottom) / 2 << ")\" text-anchor=\"middle\">error</text>\n";

    int legend = 0;
    for (const auto& c : curves) {
        if (c.pts.empty())
            continue;
        os << "<polyline fill=\"none\" stroke=\"" << c.color << "\" stroke-width=\"1.8\""
           << (c.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
        for (const auto& [x, y] : c.pts)
            os << fmt("%.2f", sx(x)) << ',' << fmt("%.2f", sy(y)) << ' ';
        os << "\"/>\n";
        if (c.label.rfind("slope", 0) != 0)
            for (const auto& [x, y] : c.pts)
                os << "<circle cx=\"" << fmt("%.2f", sx(x)) << "\" cy=\"" << fmt("%.2f", sy(y))
                   << "\" r=\"3\" fill=\"" << c.color << "\"/>\n";
        const double ly = top + 14 + 18 * legend++;
        const double lx = width - right + 12;
        os << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 26 << "\" y2=\"" << ly
           << "\" stroke=\"" << c.color << "\" stroke-width=\"1.8\""
           << (c.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
        os << "<text x=\"" << lx + 32 << "\" y=\"" << ly + 4 << "\">" << c.label << "</text>\n";
    }
    os << "</svg>\n";
}

void write_study_files(const std::string& dir, const StudyResult& result)
{
    std::filesystem::create_directories(dir);
    std::ofstream csv(std::filesystem::path(dir) / "study.csv");
    write_study_csv(csv, result);
    std::ofstream svg(std::filesystem::path(dir) / "study.svg");
    write_study_svg(svg, result);
    if (!csv || !svg)
        throw Error("could not write study files to " + dir);
}

} // namespace pnpvem
