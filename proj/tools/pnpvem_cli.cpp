// Command-line driver: convergence studies, single runs and mesh utilities.

#include "pnpvem/errors.hpp"
#include "pnpvem/mesh.hpp"
#include "pnpvem/mesh_generators.hpp"
#include "pnpvem/study.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace pnpvem;

namespace {

MeshFamily family_or_throw(const std::string& name)
{
    if (auto f = parse_mesh_family(name))
        return *f;
    throw CLI::ValidationError("--mesh", "unknown mesh family '" + name + "'");
}

std::optional<double> parse_tau(const std::string& s)
{
    if (s == "h2")
        return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size() && v > 0.0)
            return v;
    } catch (const std::exception&) {
    }
    throw CLI::ValidationError("--tau", "expected 'h2' or a positive number, got '" + s + "'");
}

void print_level(const LevelResult& l)
{
    if (!l.ok) {
        std::fprintf(stderr, "level %d failed: %s\n", l.level, l.message.c_str());
        return;
    }
    std::fprintf(stderr, "level %3d  h=%.4g  NE=%d  gummel<=%d  eL2(phi)=%.3e  eH1(phi)=%.3e  %.1fs\n", l.level,
                 l.h, l.num_elements, l.max_gummel_iters, l.errors[0].l2, l.errors[0].h1, l.seconds);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Virtual element solver for the Poisson-Nernst-Planck system"};
    app.require_subcommand(1);

    // study
    auto* study = app.add_subcommand("study", "Convergence study on the manufactured solution");
    std::string mesh_name = "square", tau_text = "h2", out_dir = "study_out";
    std::vector<int> levels{8, 16, 32, 64};
    StudyConfig cfg;
    bool no_timing = false, serial = false;
    study->add_option("--mesh", mesh_name, "triangle|square|nonconvex|mixed|voronoi|voronoi-smooth")
        ->capture_default_str();
    study->add_option("--levels", levels, "Refinement levels (cells per side, or sqrt of seed count)")
        ->delimiter(',')
        ->capture_default_str();
    study->add_option("--order", cfg.k, "VEM order k (1 or 2)")->capture_default_str();
    study->add_option("--T", cfg.T, "Final time")->capture_default_str();
    study->add_option("--tau", tau_text, "Time step: 'h2' or a number")->capture_default_str();
    study->add_option("--seed", cfg.seed, "Seed for the Voronoi generators")->capture_default_str();
    study->add_option("--out", out_dir, "Output directory")->capture_default_str();
    study->add_option("--gummel-tol", cfg.gummel_tol, "Gummel increment tolerance")->capture_default_str();
    study->add_option("--linear-tol", cfg.linear_tol, "Relative residual of linear solves")->capture_default_str();
    study->add_option("--load-order", cfg.load_quadrature_order, "Quadrature order for source loads (0: default)")
        ->capture_default_str();
    study->add_flag("--no-timing", no_timing, "Write 0 seconds so reruns give identical files");
    study->add_flag("--serial", serial, "Use the serial reference kernels");

    // run
    auto* run = app.add_subcommand("run", "Single manufactured-solution run with a step log");
    std::string run_mesh = "square", run_tau = "h2", log_path;
    int run_level_n = 8;
    StudyConfig run_cfg;
    run->add_option("--mesh", run_mesh)->capture_default_str();
    run->add_option("--level", run_level_n)->capture_default_str();
    run->add_option("--order", run_cfg.k)->capture_default_str();
    run->add_option("--T", run_cfg.T)->capture_default_str();
    run->add_option("--tau", run_tau)->capture_default_str();
    run->add_option("--seed", run_cfg.seed)->capture_default_str();
    run->add_option("--log", log_path, "Write the per-step CSV log here");

    // mesh gen / mesh check
    auto* mesh = app.add_subcommand("mesh", "Mesh utilities");
    mesh->require_subcommand(1);
    auto* gen = mesh->add_subcommand("gen", "Generate a mesh file");
    std::string gen_family = "square", gen_out;
    int gen_n = 8;
    std::uint64_t gen_seed = 7;
    gen->add_option("--mesh", gen_family)->capture_default_str();
    gen->add_option("--level", gen_n)->capture_default_str();
    gen->add_option("--seed", gen_seed)->capture_default_str();
    gen->add_option("--out", gen_out, "Output file (stdout if omitted)");
    auto* check = mesh->add_subcommand("check", "Validate a mesh file");
    std::string check_path;
    check->add_option("file", check_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*study) {
            cfg.family = family_or_throw(mesh_name);
            cfg.levels = levels;
            cfg.tau = parse_tau(tau_text);
            cfg.record_time = !no_timing;
            cfg.exec = serial ? Exec::serial : Exec::parallel;
            if (cfg.levels.size() < 2)
                throw CLI::ValidationError("--levels", "at least two levels are needed for orders");
            const auto result = run_study(cfg, print_level);
            write_study_files(out_dir, result);
            write_study_csv(std::cout, result);
            return result.all_ok() ? 0 : 1;
        }
        if (*run) {
            run_cfg.family = family_or_throw(run_mesh);
            run_cfg.tau = parse_tau(run_tau);
            const auto l = run_level(run_cfg, run_level_n);
            print_level(l);
            if (!log_path.empty()) {
                std::ofstream os(log_path);
                write_step_log(os, l.log);
            }
            return l.ok ? 0 : 1;
        }
        if (*gen) {
            const auto m = make_mesh(family_or_throw(gen_family), gen_n, gen_seed);
            if (gen_out.empty())
                write_mesh(std::cout, m);
            else
                write_mesh_file(gen_out, m);
            return 0;
        }
        if (*check) {
            const auto m = read_mesh_file(check_path);
            const auto report = validate(m);
            std::printf("elements %d  vertices %d  h %.6g  area %.15g\n", report.num_elements, m.num_vertices(),
                        report.h, report.total_area);
            std::printf("star-shaped %s  mean inradius ratio %.4f  min inradius ratio %.4f\n",
                        report.all_star_shaped() ? "yes" : "no", report.mean_inradius_ratio(),
                        report.min_inradius_ratio);
            for (const auto& d : report.defects)
                std::printf("defect: %s\n", d.c_str());
            for (const auto& w : report.warnings)
                std::printf("warning: %s\n", w.c_str());
            return report.structurally_valid() && report.all_star_shaped() ? 0 : 1;
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
