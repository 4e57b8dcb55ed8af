#pragma once

#include "pnpvem/manufactured.hpp"
#include "pnpvem/mesh.hpp"
#include "pnpvem/pnp_solver.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pnpvem {

struct FieldErrors
{
    double l2 = 0.0;
    double h1 = 0.0;
};

/// sqrt(sum_E ||u - Pi_nabla u_h||^2_E) and the same for the gradient, with a fan
/// rule of order 2k + 4 on each element. `dofs` is a full-length global vector.
FieldErrors compute_field_errors(const Discretization& disc, const std::vector<double>& dofs,
                                 const std::function<double(Point)>& u,
                                 const std::function<Point(Point)>& grad_u);

/// Errors of (phi, p1, p2) against the manufactured solution at time t.
std::array<FieldErrors, 3> compute_errors(const Discretization& disc, const PNPState& state,
                                          const ManufacturedCase& mc, double t);

/// log(e0 / e1) / log(h0 / h1); empty when an error is zero or the sizes coincide.
std::optional<double> observed_order(double e0, double e1, double h0, double h1);

enum class MeshFamily { triangle, square, nonconvex, mixed, voronoi, voronoi_smooth };

std::optional<MeshFamily> parse_mesh_family(std::string_view name);
std::string_view to_string(MeshFamily family);

/// Mesh of a family at refinement level n: n x n cells for the structured
/// families, n^2 seeds for the Voronoi ones (smooth: 20 Lloyd iterations).
PolygonalMesh make_mesh(MeshFamily family, int n, std::uint64_t seed);

struct StudyConfig
{
    MeshFamily family = MeshFamily::square;
    std::vector<int> levels{8, 16, 32, 64};
    int k = 1;
    double T = 1.0;
    std::optional<double> tau;   // empty: tau = h^2
    std::uint64_t seed = 7;
    std::array<double, 2> q{1.0, -1.0};
    double gummel_tol = 1e-10;
    int gummel_max_iters = 50;
    double linear_tol = 1e-12;
    int load_quadrature_order = 0;
    bool record_time = true;     // false writes 0 seconds for reproducible files
    Exec exec = Exec::parallel;
};

struct LevelResult
{
    int level = 0;
    double h = 0.0;
    int num_elements = 0;
    std::array<FieldErrors, 3> errors{};
    double seconds = 0.0;
    bool ok = false;
    std::string message;
    int max_gummel_iters = 0;
    double max_residual = 0.0;
    std::vector<StepRecord> log;
};

struct StudyResult
{
    StudyConfig config;
    std::vector<LevelResult> levels;

    bool all_ok() const;
    /// Observed order of a field and norm (0: L2, 1: H1) between levels i-1 and i.
    std::optional<double> order(std::size_t i, int field, int norm) const;
};

/// Run one level: mesh, time loop, errors. Failures are recorded, not thrown.
LevelResult run_level(const StudyConfig& config, int level);

StudyResult run_study(const StudyConfig& config,
                      const std::function<void(const LevelResult&)>& progress = {});

/// CSV: level,h,NE,field,eL2,eH1,order_L2,order_H1,seconds (one row per field).
void write_study_csv(std::ostream& os, const StudyResult& result);
/// Log-log plot of all six error curves with reference slopes 1 and 2.
void write_study_svg(std::ostream& os, const StudyResult& result);
/// Write study.csv and study.svg into dir (created if needed).
void write_study_files(const std::string& dir, const StudyResult& result);

} // namespace pnpvem
