#include "pnpvem/mesh_generators.hpp"

#include "pnpvem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

namespace pnpvem {

std::optional<StructuredKind> parse_structured_kind(std::string_view name)
{
    if (name == "triangle")
        return StructuredKind::triangle;
    if (name == "square")
        return StructuredKind::square;
    if (name == "nonconvex")
        return StructuredKind::nonconvex;
    if (name == "mixed")
        return StructuredKind::mixed;
    return std::nullopt;
}

std::string_view to_string(StructuredKind kind)
{
    switch (kind) {
    case StructuredKind::triangle: return "triangle";
    case StructuredKind::square: return "square";
    case StructuredKind::nonconvex: return "nonconvex";
    case StructuredKind::mixed: return "mixed";
    }
    return "?";
}

namespace {

// Vertical offset of the zig-zag, as a fraction of the cell height.
constexpr double zigzag_amplitude = 0.15;

// Absolute distance under which two cell vertices are the same mesh vertex.
constexpr double merge_tolerance = 1e-11;

class VertexPool
{
public:
    int insert(Point p)
    {
        const auto bx = static_cast<std::int64_t>(std::floor(p.x / bucket_));
        const auto by = static_cast<std::int64_t>(std::floor(p.y / bucket_));
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                auto it = buckets_.find(key(bx + dx, by + dy));
                if (it == buckets_.end())
                    continue;
                for (int idx : it->second)
                    if (distance(points_[idx], p) < merge_tolerance)
                        return idx;
            }
        const int idx = static_cast<int>(points_.size());
        points_.push_back(p);
        buckets_[key(bx, by)].push_back(idx);
        return idx;
    }

    std::vector<Point> take() { return std::move(points_); }

private:
    static std::uint64_t key(std::int64_t x, std::int64_t y)
    {
        return (static_cast<std::uint64_t>(x) << 32) ^ static_cast<std::uint32_t>(y);
    }

    static constexpr double bucket_ = 1e-9;
    std::vector<Point> points_;
    std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

} // namespace

PolygonalMesh mesh_from_cells(const std::vector<std::vector<Point>>& cells)
{
    VertexPool pool;
    std::vector<std::vector<int>> elements;
    elements.reserve(cells.size());
    for (const auto& cell : cells) {
        std::vector<int> ids;
        ids.reserve(cell.size());
        for (const Point& p : cell) {
            const int id = pool.insert(p);
            if (ids.empty() || ids.back() != id)
                ids.push_back(id);
        }
        while (ids.size() > 1 && ids.front() == ids.back())
            ids.pop_back();
        if (ids.size() < 3)
            throw MeshFormatError("cell collapsed to fewer than 3 vertices while merging");
        elements.push_back(std::move(ids));
    }
    return PolygonalMesh(pool.take(), elements);
}

PolygonalMesh generate_structured(StructuredKind kind, int n)
{
    if (n < 1)
        throw Error("generate_structured: n must be >= 1");
    const double dn = static_cast<double>(n);
    auto grid = [dn](double i, double j) { return Point{i / dn, j / dn}; };

    std::vector<std::vector<Point>> cells;
    auto square_cell = [&](int i, int j) {
        cells.push_back({grid(i, j), grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1)});
    };

    switch (kind) {
    case StructuredKind::square:
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                square_cell(i, j);
        break;
    case StructuredKind::triangle:
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                cells.push_back({grid(i, j), grid(i + 1, j), grid(i + 1, j + 1)});
                cells.push_back({grid(i, j), grid(i + 1, j + 1), grid(i, j + 1)});
            }
        break;
    case StructuredKind::nonconvex:
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const Point left = grid(i, j + 0.5), right = grid(i + 1, j + 0.5);
                const Point up = grid(i + 1.0 / 3.0, j + 0.5 + zigzag_amplitude);
                const Point down = grid(i + 2.0 / 3.0, j + 0.5 - zigzag_amplitude);
                cells.push_back({grid(i, j), grid(i + 1, j), right, down, up, left});
                cells.push_back({left, up, down, right, grid(i + 1, j + 1), grid(i, j + 1)});
            }
        break;
    case StructuredKind::mixed: {
        const int tiled = n - n % 2;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                if (i >= tiled || j >= tiled) {
                    square_cell(i, j);
                    continue;
                }
                if (i % 2 != 0 || j % 2 != 0)
                    continue;
                // Macro-tile over cells [i, i+2) x [j, j+2).
                square_cell(i, j);
                square_cell(i, j + 1);
                cells.push_back({grid(i + 1, j), grid(i + 2, j), grid(i + 2, j + 1),
                                 grid(i + 1, j + 2), grid(i + 1, j + 1)});
                cells.push_back({grid(i + 2, j + 1), grid(i + 2, j + 2), grid(i + 1, j + 2)});
            }
        break;
    }
    }
    return mesh_from_cells(cells);
}

namespace {

class SeedGrid
{
public:
    explicit SeedGrid(const std::vector<Point>& seeds)
        : seeds_(seeds),
          bins_(std::max(1, static_cast<int>(std::sqrt(static_cast<double>(seeds.size()))))),
          cells_(static_cast<std::size_t>(bins_) * bins_)
    {
        for (int s = 0; s < static_cast<int>(seeds.size()); ++s)
            cells_[bin_of(seeds[s])].push_back(s);
    }

    int bins() const { return bins_; }
    double width() const { return 1.0 / bins_; }
    int coord(double v) const { return std::clamp(static_cast<int>(v * bins_), 0, bins_ - 1); }
    const std::vector<int>& at(int bx, int by) const { return cells_[by * bins_ + bx]; }

private:
    std::size_t bin_of(Point p) const { return coord(p.y) * bins_ + coord(p.x); }

    const std::vector<Point>& seeds_;
    int bins_;
    std::vector<std::vector<int>> cells_;
};

std::vector<Point> voronoi_cell(const std::vector<Point>& seeds, const SeedGrid& grid, int s)
{
    const Point si = seeds[s];
    std::vector<Point> cell{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    const int cx = grid.coord(si.x), cy = grid.coord(si.y);
    auto clip_with = [&](int other) {
        if (other == s)
            return;
        const Point sj = seeds[other];
        const Point nrm = sj - si;
        cell = clip_polygon(cell, {nrm, 0.5 * (dot(sj, sj) - dot(si, si))});
    };
    for (int ring = 0; ring <= grid.bins(); ++ring) {
        for (int by = cy - ring; by <= cy + ring; ++by)
            for (int bx = cx - ring; bx <= cx + ring; ++bx) {
                if (std::max(std::abs(bx - cx), std::abs(by - cy)) != ring)
                    continue;
                if (bx < 0 || by < 0 || bx >= grid.bins() || by >= grid.bins())
                    continue;
                for (int other : grid.at(bx, by))
                    clip_with(other);
            }
        double reach = 0.0;
        for (const Point& v : cell)
            reach = std::max(reach, distance(v, si));
        // Seeds outside the scanned block are at least ring*width away.
        if (ring * grid.width() >= 2.0 * reach)
            break;
    }
    return cell;
}

double unit_uniform(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

std::vector<std::vector<Point>> clipped_voronoi_cells(const std::vector<Point>& seeds)
{
    const SeedGrid grid(seeds);
    std::vector<std::vector<Point>> cells(seeds.size());
    for (std::size_t s = 0; s < seeds.size(); ++s)
        cells[s] = voronoi_cell(seeds, grid, static_cast<int>(s));
    return cells;
}

PolygonalMesh generate_voronoi(int n_seeds, int lloyd_iters, std::uint64_t rng_seed,
                               VoronoiStats* stats)
{
    if (n_seeds < 1)
        throw Error("generate_voronoi: n_seeds must be >= 1");
    std::mt19937_64 rng(rng_seed);
    std::vector<Point> seeds(n_seeds);
    for (Point& p : seeds)
        p = {unit_uniform(rng), unit_uniform(rng)};

    // Coincident seeds would give an empty cell; nudge later duplicates.
    VoronoiStats local_stats;
    const double min_separation = 1e-8 / std::sqrt(static_cast<double>(n_seeds));
    for (int pass = 0; pass < 8; ++pass) {
        const SeedGrid grid(seeds);
        bool moved = false;
        for (int s = 0; s < n_seeds; ++s) {
            const int cx = grid.coord(seeds[s].x), cy = grid.coord(seeds[s].y);
            for (int by = std::max(0, cy - 1); by <= std::min(grid.bins() - 1, cy + 1); ++by)
                for (int bx = std::max(0, cx - 1); bx <= std::min(grid.bins() - 1, cx + 1); ++bx)
                    for (int other : grid.at(bx, by))
                        if (other < s && distance(seeds[other], seeds[s]) < min_separation) {
                            seeds[s] = {unit_uniform(rng), unit_uniform(rng)};
                            ++local_stats.reseeded;
                            moved = true;
                        }
        }
        if (!moved)
            break;
    }
    if (stats)
        *stats = local_stats;

    auto cells = clipped_voronoi_cells(seeds);
    for (int it = 0; it < lloyd_iters; ++it) {
        for (int s = 0; s < n_seeds; ++s)
            seeds[s] = polygon_centroid(cells[s]);
        cells = clipped_voronoi_cells(seeds);
    }
    return mesh_from_cells(cells);
}

} // namespace pnpvem
