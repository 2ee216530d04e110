#pragma once

// Closed triangle mesh of a binary ROI at iso-level 0.5 (marching cubes with
// vertices at edge midpoints).
//
// The 256-entry case table is built from per-face rules instead of being
// typed in: on each cube face, with corners taken counter-clockwise around
// the outward normal, every maximal run of inside corners is cut off by one
// segment from the edge entering the run to the edge leaving it. Faces with
// diagonal inside corners therefore always separate the inside corners, and
// two cubes sharing a face produce the same segments, so the mesh is
// watertight. Segments chain into closed loops inside each cube; every loop
// is fanned around its centroid. Triangle normals point out of the ROI.
//
// The raw mesh follows the voxel staircase and overestimates the surface of
// smooth objects (a digitized ball of radius 10 voxels has sphericity 0.925).
// shape_features therefore runs a few rounds of Taubin smoothing by default.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "gbmos/volumeio/volume.hpp"

namespace gbmos {

using Triangle = std::array<Vec3, 3>;

namespace detail {

struct CubeCase {
    std::vector<Triangle> triangles; // unit-cube coordinates
};

inline Vec3 corner_position(int c) { return {double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)}; }

inline const std::array<CubeCase, 256>& cube_cases() {
    static const auto table = [] {
        // Corners of each face, counter-clockwise seen from outside the cube.
        static const int faces[6][4] = {{0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4},
                                        {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6}};
        std::array<CubeCase, 256> out;
        for (int config = 1; config < 255; ++config) {
            auto in = [&](int corner) { return (config >> corner) & 1; };
            auto edge = [](int a, int b) { return a < b ? a * 8 + b : b * 8 + a; };
            std::array<int, 64> next;
            next.fill(-1);
            for (const auto& f : faces)
                for (int t = 0; t < 4; ++t) {
                    if (!in(f[t]) || in(f[(t + 3) % 4])) continue;
                    int e = t;
                    while (in(f[(e + 1) % 4])) e = (e + 1) % 4;
                    const int from = edge(f[(t + 3) % 4], f[t]), to = edge(f[e], f[(e + 1) % 4]);
                    if (next[from] != -1) throw std::logic_error("inconsistent cube face segments");
                    next[from] = to;
                }
            std::array<bool, 64> used{};
            for (int startk = 0; startk < 64; ++startk) {
                if (next[startk] == -1 || used[startk]) continue;
                std::vector<Vec3> loop;
                for (int k = startk; !used[k]; k = next[k]) {
                    if (next[k] == -1) throw std::logic_error("open loop in cube case");
                    used[k] = true;
                    const auto a = corner_position(k / 8), b = corner_position(k % 8);
                    loop.push_back({(a[0] + b[0]) / 2, (a[1] + b[1]) / 2, (a[2] + b[2]) / 2});
                }
                Vec3 c{0, 0, 0};
                for (const auto& v : loop)
                    for (int a = 0; a < 3; ++a) c[a] += v[a] / static_cast<double>(loop.size());
                for (std::size_t n = 0; n < loop.size(); ++n)
                    out[config].triangles.push_back({c, loop[n], loop[(n + 1) % loop.size()]});
            }
        }
        return out;
    }();
    return table;
}

} // namespace detail

struct IndexedMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> faces;

    Triangle triangle(std::size_t f) const {
        return {vertices[faces[f][0]], vertices[faces[f][1]], vertices[faces[f][2]]};
    }
};

/// Mesh in physical coordinates (relative to the grid origin). Vertices are
/// shared between neighboring triangles.
inline IndexedMesh surface_mesh(const RoiMask& roi) {
    const auto& g = roi.geometry;
    Index3 lo{g.dims[0], g.dims[1], g.dims[2]}, hi{-1, -1, -1};
    for (std::size_t n = 0; n < roi.member.size(); ++n)
        if (roi.member[n]) {
            const auto p = g.unravel(n);
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::min(lo[a], p[a]);
                hi[a] = std::max(hi[a], p[a]);
            }
        }
    IndexedMesh mesh;
    if (hi[0] < 0) return mesh;
    const auto& cases = detail::cube_cases();
    std::map<Vec3, std::uint32_t> ids;
    auto vertex = [&](const Vec3& p) {
        const auto [it, fresh] = ids.emplace(p, static_cast<std::uint32_t>(mesh.vertices.size()));
        if (fresh) mesh.vertices.push_back(p);
        return it->second;
    };
    // Cube (x, y, z) spans voxel centers x..x+1 etc. of the box padded by one.
    for (std::int64_t z = lo[2] - 1; z <= hi[2]; ++z)
        for (std::int64_t y = lo[1] - 1; y <= hi[1]; ++y)
            for (std::int64_t x = lo[0] - 1; x <= hi[0]; ++x) {
                int config = 0;
                for (int c = 0; c < 8; ++c)
                    if (roi.contains(x + (c & 1), y + ((c >> 1) & 1), z + ((c >> 2) & 1))) config |= 1 << c;
                for (const auto& t : cases[static_cast<std::size_t>(config)].triangles) {
                    std::array<std::uint32_t, 3> f;
                    for (int v = 0; v < 3; ++v)
                        f[v] = vertex({(static_cast<double>(x) + t[v][0]) * g.spacing[0], (static_cast<double>(y) + t[v][1]) * g.spacing[1],
                                       (static_cast<double>(z) + t[v][2]) * g.spacing[2]});
                    mesh.faces.push_back(f);
                }
            }
    return mesh;
}

/// Taubin lambda/mu smoothing with uniform neighbor weights. Removes the
/// voxel staircase while keeping the enclosed volume nearly unchanged.
inline void smooth_taubin(IndexedMesh& mesh, int iterations, double lambda = 0.5, double mu = -0.53) {
    if (iterations <= 0 || mesh.vertices.empty()) return;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& f : mesh.faces)
        for (int a = 0; a < 3; ++a) {
            edges.emplace_back(f[a], f[(a + 1) % 3]);
            edges.emplace_back(f[(a + 1) % 3], f[a]);
        }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    std::vector<std::size_t> start(mesh.vertices.size() + 1, 0);
    for (const auto& e : edges) ++start[e.first + 1];
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) start[v + 1] += start[v];

    std::vector<Vec3> next(mesh.vertices.size());
    auto step = [&](double w) {
        for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
            Vec3 mean{0, 0, 0};
            for (std::size_t e = start[v]; e < start[v + 1]; ++e)
                for (int a = 0; a < 3; ++a) mean[a] += mesh.vertices[edges[e].second][a];
            const double deg = static_cast<double>(start[v + 1] - start[v]);
            for (int a = 0; a < 3; ++a) next[v][a] = mesh.vertices[v][a] + w * (mean[a] / deg - mesh.vertices[v][a]);
        }
        mesh.vertices.swap(next);
    };
    for (int it = 0; it < iterations; ++it) {
        step(lambda);
        step(mu);
    }
}

inline double triangle_area(const Triangle& t) {
    const Vec3 u{t[1][0] - t[0][0], t[1][1] - t[0][1], t[1][2] - t[0][2]};
    const Vec3 v{t[2][0] - t[0][0], t[2][1] - t[0][1], t[2][2] - t[0][2]};
    const Vec3 c{u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
    return 0.5 * std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
}

/// Signed volume enclosed by a closed mesh (divergence theorem).
inline double mesh_volume(const IndexedMesh& mesh) {
    double v = 0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto t = mesh.triangle(f);
        const auto &a = t[0], &b = t[1], &c = t[2];
        v += a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0]);
    }
    return v / 6.0;
}

inline double mesh_area(const IndexedMesh& mesh) {
    double a = 0;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) a += triangle_area(mesh.triangle(f));
    return a;
}

} // namespace gbmos
