#pragma once

// Shape descriptors of a binary ROI.
//
// Volume and surface come from the marching-cubes mesh (Taubin-smoothed by
// default, see mesh.hpp). ROIs whose voxel
// centers are all coplanar (fewer than 4 non-coplanar voxels) have no
// meaningful mesh; they report the voxel-count volume and the exposed-face
// surface instead. Axis lengths are 4 sqrt(lambda) of the population
// covariance of physical voxel centers; elongation and flatness are 1 when
// the largest eigenvalue is 0. Diameters are the largest distances between
// centers of surface voxels (voxels with a 6-neighbor outside the ROI); the
// 2D variants restrict to pairs in the same slice (k), column (j) or row (i).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "gbmos/core/error.hpp"
#include "gbmos/imagefeat/imagefeat.hpp"
#include "gbmos/radiomics/features.hpp"
#include "gbmos/radiomics/mesh.hpp"

namespace gbmos {

struct ShapeDescriptors {
    double mesh_volume = 0, voxel_volume = 0, surface_area = 0, surface_volume_ratio = 0, sphericity = 0;
    double major_axis = 0, minor_axis = 0, least_axis = 0, elongation = 0, flatness = 0;
    double max_2d_slice = 0, max_2d_row = 0, max_2d_column = 0, max_3d = 0;
    bool degenerate = false;

    FeatureMap to_map() const {
        return {{"Elongation", elongation},
                {"Flatness", flatness},
                {"LeastAxisLength", least_axis},
                {"MajorAxisLength", major_axis},
                {"Maximum2DDiameterColumn", max_2d_column},
                {"Maximum2DDiameterRow", max_2d_row},
                {"Maximum2DDiameterSlice", max_2d_slice},
                {"Maximum3DDiameter", max_3d},
                {"MeshVolume", mesh_volume},
                {"MinorAxisLength", minor_axis},
                {"Sphericity", sphericity},
                {"SurfaceArea", surface_area},
                {"SurfaceVolumeRatio", surface_volume_ratio},
                {"VoxelVolume", voxel_volume}};
    }
};

/// True when all member voxel centers lie in one plane (exact integer test).
inline bool roi_is_coplanar(const RoiMask& roi) {
    const auto vox = roi.voxels();
    if (vox.size() < 4) return true;
    const auto& g = roi.geometry;
    const auto p0 = g.unravel(vox[0]);
    auto diff = [&](std::size_t n) {
        const auto p = g.unravel(n);
        return Index3{p[0] - p0[0], p[1] - p0[1], p[2] - p0[2]};
    };
    auto cross = [](const Index3& a, const Index3& b) {
        return Index3{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
    };
    const Index3 u = diff(vox[1]);
    Index3 normal{0, 0, 0};
    std::size_t n = 2;
    for (; n < vox.size(); ++n) {
        normal = cross(u, diff(vox[n]));
        if (normal != Index3{0, 0, 0}) break;
    }
    if (n == vox.size()) return true; // collinear
    for (std::size_t m = n + 1; m < vox.size(); ++m) {
        const auto w = diff(vox[m]);
        if (normal[0] * w[0] + normal[1] * w[1] + normal[2] * w[2] != 0) return false;
    }
    return true;
}

struct ShapeOptions {
    /// Taubin smoothing rounds applied to the mesh; 0 keeps the raw
    /// marching-cubes surface.
    int smoothing_iterations = 20;
};

inline ShapeDescriptors shape_features(const RoiMask& roi, const ShapeOptions& opt = {}) {
    const auto& g = roi.geometry;
    const auto vox = roi.voxels();
    if (vox.empty()) throw DataError("empty ROI");
    ShapeDescriptors s;
    s.voxel_volume = roi_volume(roi);
    s.degenerate = roi_is_coplanar(roi);
    if (s.degenerate) {
        s.mesh_volume = s.voxel_volume;
        s.surface_area = roi_surface_area_facecount(roi);
    } else {
        auto mesh = surface_mesh(roi);
        smooth_taubin(mesh, opt.smoothing_iterations);
        s.mesh_volume = mesh_volume(mesh);
        s.surface_area = mesh_area(mesh);
    }
    s.surface_volume_ratio = s.surface_area / s.mesh_volume;
    s.sphericity = std::cbrt(std::numbers::pi) * std::pow(6.0 * s.mesh_volume, 2.0 / 3.0) / s.surface_area;

    // Principal axes.
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(vox.size());
    for (auto n : vox) {
        const auto p = g.position(g.unravel(n));
        pts.emplace_back(p[0], p[1], p[2]);
        mean += pts.back();
    }
    mean /= static_cast<double>(pts.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
    cov /= static_cast<double>(pts.size());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov, Eigen::EigenvaluesOnly);
    const double l1 = std::max(0.0, es.eigenvalues()(2)), l2 = std::max(0.0, es.eigenvalues()(1)),
                 l3 = std::max(0.0, es.eigenvalues()(0));
    s.major_axis = 4 * std::sqrt(l1);
    s.minor_axis = 4 * std::sqrt(l2);
    s.least_axis = 4 * std::sqrt(l3);
    s.elongation = l1 > 0 ? std::sqrt(l2 / l1) : 1.0;
    s.flatness = l1 > 0 ? std::sqrt(l3 / l1) : 1.0;

    // Diameters over surface voxels.
    std::vector<Index3> surf;
    for (auto n : vox) {
        const auto p = g.unravel(n);
        if (!roi.contains(p[0] - 1, p[1], p[2]) || !roi.contains(p[0] + 1, p[1], p[2]) || !roi.contains(p[0], p[1] - 1, p[2]) ||
            !roi.contains(p[0], p[1] + 1, p[2]) || !roi.contains(p[0], p[1], p[2] - 1) || !roi.contains(p[0], p[1], p[2] + 1))
            surf.push_back(p);
    }
    double d3 = 0, dk = 0, dj = 0, di = 0;
    for (std::size_t a = 0; a < surf.size(); ++a)
        for (std::size_t b = a + 1; b < surf.size(); ++b) {
            const double dx = static_cast<double>(surf[a][0] - surf[b][0]) * g.spacing[0];
            const double dy = static_cast<double>(surf[a][1] - surf[b][1]) * g.spacing[1];
            const double dz = static_cast<double>(surf[a][2] - surf[b][2]) * g.spacing[2];
            const double d2 = dx * dx + dy * dy + dz * dz;
            d3 = std::max(d3, d2);
            if (surf[a][2] == surf[b][2]) dk = std::max(dk, d2);
            if (surf[a][1] == surf[b][1]) dj = std::max(dj, d2);
            if (surf[a][0] == surf[b][0]) di = std::max(di, d2);
        }
    s.max_3d = std::sqrt(d3);
    s.max_2d_slice = std::sqrt(dk);
    s.max_2d_column = std::sqrt(dj);
    s.max_2d_row = std::sqrt(di);
    return s;
}

} // namespace gbmos
