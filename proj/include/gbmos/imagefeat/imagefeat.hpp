#pragma once

// Image-based tumor descriptors: per-ROI volume and exposed-face surface
// area, subject age, and the mask summaries (label amounts, WT extent,
// centroids). Computed directly from the label grid, no meshing.

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gbmos/volumeio/metadata.hpp"
#include "gbmos/volumeio/volume.hpp"

namespace gbmos {

/// Voxel count times voxel volume, mm^3.
inline double roi_volume(const RoiMask& roi) {
    return static_cast<double>(roi.count()) * roi.geometry.voxel_volume();
}

/// Sum of the areas of voxel faces that border a non-member voxel or the
/// grid boundary (6-neighborhood), mm^2.
inline double roi_surface_area_facecount(const RoiMask& roi) {
    const auto& g = roi.geometry;
    const std::array<double, 3> face_area{g.spacing[1] * g.spacing[2], g.spacing[0] * g.spacing[2],
                                          g.spacing[0] * g.spacing[1]};
    std::array<std::size_t, 3> exposed{0, 0, 0};
    for (std::int64_t k = 0; k < g.dims[2]; ++k)
        for (std::int64_t j = 0; j < g.dims[1]; ++j)
            for (std::int64_t i = 0; i < g.dims[0]; ++i) {
                if (!roi.member[g.linear(i, j, k)]) continue;
                exposed[0] += !roi.contains(i - 1, j, k) + !roi.contains(i + 1, j, k);
                exposed[1] += !roi.contains(i, j - 1, k) + !roi.contains(i, j + 1, k);
                exposed[2] += !roi.contains(i, j, k - 1) + !roi.contains(i, j, k + 1);
            }
    return static_cast<double>(exposed[0]) * face_area[0] + static_cast<double>(exposed[1]) * face_area[1] +
           static_cast<double>(exposed[2]) * face_area[2];
}

struct ImageFeatures {
    double vol_wt = 0, vol_tc = 0, vol_et = 0;
    double surf_wt = 0, surf_tc = 0, surf_et = 0;
    double age = 0;

    static const std::vector<std::string>& names() {
        static const std::vector<std::string> n{"img.vol_wt",  "img.vol_tc",  "img.vol_et", "img.surf_wt",
                                                "img.surf_tc", "img.surf_et", "meta.age"};
        return n;
    }

    /// Values in names() order.
    std::vector<double> values() const { return {vol_wt, vol_tc, vol_et, surf_wt, surf_tc, surf_et, age}; }
};

inline ImageFeatures extract_image_features(const LabelMask& mask, const SubjectRecord& subject) {
    ImageFeatures f;
    const auto wt = derive_roi(mask, RoiKind::WT);
    const auto tc = derive_roi(mask, RoiKind::TC);
    const auto et = derive_roi(mask, RoiKind::ET);
    f.vol_wt = roi_volume(wt);
    f.vol_tc = roi_volume(tc);
    f.vol_et = roi_volume(et);
    f.surf_wt = roi_surface_area_facecount(wt);
    f.surf_tc = roi_surface_area_facecount(tc);
    f.surf_et = roi_surface_area_facecount(et);
    f.age = subject.age;
    return f;
}

struct MaskSummary {
    double amount_necrotic = 0, amount_edema = 0, amount_enhancing = 0;
    Vec3 extent{0, 0, 0};
    std::optional<Vec3> centroid_wt;
    std::optional<Vec3> centroid_necrosis;

    static const std::vector<std::string>& names() {
        static const std::vector<std::string> n{
            "mask.amount_necrotic", "mask.amount_edema",     "mask.amount_enhancing", "mask.extent_x",
            "mask.extent_y",        "mask.extent_z",         "mask.centroid_wt_x",    "mask.centroid_wt_y",
            "mask.centroid_wt_z",   "mask.centroid_necrosis_x", "mask.centroid_necrosis_y", "mask.centroid_necrosis_z"};
        return n;
    }

    /// Values in names() order; a missing centroid yields NaN entries.
    std::vector<double> values() const {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const Vec3 cw = centroid_wt.value_or(Vec3{nan, nan, nan});
        const Vec3 cn = centroid_necrosis.value_or(Vec3{nan, nan, nan});
        return {amount_necrotic, amount_edema, amount_enhancing, extent[0], extent[1], extent[2],
                cw[0],           cw[1],        cw[2],            cn[0],     cn[1],     cn[2]};
    }
};

namespace detail {

inline std::optional<Vec3> centroid(const RoiMask& roi) {
    const auto& g = roi.geometry;
    std::array<double, 3> sum{0, 0, 0};
    std::size_t count = 0;
    for (std::size_t n = 0; n < roi.member.size(); ++n) {
        if (!roi.member[n]) continue;
        const auto p = g.position(g.unravel(n));
        for (int a = 0; a < 3; ++a) sum[a] += p[a];
        ++count;
    }
    if (count == 0) return std::nullopt;
    return Vec3{sum[0] / count, sum[1] / count, sum[2] / count};
}

} // namespace detail

/// Label amounts (mm^3), WT bounding-box extent and centroids.
/// Extent is (max index - min index + 1) * spacing per axis, so a one-voxel
/// thick ROI has extent equal to the spacing. Empty sets give missing
/// centroids and zero extent.
inline MaskSummary mask_summary(const LabelMask& mask) {
    MaskSummary s;
    s.amount_necrotic = roi_volume(derive_roi(mask, RoiKind::Label1));
    s.amount_edema = roi_volume(derive_roi(mask, RoiKind::Label2));
    s.amount_enhancing = roi_volume(derive_roi(mask, RoiKind::Label4));

    const auto wt = derive_roi(mask, RoiKind::WT);
    const auto& g = mask.geometry;
    Index3 lo{g.dims[0], g.dims[1], g.dims[2]}, hi{-1, -1, -1};
    for (std::size_t n = 0; n < wt.member.size(); ++n) {
        if (!wt.member[n]) continue;
        const auto ijk = g.unravel(n);
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], ijk[a]);
            hi[a] = std::max(hi[a], ijk[a]);
        }
    }
    if (hi[0] >= 0)
        for (int a = 0; a < 3; ++a) s.extent[a] = static_cast<double>(hi[a] - lo[a] + 1) * g.spacing[a];
    s.centroid_wt = detail::centroid(wt);
    s.centroid_necrosis = detail::centroid(derive_roi(mask, RoiKind::Label1));
    return s;
}

} // namespace gbmos
