#pragma once

// The 107-feature radiomics vector: 14 shape, 18 first-order, 24 GLCM,
// 16 GLRLM, 16 GLSZM, 14 GLDM and 5 NGTDM features. Names are
// "<family>.<Feature>", ordered by family and then by feature name.

#include <functional>
#include <string>
#include <vector>

#include "gbmos/core/error.hpp"
#include "gbmos/radiomics/discretize.hpp"
#include "gbmos/radiomics/first_order.hpp"
#include "gbmos/radiomics/glcm.hpp"
#include "gbmos/radiomics/gldm.hpp"
#include "gbmos/radiomics/glrlm.hpp"
#include "gbmos/radiomics/glszm.hpp"
#include "gbmos/radiomics/ngtdm.hpp"
#include "gbmos/radiomics/shape.hpp"

namespace gbmos {

constexpr std::size_t kRadiomicsFeatureCount = 107;
inline constexpr const char* kRadiomicsManifestVersion = "radiomics_features_v1";

struct RadiomicsConfig {
    RoiKind roi_kind = RoiKind::WT;
    Binning binning;
    /// MRI channel whose intensities feed first-order and texture features.
    std::string channel;
    int gldm_alpha = 0;
    ShapeOptions shape;
};

struct RadiomicsVector {
    std::vector<std::string> names;
    std::vector<double> values;
    // provenance
    RoiKind roi_kind = RoiKind::WT;
    std::string channel;
    std::string binning;
    std::string aggregation = "per-direction mean over 13 directions";
};

namespace detail {

inline void append_family(RadiomicsVector& out, const std::string& family, const std::function<FeatureMap()>& compute) {
    FeatureMap f;
    try {
        f = compute();
    } catch (const DataError& e) {
        throw DataError(family + ": " + e.what());
    } catch (const ParameterError& e) {
        throw ParameterError(family + ": " + e.what());
    }
    for (const auto& [name, v] : f) {
        out.names.push_back(family + "." + name);
        out.values.push_back(v);
    }
}

} // namespace detail

inline RadiomicsVector extract_radiomics(const VoxelVolume& vol, const RoiMask& roi, const RadiomicsConfig& cfg) {
    if (!vol.geometry.same_grid(roi.geometry)) throw ParameterError("volume and mask grids differ");
    if (roi.empty()) throw DataError("empty ROI (" + std::string(to_string(cfg.roi_kind)) + ")");
    const auto disc = discretize(vol, roi, cfg.binning);
    RadiomicsVector out;
    out.roi_kind = cfg.roi_kind;
    out.channel = cfg.channel;
    out.binning = cfg.binning.describe();
    detail::append_family(out, "shape", [&] { return shape_features(roi, cfg.shape).to_map(); });
    detail::append_family(out, "firstorder", [&] { return first_order_features(vol, roi, disc); });
    detail::append_family(out, "glcm", [&] { return glcm_features(disc); });
    detail::append_family(out, "glrlm", [&] { return glrlm_features(disc); });
    detail::append_family(out, "glszm", [&] { return glszm_features(disc); });
    detail::append_family(out, "gldm", [&] { return gldm_features(disc, cfg.gldm_alpha); });
    detail::append_family(out, "ngtdm", [&] { return ngtdm_features(disc); });
    if (out.names.size() != kRadiomicsFeatureCount) throw Error("radiomics vector has wrong arity");
    return out;
}

inline RadiomicsVector extract_radiomics(const VoxelVolume& vol, const LabelMask& mask, const RadiomicsConfig& cfg) {
    if (!vol.geometry.same_grid(mask.geometry)) throw ParameterError("volume and mask grids differ");
    return extract_radiomics(vol, derive_roi(mask, cfg.roi_kind), cfg);
}

/// Canonical feature names, in vector order.
inline const std::vector<std::string>& radiomics_feature_names() {
    static const auto names = [] {
        Geometry g;
        g.dims = {3, 3, 3};
        VoxelVolume vol(g, 0.0);
        for (std::size_t n = 0; n < vol.data.size(); ++n) vol.data[n] = static_cast<double>(n % 5);
        const auto roi = make_roi(g, [](auto, auto, auto) { return true; });
        return extract_radiomics(vol, roi, RadiomicsConfig{}).names;
    }();
    return names;
}

} // namespace gbmos
