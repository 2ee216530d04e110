#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gbmos/core/error.hpp"

namespace gbmos {

using Index3 = std::array<std::int64_t, 3>;
using Vec3 = std::array<double, 3>;

/// Grid geometry shared by volumes and masks.
///
/// Voxels are stored i-fastest: linear index = i + nx * (j + ny * k), which is
/// the native NIfTI on-disk order. Physical position of voxel (i, j, k) is
/// origin + (i, j, k) * spacing. qform/sform orientation is ignored; every
/// feature computed by this library aggregates over orientation, so only
/// spacing matters.
struct Geometry {
    Index3 dims{1, 1, 1};
    Vec3 spacing{1.0, 1.0, 1.0};
    Vec3 origin{0.0, 0.0, 0.0};

    std::size_t voxel_count() const { return static_cast<std::size_t>(dims[0] * dims[1] * dims[2]); }

    double voxel_volume() const { return spacing[0] * spacing[1] * spacing[2]; }

    std::size_t linear(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return static_cast<std::size_t>(i + dims[0] * (j + dims[1] * k));
    }

    Index3 unravel(std::size_t idx) const {
        const auto n = static_cast<std::int64_t>(idx);
        return {n % dims[0], (n / dims[0]) % dims[1], n / (dims[0] * dims[1])};
    }

    bool contains(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return i >= 0 && j >= 0 && k >= 0 && i < dims[0] && j < dims[1] && k < dims[2];
    }

    Vec3 position(const Index3& ijk) const {
        return {origin[0] + static_cast<double>(ijk[0]) * spacing[0],
                origin[1] + static_cast<double>(ijk[1]) * spacing[1],
                origin[2] + static_cast<double>(ijk[2]) * spacing[2]};
    }

    void validate() const {
        for (int a = 0; a < 3; ++a) {
            if (dims[a] <= 0) throw ParameterError("grid dimensions must be positive");
            if (!(spacing[a] > 0.0)) throw ParameterError("voxel spacing must be positive");
        }
    }

    bool same_grid(const Geometry& o) const { return dims == o.dims && spacing == o.spacing; }
};

struct VoxelVolume {
    Geometry geometry;
    std::vector<double> data;

    VoxelVolume() = default;
    VoxelVolume(Geometry g, std::vector<double> values) : geometry(g), data(std::move(values)) {
        geometry.validate();
        if (data.size() != geometry.voxel_count()) throw ParameterError("volume data length does not match dims");
    }
    explicit VoxelVolume(Geometry g, double fill = 0.0) : VoxelVolume(g, std::vector<double>(g.voxel_count(), fill)) {}

    double& at(std::int64_t i, std::int64_t j, std::int64_t k) { return data[geometry.linear(i, j, k)]; }
    double at(std::int64_t i, std::int64_t j, std::int64_t k) const { return data[geometry.linear(i, j, k)]; }
};

/// BraTS label vocabulary.
enum class Label : std::uint8_t { Background = 0, Necrotic = 1, Edema = 2, Enhancing = 4 };

inline bool is_valid_label(int v) { return v == 0 || v == 1 || v == 2 || v == 4; }

struct LabelMask {
    Geometry geometry;
    std::vector<std::uint8_t> labels;

    LabelMask() = default;
    LabelMask(Geometry g, std::vector<std::uint8_t> values) : geometry(g), labels(std::move(values)) {
        geometry.validate();
        if (labels.size() != geometry.voxel_count()) throw ParameterError("mask data length does not match dims");
        for (std::size_t n = 0; n < labels.size(); ++n)
            if (!is_valid_label(labels[n]))
                throw DataError("invalid label " + std::to_string(labels[n]) + " at voxel " + std::to_string(n));
    }
    explicit LabelMask(Geometry g) : LabelMask(g, std::vector<std::uint8_t>(g.voxel_count(), 0)) {}

    std::uint8_t at(std::int64_t i, std::int64_t j, std::int64_t k) const { return labels[geometry.linear(i, j, k)]; }
    void set(std::int64_t i, std::int64_t j, std::int64_t k, Label l) {
        labels[geometry.linear(i, j, k)] = static_cast<std::uint8_t>(l);
    }

    std::size_t count(Label l) const {
        std::size_t c = 0;
        for (auto v : labels) c += (v == static_cast<std::uint8_t>(l));
        return c;
    }
};

enum class RoiKind { WT, TC, ET, Label1, Label2, Label4 };

inline std::string_view to_string(RoiKind k) {
    switch (k) {
    case RoiKind::WT: return "WT";
    case RoiKind::TC: return "TC";
    case RoiKind::ET: return "ET";
    case RoiKind::Label1: return "LABEL1";
    case RoiKind::Label2: return "LABEL2";
    case RoiKind::Label4: return "LABEL4";
    }
    return "?";
}

inline RoiKind roi_kind_from_string(std::string_view s) {
    for (auto k : {RoiKind::WT, RoiKind::TC, RoiKind::ET, RoiKind::Label1, RoiKind::Label2, RoiKind::Label4})
        if (to_string(k) == s) return k;
    throw ParameterError("unknown ROI kind '" + std::string(s) + "'");
}

/// Membership rule: WT = {1,2,4}, TC = {1,4}, ET = {4}, LABELn = {n}.
inline bool roi_includes(RoiKind kind, std::uint8_t label) {
    switch (kind) {
    case RoiKind::WT: return label == 1 || label == 2 || label == 4;
    case RoiKind::TC: return label == 1 || label == 4;
    case RoiKind::ET:
    case RoiKind::Label4: return label == 4;
    case RoiKind::Label1: return label == 1;
    case RoiKind::Label2: return label == 2;
    }
    return false;
}

struct RoiMask {
    Geometry geometry;
    std::vector<std::uint8_t> member;
    RoiKind kind = RoiKind::WT;

    bool contains(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return geometry.contains(i, j, k) && member[geometry.linear(i, j, k)] != 0;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto m : member) c += (m != 0);
        return c;
    }

    bool empty() const { return count() == 0; }

    /// Linear indices of member voxels in storage order.
    std::vector<std::size_t> voxels() const {
        std::vector<std::size_t> out;
        for (std::size_t n = 0; n < member.size(); ++n)
            if (member[n]) out.push_back(n);
        return out;
    }
};

inline RoiMask derive_roi(const LabelMask& mask, RoiKind kind) {
    RoiMask roi{mask.geometry, std::vector<std::uint8_t>(mask.labels.size(), 0), kind};
    for (std::size_t n = 0; n < mask.labels.size(); ++n) roi.member[n] = roi_includes(kind, mask.labels[n]) ? 1 : 0;
    return roi;
}

/// Builds an ROI directly from a membership predicate over (i, j, k); handy for tests.
template <typename Pred>
RoiMask make_roi(const Geometry& g, Pred&& inside, RoiKind kind = RoiKind::WT) {
    RoiMask roi{g, std::vector<std::uint8_t>(g.voxel_count(), 0), kind};
    for (std::int64_t k = 0; k < g.dims[2]; ++k)
        for (std::int64_t j = 0; j < g.dims[1]; ++j)
            for (std::int64_t i = 0; i < g.dims[0]; ++i)
                if (inside(i, j, k)) roi.member[g.linear(i, j, k)] = 1;
    return roi;
}

} // namespace gbmos
