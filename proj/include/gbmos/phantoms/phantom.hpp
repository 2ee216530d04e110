#pragma once

// Analytic phantoms. Digitization rule: a voxel belongs to a shape iff its
// center lies inside the shape (no partial volume). For balls this biases
// the count by the usual lattice-point error, a fraction of a percent at
// r = 10 voxels.

#include <cmath>
#include <variant>

#include "gbmos/core/error.hpp"
#include "gbmos/core/rng.hpp"
#include "gbmos/volumeio/volume.hpp"

namespace gbmos {

struct Sphere {
    double radius;
};
/// Semi-axes along x, y, z.
struct Ellipsoid {
    double a, b, c;
};
/// Full edge lengths along x, y, z; the box is half-open, [c - a/2, c + a/2).
struct Cuboid {
    double a, b, c;
};
/// The voxel whose center is nearest to the phantom center.
struct SingleVoxel {};

using Shape = std::variant<Sphere, Ellipsoid, Cuboid, SingleVoxel>;

struct PhantomSpec {
    Shape shape = Sphere{10.0};
    Vec3 center{0, 0, 0}; // mm
    Label label_fill = Label::Enhancing;
    Geometry geometry;
};

namespace detail {

inline Vec3 half_extent(const Shape& s) {
    return std::visit(
        [](const auto& sh) -> Vec3 {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Sphere>) return {sh.radius, sh.radius, sh.radius};
            else if constexpr (std::is_same_v<T, Ellipsoid>) return {sh.a, sh.b, sh.c};
            else if constexpr (std::is_same_v<T, Cuboid>) return {sh.a / 2, sh.b / 2, sh.c / 2};
            else return {0, 0, 0};
        },
        s);
}

inline bool inside(const Shape& s, const Vec3& d) {
    return std::visit(
        [&](const auto& sh) -> bool {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                return d[0] * d[0] + d[1] * d[1] + d[2] * d[2] <= sh.radius * sh.radius;
            } else if constexpr (std::is_same_v<T, Ellipsoid>) {
                const double q = (d[0] / sh.a) * (d[0] / sh.a) + (d[1] / sh.b) * (d[1] / sh.b) + (d[2] / sh.c) * (d[2] / sh.c);
                return q <= 1.0;
            } else if constexpr (std::is_same_v<T, Cuboid>) {
                return d[0] >= -sh.a / 2 && d[0] < sh.a / 2 && d[1] >= -sh.b / 2 && d[1] < sh.b / 2 &&
                       d[2] >= -sh.c / 2 && d[2] < sh.c / 2;
            } else {
                return false;
            }
        },
        s);
}

inline void check_shape(const Shape& s) {
    std::visit(
        [](const auto& sh) {
            using T = std::decay_t<decltype(sh)>;
            if constexpr (std::is_same_v<T, Sphere>) {
                if (!(sh.radius > 0)) throw ParameterError("sphere radius must be positive");
            } else if constexpr (std::is_same_v<T, Ellipsoid> || std::is_same_v<T, Cuboid>) {
                if (!(sh.a > 0 && sh.b > 0 && sh.c > 0)) throw ParameterError("shape extents must be positive");
            }
        },
        s);
}

} // namespace detail

/// Paints `spec` into an existing mask (later paints overwrite earlier ones).
inline void paint(LabelMask& mask, const PhantomSpec& spec) {
    const auto& g = mask.geometry;
    detail::check_shape(spec.shape);
    const Vec3 h = detail::half_extent(spec.shape);
    for (int a = 0; a < 3; ++a) {
        const double lo = g.origin[a] - 0.5 * g.spacing[a];
        const double hi = g.origin[a] + (static_cast<double>(g.dims[a]) - 0.5) * g.spacing[a];
        if (spec.center[a] - h[a] < lo || spec.center[a] + h[a] > hi)
            throw ParameterError("phantom shape exceeds the grid");
    }
    if (std::holds_alternative<SingleVoxel>(spec.shape)) {
        Index3 ijk;
        for (int a = 0; a < 3; ++a)
            ijk[a] = static_cast<std::int64_t>(std::llround((spec.center[a] - g.origin[a]) / g.spacing[a]));
        mask.set(ijk[0], ijk[1], ijk[2], spec.label_fill);
        return;
    }
    // Only scan the bounding box.
    Index3 lo, hi;
    for (int a = 0; a < 3; ++a) {
        lo[a] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((spec.center[a] - h[a] - g.origin[a]) / g.spacing[a])));
        hi[a] = std::min<std::int64_t>(g.dims[a] - 1,
                                       static_cast<std::int64_t>(std::ceil((spec.center[a] + h[a] - g.origin[a]) / g.spacing[a])));
    }
    for (std::int64_t k = lo[2]; k <= hi[2]; ++k)
        for (std::int64_t j = lo[1]; j <= hi[1]; ++j)
            for (std::int64_t i = lo[0]; i <= hi[0]; ++i) {
                const Vec3 p = g.position({i, j, k});
                const Vec3 d{p[0] - spec.center[0], p[1] - spec.center[1], p[2] - spec.center[2]};
                if (detail::inside(spec.shape, d)) mask.set(i, j, k, spec.label_fill);
            }
}

inline LabelMask gen_mask(const PhantomSpec& spec) {
    spec.geometry.validate();
    LabelMask mask(spec.geometry);
    paint(mask, spec);
    return mask;
}

/// Nested ellipsoidal tumor: edema (2) in WT \ TC, enhancing rim (4) in
/// TC \ core, necrotic core (1). TC and core are concentric scaled copies
/// of the WT ellipsoid.
struct TumorPhantom {
    Vec3 center{0, 0, 0};
    Vec3 wt_axes{10, 10, 10};
    double tc_scale = 0.6;
    double necrosis_scale = 0.5; // relative to TC
};

inline LabelMask gen_tumor_mask(const Geometry& g, const TumorPhantom& t) {
    LabelMask mask(g);
    auto layer = [&](double scale, Label l) {
        paint(mask, PhantomSpec{Ellipsoid{t.wt_axes[0] * scale, t.wt_axes[1] * scale, t.wt_axes[2] * scale},
                                t.center, l, g});
    };
    layer(1.0, Label::Edema);
    if (t.tc_scale > 0) layer(t.tc_scale, Label::Enhancing);
    if (t.tc_scale > 0 && t.necrosis_scale > 0) layer(t.tc_scale * t.necrosis_scale, Label::Necrotic);
    return mask;
}

/// Synthetic intensity image for a labeled grid: per-label mean plus
/// Gaussian noise, floored at a small positive value so every voxel counts
/// as brain.
struct IntensityModel {
    double background = 100.0, necrotic = 60.0, edema = 140.0, enhancing = 180.0;
    double noise_sd = 15.0;
};

inline VoxelVolume gen_intensity(const LabelMask& mask, std::uint64_t seed, const IntensityModel& m = {}) {
    Rng rng(seed);
    VoxelVolume vol(mask.geometry, 0.0);
    for (std::size_t n = 0; n < mask.labels.size(); ++n) {
        double mean = m.background;
        switch (mask.labels[n]) {
        case 1: mean = m.necrotic; break;
        case 2: mean = m.edema; break;
        case 4: mean = m.enhancing; break;
        default: break;
        }
        vol.data[n] = std::max(1.0, rng.normal(mean, m.noise_sd));
    }
    return vol;
}

} // namespace gbmos
