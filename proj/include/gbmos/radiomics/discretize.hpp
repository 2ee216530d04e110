#pragma once

// Gray-level discretization of ROI intensities.
//
//   fixed_bin_count(k): level = floor(k * (x - min) / (max - min)) + 1, the
//                       ROI maximum lands in level k. A constant ROI maps to
//                       level 1 with Ng = 1.
//   fixed_bin_width(w): level = floor((x - min) / w) + 1.
//
// Ng is the highest level present. The result is cropped to the ROI bounding
// box; level 0 marks voxels outside the ROI.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "gbmos/core/error.hpp"
#include "gbmos/volumeio/volume.hpp"

namespace gbmos {

struct Binning {
    enum class Mode { FixedBinCount, FixedBinWidth };
    Mode mode = Mode::FixedBinCount;
    double value = 32.0;

    static Binning count(int k) { return {Mode::FixedBinCount, static_cast<double>(k)}; }
    static Binning width(double w) { return {Mode::FixedBinWidth, w}; }

    void validate() const {
        if (mode == Mode::FixedBinCount) {
            if (!(value >= 2.0) || value != std::floor(value)) throw ParameterError("bin count must be an integer >= 2");
        } else if (!(value > 0.0)) {
            throw ParameterError("bin width must be positive");
        }
    }

    std::string describe() const {
        char buf[64];
        if (mode == Mode::FixedBinCount) std::snprintf(buf, sizeof buf, "bin_count:%d", static_cast<int>(value));
        else std::snprintf(buf, sizeof buf, "bin_width:%.12g", value);
        return buf;
    }
};

/// Parses "bin_count:32" / "bin_width:25".
inline Binning parse_binning(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ParameterError("binning must look like bin_count:K or bin_width:W");
    const auto kind = s.substr(0, colon);
    double v = 0;
    try {
        v = std::stod(s.substr(colon + 1));
    } catch (const std::exception&) {
        throw ParameterError("bad binning value in '" + s + "'");
    }
    Binning b;
    if (kind == "bin_count") b = {Binning::Mode::FixedBinCount, v};
    else if (kind == "bin_width") b = {Binning::Mode::FixedBinWidth, v};
    else throw ParameterError("unknown binning '" + kind + "'");
    b.validate();
    return b;
}

struct DiscretizedRoi {
    Index3 dims{0, 0, 0};   // bounding box
    Index3 offset{0, 0, 0}; // bounding box corner in the source grid
    Vec3 spacing{1, 1, 1};
    std::vector<int> levels;
    int ng = 0;
    std::size_t count = 0;
    Binning binning;
    double min_value = 0, max_value = 0;

    bool inside(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return i >= 0 && j >= 0 && k >= 0 && i < dims[0] && j < dims[1] && k < dims[2];
    }
    std::size_t linear(std::int64_t i, std::int64_t j, std::int64_t k) const {
        return static_cast<std::size_t>(i + dims[0] * (j + dims[1] * k));
    }
    /// Level at (i, j, k) in box coordinates, 0 outside the ROI or the box.
    int at(std::int64_t i, std::int64_t j, std::int64_t k) const { return inside(i, j, k) ? levels[linear(i, j, k)] : 0; }

    /// Histogram of levels 1..ng (index 0 unused).
    std::vector<std::size_t> histogram() const {
        std::vector<std::size_t> h(static_cast<std::size_t>(ng) + 1, 0);
        for (int l : levels)
            if (l > 0) ++h[static_cast<std::size_t>(l)];
        return h;
    }
};

/// Wraps an explicit level grid (0 = outside). Used by tests and oracles.
inline DiscretizedRoi discretized_from_levels(Index3 dims, std::vector<int> levels, Vec3 spacing = {1, 1, 1}) {
    if (levels.size() != static_cast<std::size_t>(dims[0] * dims[1] * dims[2]))
        throw ParameterError("level grid size does not match dims");
    DiscretizedRoi d;
    d.dims = dims;
    d.spacing = spacing;
    for (int l : levels) {
        if (l < 0) throw ParameterError("levels must be non-negative");
        d.ng = std::max(d.ng, l);
        d.count += (l > 0);
    }
    if (d.count == 0) throw DataError("empty ROI");
    d.levels = std::move(levels);
    d.min_value = 1;
    d.max_value = d.ng;
    return d;
}

inline DiscretizedRoi discretize(const VoxelVolume& vol, const RoiMask& roi, const Binning& binning = {}) {
    if (!vol.geometry.same_grid(roi.geometry)) throw ParameterError("volume and ROI grids differ");
    binning.validate();
    const auto& g = roi.geometry;
    Index3 lo{g.dims[0], g.dims[1], g.dims[2]}, hi{-1, -1, -1};
    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
    std::size_t n = 0;
    for (std::size_t idx = 0; idx < roi.member.size(); ++idx) {
        if (!roi.member[idx]) continue;
        const auto p = g.unravel(idx);
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
        const double x = vol.data[idx];
        if (!std::isfinite(x)) throw DataError("non-finite intensity inside ROI");
        vmin = std::min(vmin, x);
        vmax = std::max(vmax, x);
        ++n;
    }
    if (n == 0) throw DataError("empty ROI");

    DiscretizedRoi d;
    d.dims = {hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1};
    d.offset = lo;
    d.spacing = g.spacing;
    d.levels.assign(static_cast<std::size_t>(d.dims[0] * d.dims[1] * d.dims[2]), 0);
    d.count = n;
    d.binning = binning;
    d.min_value = vmin;
    d.max_value = vmax;
    const double range = vmax - vmin;
    const int k = static_cast<int>(binning.value);
    for (std::int64_t z = 0; z < d.dims[2]; ++z)
        for (std::int64_t y = 0; y < d.dims[1]; ++y)
            for (std::int64_t x = 0; x < d.dims[0]; ++x) {
                const auto src = g.linear(x + lo[0], y + lo[1], z + lo[2]);
                if (!roi.member[src]) continue;
                const double v = vol.data[src] - vmin;
                int level;
                if (binning.mode == Binning::Mode::FixedBinCount) {
                    level = range > 0 ? static_cast<int>(std::floor(k * v / range)) + 1 : 1;
                    level = std::min(level, k);
                } else {
                    const double q = std::floor(v / binning.value);
                    if (q >= static_cast<double>(std::numeric_limits<int>::max() - 1))
                        throw ParameterError("bin width too small for the intensity range");
                    level = static_cast<int>(q) + 1;
                }
                d.levels[d.linear(x, y, z)] = level;
                d.ng = std::max(d.ng, level);
            }
    return d;
}

} // namespace gbmos
