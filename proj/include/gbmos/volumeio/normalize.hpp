#pragma once

#include <vector>

#include "gbmos/core/error.hpp"
#include "gbmos/core/stats.hpp"
#include "gbmos/volumeio/volume.hpp"

namespace gbmos {

/// Clips brain voxels to the [clip_lo, clip_hi] percentile band and maps the
/// band affinely onto [0, 1]; non-brain voxels are set to 0.
///
/// Percentiles use linear interpolation between closest ranks over the brain
/// voxels (see stats::percentile_sorted). `brain` has one entry per voxel;
/// nonzero marks brain.
inline VoxelVolume normalize_intensity(const VoxelVolume& vol, double clip_lo, double clip_hi,
                                       const std::vector<std::uint8_t>& brain) {
    if (!(clip_lo >= 0.0 && clip_lo < clip_hi && clip_hi <= 100.0))
        throw ParameterError("clip percentiles must satisfy 0 <= lo < hi <= 100");
    if (brain.size() != vol.data.size()) throw ParameterError("brain mask size does not match volume");
    std::vector<double> values;
    for (std::size_t n = 0; n < vol.data.size(); ++n)
        if (brain[n]) values.push_back(vol.data[n]);
    if (values.empty()) throw DataError("cannot normalize: volume has no brain voxels");
    std::sort(values.begin(), values.end());
    const double lo = stats::percentile_sorted(values, clip_lo);
    const double hi = stats::percentile_sorted(values, clip_hi);
    if (!(hi > lo)) throw DataError("cannot normalize: intensity band is constant");

    VoxelVolume out(vol.geometry, 0.0);
    const double width = hi - lo;
    for (std::size_t n = 0; n < vol.data.size(); ++n) {
        if (!brain[n]) continue;
        const double x = std::clamp(vol.data[n], lo, hi);
        out.data[n] = (x - lo) / width;
    }
    return out;
}

/// Same, with the brain defined as the nonzero voxels of `vol` (skull-stripped
/// input). Note the band minimum maps to 0, so re-applying this overload to
/// its own output treats those voxels as background; pass the original brain
/// mask explicitly when chaining.
inline VoxelVolume normalize_intensity(const VoxelVolume& vol, double clip_lo, double clip_hi) {
    std::vector<std::uint8_t> brain(vol.data.size());
    for (std::size_t n = 0; n < vol.data.size(); ++n) brain[n] = vol.data[n] != 0.0;
    return normalize_intensity(vol, clip_lo, clip_hi, brain);
}

} // namespace gbmos
