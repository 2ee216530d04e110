#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace gbmos {

/// Feature name -> value for one family; iteration order is the canonical
/// (ASCII-sorted) name order.
using FeatureMap = std::map<std::string, double>;

namespace detail {

/// -p log2 p with 0 log 0 = 0.
inline double entropy_term(double p) { return p > 0 ? -p * std::log2(p) : 0.0; }

/// The 13 unique 3D neighbor offsets: one of each +/- pair, first nonzero
/// component positive.
inline const std::array<std::array<int, 3>, 13>& directions13() {
    static const auto dirs = [] {
        std::array<std::array<int, 3>, 13> out{};
        std::size_t n = 0;
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int first = dx != 0 ? dx : dy != 0 ? dy : dz;
                    if (first > 0) out[n++] = {dx, dy, dz};
                }
        return out;
    }();
    return dirs;
}

/// The 26 neighbor offsets of the infinity-norm unit ball.
inline const std::array<std::array<int, 3>, 26>& neighbors26() {
    static const auto offs = [] {
        std::array<std::array<int, 3>, 26> out{};
        std::size_t n = 0;
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if (dx || dy || dz) out[n++] = {dx, dy, dz};
        return out;
    }();
    return offs;
}

} // namespace detail
} // namespace gbmos
