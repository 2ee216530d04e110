#pragma once

#include <string>
#include <string_view>

#include "gbmos/core/csv.hpp"
#include "gbmos/core/error.hpp"

namespace gbmos {

/// Days per month used to turn the 10/15-month class boundaries into days
/// (Julian year / 12).
constexpr double kDaysPerMonth = 30.4375;

struct SurvivalThresholds {
    double short_below = 10.0 * kDaysPerMonth; // 304.375
    double long_above = 15.0 * kDaysPerMonth;  // 456.5625

    void validate() const {
        if (!(short_below >= 0.0 && short_below <= long_above))
            throw ParameterError("survival thresholds must satisfy 0 <= t_lo <= t_hi");
    }

    /// "t_lo|t_hi", as recorded in metrics files.
    std::string describe() const { return csv::format_real(short_below) + "|" + csv::format_real(long_above); }
};

enum class SurvivalClass { Short = 0, Intermediate = 1, Long = 2 };

inline std::string_view to_string(SurvivalClass c) {
    switch (c) {
    case SurvivalClass::Short: return "short";
    case SurvivalClass::Intermediate: return "intermediate";
    case SurvivalClass::Long: return "long";
    }
    return "?";
}

/// short iff days < t_lo; long iff days > t_hi; both boundaries themselves
/// are intermediate.
inline SurvivalClass bin_survival(double days, const SurvivalThresholds& t = {}) {
    if (days < t.short_below) return SurvivalClass::Short;
    if (days > t.long_above) return SurvivalClass::Long;
    return SurvivalClass::Intermediate;
}

} // namespace gbmos
