#pragma once

// Per-subject feature rows and the named feature sets used by experiments.
//
// A full subject row holds, in order: the six image features and meta.age,
// the twelve mask summary values, then (optionally) the 107 radiomics
// features. Missing centroids are NaN.

#include <string>
#include <vector>

#include "gbmos/core/error.hpp"
#include "gbmos/core/feature_table.hpp"
#include "gbmos/core/log.hpp"
#include "gbmos/core/parallel.hpp"
#include "gbmos/imagefeat/imagefeat.hpp"
#include "gbmos/phantoms/cohort.hpp"
#include "gbmos/radiomics/radiomics.hpp"
#include "gbmos/volumeio/metadata.hpp"

namespace gbmos {

enum class FeatureSet { Image7, Radiomics107, Rfe20, Shape };

inline constexpr FeatureSet kAllFeatureSets[] = {FeatureSet::Image7, FeatureSet::Radiomics107, FeatureSet::Rfe20, FeatureSet::Shape};

inline std::string to_string(FeatureSet s) {
    switch (s) {
    case FeatureSet::Image7: return "image7";
    case FeatureSet::Radiomics107: return "radiomics107";
    case FeatureSet::Rfe20: return "rfe20";
    case FeatureSet::Shape: return "shape";
    }
    return "image7";
}

inline FeatureSet parse_feature_set(const std::string& s) {
    for (auto f : kAllFeatureSets)
        if (to_string(f) == s) return f;
    throw ParameterError("unknown feature set '" + s + "' (image7, radiomics107, rfe20, shape)");
}

inline std::vector<std::string> shape_set_names() {
    const auto& m = MaskSummary::names();
    std::vector<std::string> out(m.begin(), m.begin() + 9); // amounts, extent, WT centroid
    for (const auto& n : radiomics_feature_names())
        if (n.rfind("shape.", 0) == 0) out.push_back(n);
    out.insert(out.end(), m.begin() + 9, m.end()); // necrosis centroid
    out.push_back("meta.age");
    return out;
}

/// Columns a feature set draws from (for rfe20, the candidate pool).
inline std::vector<std::string> feature_set_columns(FeatureSet s) {
    switch (s) {
    case FeatureSet::Image7: return ImageFeatures::names();
    case FeatureSet::Radiomics107:
    case FeatureSet::Rfe20: return radiomics_feature_names();
    case FeatureSet::Shape: return shape_set_names();
    }
    return {};
}

inline std::vector<std::string> subject_feature_names(bool with_radiomics) {
    auto out = ImageFeatures::names();
    const auto& m = MaskSummary::names();
    out.insert(out.end(), m.begin(), m.end());
    if (with_radiomics) {
        const auto& r = radiomics_feature_names();
        out.insert(out.end(), r.begin(), r.end());
    }
    return out;
}

/// One subject row in subject_feature_names() order; `volume` may be null
/// when radiomics are not requested.
inline std::vector<double> subject_features(const LabelMask& mask, const VoxelVolume* volume, const SubjectRecord& subject,
                                            const RadiomicsConfig* radiomics) {
    auto out = extract_image_features(mask, subject).values();
    const auto summary = mask_summary(mask).values();
    out.insert(out.end(), summary.begin(), summary.end());
    if (radiomics) {
        if (!volume) throw ParameterError("radiomics need an intensity volume");
        const auto r = extract_radiomics(*volume, mask, *radiomics);
        out.insert(out.end(), r.values.begin(), r.values.end());
    }
    return out;
}

struct CohortTableResult {
    FeatureTable table;
    std::vector<SubjectRecord> subjects; // rows of `table`
    std::vector<std::string> failures;   // "ID: reason"
};

/// Full feature rows for a synthetic cohort (phantom masks plus seeded
/// intensity images), followed by the cohort's latent columns. Subjects whose
/// extraction fails are skipped and reported.
inline CohortTableResult cohort_feature_table(const Cohort& cohort, std::uint64_t cohort_seed, const RadiomicsConfig* radiomics,
                                              const IntensityModel& intensity = {}) {
    const std::size_t n = cohort.subjects.size();
    std::vector<std::string> latent;
    for (const auto& name : cohort.features.names)
        if (name.rfind("latent.", 0) == 0) latent.push_back(name);
    std::vector<std::vector<double>> rows(n);
    std::vector<std::string> errors(n);
    parallel_for(n, [&](std::size_t i) {
        try {
            const auto mask = subject_mask(cohort, i);
            std::optional<VoxelVolume> vol;
            if (radiomics) vol = gen_intensity(mask, intensity_seed(cohort_seed, i), intensity);
            rows[i] = subject_features(mask, vol ? &*vol : nullptr, cohort.subjects[i], radiomics);
            for (const auto& name : latent) rows[i].push_back(cohort.features.at(i, *cohort.features.column(name)));
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });
    CohortTableResult out;
    out.table.names = subject_feature_names(radiomics != nullptr);
    out.table.names.insert(out.table.names.end(), latent.begin(), latent.end());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& id = cohort.subjects[i].subject_id;
        if (!errors[i].empty()) {
            out.failures.push_back(id + ": " + errors[i]);
            log::warn("subject " + id + " skipped: " + errors[i]);
            continue;
        }
        out.table.add_row(id, rows[i]);
        out.subjects.push_back(cohort.subjects[i]);
    }
    return out;
}

} // namespace gbmos
