#pragma once

// Synthetic cohorts with a known linear survival link.
//
// Each subject gets
//   - meta.age, a resection status, n_latent standard-normal features
//     latent.01 .. latent.NN (unlinked ones are pure distractors);
//   - optionally a nested-ellipsoid tumor phantom on a fixed grid, whose
//     image features (img.*) are measured from the digitized mask.
// Survival days = intercept + sum(coef * feature) + N(0, noise_sd), floored
// at 1 day.
//
// When class_mix is given the survival class is drawn first: a target day
// count is drawn uniformly inside the class band (kept `class_margin_days`
// away from the thresholds) and the pivot feature (meta.age or a latent) is
// solved so that the noise-free link hits the target exactly. Subjects whose
// pivot would leave its admissible range are redrawn; if that keeps failing
// the mix is unsatisfiable for this link.
//
// Subject i uses the random stream derive_seed(seed, i, attempt), so the
// cohort does not depend on generation order.

#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gbmos/core/error.hpp"
#include "gbmos/core/feature_table.hpp"
#include "gbmos/core/parallel.hpp"
#include "gbmos/core/rng.hpp"
#include "gbmos/imagefeat/imagefeat.hpp"
#include "gbmos/phantoms/phantom.hpp"
#include "gbmos/prognosis/survival.hpp"
#include "gbmos/volumeio/metadata.hpp"

namespace gbmos {

struct LinkSpec {
    double intercept = 0.0;
    std::vector<std::pair<std::string, double>> coefficients;
    double noise_sd = 0.0;
};

struct PhantomGrid {
    Index3 dims{40, 40, 40};
    Vec3 spacing{1.0, 1.0, 1.0};
    double min_radius = 4.0;  // mm, WT major semi-axis range
    double max_radius = 13.0;
};

struct CohortSpec {
    std::size_t n_subjects = 100;
    std::uint64_t seed = 1;
    LinkSpec link;
    std::size_t n_latent = 0;
    std::optional<PhantomGrid> phantom = PhantomGrid{};
    /// Target proportions of (short, intermediate, long).
    std::optional<std::array<double, 3>> class_mix;
    double class_margin_days = 20.0;
    /// Feature solved for when class_mix is set; empty = first linked
    /// meta.age or latent.* term.
    std::string pivot;
    SurvivalThresholds thresholds;
    /// Band limits for drawn targets: short in [min_days, t_lo), long in (t_hi, max_days].
    double min_days = 30.0;
    double max_days = 1200.0;
    /// Proportions of GTR, STR, NA.
    std::array<double, 3> resection_mix{0.5, 0.05, 0.45};
    double min_age = 20.0, max_age = 85.0;
};

struct Cohort {
    FeatureTable features;
    std::vector<SubjectRecord> subjects;
    std::vector<TumorPhantom> tumors; // empty without phantoms
    std::optional<PhantomGrid> grid;
    /// Noise-free link output per subject.
    std::vector<double> link_output;

    Geometry geometry() const {
        if (!grid) throw ParameterError("cohort has no phantoms");
        Geometry g;
        g.dims = grid->dims;
        g.spacing = grid->spacing;
        return g;
    }
};

inline std::string latent_name(std::size_t k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "latent.%02zu", k + 1);
    return buf;
}

/// Seed for the intensity image of subject i.
inline std::uint64_t intensity_seed(std::uint64_t cohort_seed, std::size_t i) {
    return derive_seed(cohort_seed, i, 0x1A7E);
}

namespace detail {

struct DrawnSubject {
    std::vector<double> values; // in cohort feature order
    SubjectRecord record;
    std::optional<TumorPhantom> tumor;
};

inline DrawnSubject draw_subject(const CohortSpec& spec, const std::vector<std::string>& names, std::size_t i,
                                 std::size_t attempt) {
    Rng rng(derive_seed(spec.seed, i, attempt));
    DrawnSubject s;
    s.values.assign(names.size(), 0.0);
    char id[32];
    std::snprintf(id, sizeof id, "SUBJ_%04zu", i + 1);
    s.record.subject_id = id;
    s.record.age = rng.uniform(spec.min_age, spec.max_age);
    const double u = rng.uniform();
    s.record.resection = u < spec.resection_mix[0]                           ? Resection::GTR
                         : u < spec.resection_mix[0] + spec.resection_mix[1] ? Resection::STR
                                                                             : Resection::NA;
    std::size_t col = 0;
    if (spec.phantom) {
        const auto& pg = *spec.phantom;
        TumorPhantom t;
        const double r = rng.uniform(pg.min_radius, pg.max_radius);
        t.wt_axes = {r, r * rng.uniform(0.7, 1.0), r * rng.uniform(0.7, 1.0)};
        t.tc_scale = rng.uniform(0.4, 0.75);
        t.necrosis_scale = rng.uniform(0.3, 0.7);
        for (int a = 0; a < 3; ++a) {
            const double extent = static_cast<double>(pg.dims[a] - 1) * pg.spacing[a];
            const double slack = std::max(0.0, 0.5 * extent - t.wt_axes[a] - pg.spacing[a]);
            t.center[a] = 0.5 * extent + rng.uniform(-slack, slack);
        }
        Geometry g;
        g.dims = pg.dims;
        g.spacing = pg.spacing;
        const auto mask = gen_tumor_mask(g, t);
        const auto img = extract_image_features(mask, s.record).values();
        for (std::size_t c = 0; c + 1 < img.size(); ++c) s.values[col++] = img[c];
        s.tumor = t;
    }
    s.values[col++] = s.record.age;
    for (std::size_t k = 0; k < spec.n_latent; ++k) s.values[col++] = rng.normal();
    return s;
}

inline double link_value(const LinkSpec& link, const std::vector<std::size_t>& cols, const std::vector<double>& v) {
    double out = link.intercept;
    for (std::size_t t = 0; t < cols.size(); ++t) out += link.coefficients[t].second * v[cols[t]];
    return out;
}

} // namespace detail

inline std::vector<std::string> cohort_feature_names(const CohortSpec& spec) {
    std::vector<std::string> names;
    if (spec.phantom) {
        const auto& img = ImageFeatures::names();
        names.insert(names.end(), img.begin(), img.end() - 1); // meta.age goes below
    }
    names.push_back("meta.age");
    for (std::size_t k = 0; k < spec.n_latent; ++k) names.push_back(latent_name(k));
    return names;
}

inline Cohort gen_cohort(const CohortSpec& spec) {
    if (spec.n_subjects == 0) throw ParameterError("cohort needs at least one subject");
    if (!(spec.link.noise_sd >= 0)) throw ParameterError("noise stddev must be non-negative");
    spec.thresholds.validate();
    const auto names = cohort_feature_names(spec);

    std::vector<std::size_t> link_cols;
    for (const auto& [name, coef] : spec.link.coefficients) {
        std::size_t c = 0;
        while (c < names.size() && names[c] != name) ++c;
        if (c == names.size()) throw ParameterError("link references unknown feature '" + name + "'");
        link_cols.push_back(c);
    }

    std::optional<std::size_t> pivot_term;
    std::array<double, 3> cumulative{};
    if (spec.class_mix) {
        const auto& mix = *spec.class_mix;
        double sum = 0;
        for (double p : mix) {
            if (!(p >= 0)) throw ParameterError("class_mix proportions must be non-negative");
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-9) throw ParameterError("class_mix proportions must sum to 1");
        cumulative = {mix[0], mix[0] + mix[1], 1.0};
        for (std::size_t t = 0; t < spec.link.coefficients.size(); ++t) {
            const auto& name = spec.link.coefficients[t].first;
            const bool settable = name == "meta.age" || name.rfind("latent.", 0) == 0;
            if ((spec.pivot.empty() && settable) || name == spec.pivot) {
                pivot_term = t;
                break;
            }
        }
        if (!pivot_term) throw ParameterError("class_mix needs a linked pivot feature (meta.age or latent.*)");
        if (spec.link.coefficients[*pivot_term].second == 0.0) throw ParameterError("pivot coefficient is zero");
        const auto& tr = spec.thresholds;
        const double m = spec.class_margin_days;
        if ((mix[0] > 0 && !(tr.short_below - m > spec.min_days)) || (mix[1] > 0 && !(tr.long_above - m > tr.short_below + m)) ||
            (mix[2] > 0 && !(spec.max_days > tr.long_above + m)))
            throw ParameterError("class_mix unsatisfiable: a requested class band is empty after margins");
    }

    Cohort cohort;
    cohort.features.names = names;
    cohort.features.ids.resize(spec.n_subjects);
    cohort.features.values.resize(spec.n_subjects * names.size());
    cohort.subjects.resize(spec.n_subjects);
    cohort.link_output.resize(spec.n_subjects);
    std::vector<std::optional<TumorPhantom>> tumors(spec.n_subjects);
    cohort.grid = spec.phantom;

    parallel_for(spec.n_subjects, [&](std::size_t i) {
        constexpr std::size_t kMaxAttempts = 500;
        for (std::size_t attempt = 0;; ++attempt) {
            if (attempt == kMaxAttempts)
                throw DataError("class_mix unsatisfiable for this link: subject " + std::to_string(i) +
                                " pivot out of range after " + std::to_string(kMaxAttempts) + " draws");
            auto s = detail::draw_subject(spec, names, i, attempt);
            Rng rng(derive_seed(spec.seed, i, attempt + 0x5EED0000ULL));
            if (pivot_term) {
                const double u = rng.uniform();
                const int cls = u < cumulative[0] ? 0 : u < cumulative[1] ? 1 : 2;
                const auto& tr = spec.thresholds;
                const double m = spec.class_margin_days;
                const std::array<std::pair<double, double>, 3> band{
                    {{spec.min_days, tr.short_below - m}, {tr.short_below + m, tr.long_above - m}, {tr.long_above + m, spec.max_days}}};
                const double target = rng.uniform(band[cls].first, band[cls].second);
                const auto col = link_cols[*pivot_term];
                const double coef = spec.link.coefficients[*pivot_term].second;
                s.values[col] = 0.0;
                const double rest = detail::link_value(spec.link, link_cols, s.values);
                const double solved = (target - rest) / coef;
                const bool is_age = names[col] == "meta.age";
                const bool ok = is_age ? (solved >= 18.0 && solved <= 90.0) : std::fabs(solved) <= 4.0;
                if (!ok) continue;
                s.values[col] = solved;
                if (is_age) s.record.age = solved;
            }
            const double link = detail::link_value(spec.link, link_cols, s.values);
            const double noise = spec.link.noise_sd > 0 ? rng.normal(0.0, spec.link.noise_sd) : 0.0;
            s.record.survival_days = std::max(1.0, link + noise);
            cohort.link_output[i] = link;
            cohort.features.ids[i] = s.record.subject_id;
            std::copy(s.values.begin(), s.values.end(), cohort.features.values.begin() + i * names.size());
            cohort.subjects[i] = std::move(s.record);
            tumors[i] = s.tumor;
            return;
        }
    });
    if (spec.phantom)
        for (auto& t : tumors) cohort.tumors.push_back(*t);
    return cohort;
}

inline LabelMask subject_mask(const Cohort& cohort, std::size_t i) {
    return gen_tumor_mask(cohort.geometry(), cohort.tumors.at(i));
}

} // namespace gbmos
