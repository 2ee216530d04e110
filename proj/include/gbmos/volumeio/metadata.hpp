#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gbmos/core/csv.hpp"
#include "gbmos/core/error.hpp"

namespace gbmos {

enum class Resection { GTR, STR, NA };

inline std::string to_string(Resection r) {
    switch (r) {
    case Resection::GTR: return "GTR";
    case Resection::STR: return "STR";
    case Resection::NA: return "NA";
    }
    return "NA";
}

inline Resection parse_resection(const std::string& s) {
    if (s == "GTR") return Resection::GTR;
    if (s == "STR") return Resection::STR;
    return Resection::NA;
}

struct SubjectRecord {
    std::string subject_id;
    double age = 0.0;
    std::optional<double> survival_days;
    Resection resection = Resection::NA;

    void validate() const {
        if (subject_id.empty()) throw DataError("subject record without ID");
        if (!(age > 0.0)) throw DataError("subject '" + subject_id + "': age must be positive");
        if (survival_days && !(*survival_days >= 0.0))
            throw DataError("subject '" + subject_id + "': survival days must be non-negative");
    }
};

/// Reads the subject metadata table: ID, Age, Survival_days,
/// Extent_of_Resection. "Brats20ID" is accepted as an alias for ID. Empty,
/// NA or non-numeric survival (e.g. "ALIVE (361 days later)") is unknown.
inline std::vector<SubjectRecord> read_metadata(const csv::Table& t) {
    std::size_t id_col;
    if (auto c = t.column("ID")) id_col = *c;
    else id_col = t.require_column("Brats20ID");
    const auto age_col = t.require_column("Age");
    const auto surv_col = t.require_column("Survival_days");
    const auto res_col = t.column("Extent_of_Resection");
    std::vector<SubjectRecord> out;
    out.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        SubjectRecord r;
        r.subject_id = row[id_col];
        const auto age = csv::parse_real(row[age_col]);
        if (!age) throw DataError("subject '" + r.subject_id + "': missing age");
        r.age = *age;
        r.survival_days = csv::parse_real(row[surv_col]);
        r.resection = res_col ? parse_resection(row[*res_col]) : Resection::NA;
        r.validate();
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<SubjectRecord> read_metadata(const std::string& path) {
    try {
        return read_metadata(csv::read(path));
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

inline csv::Table metadata_table(const std::vector<SubjectRecord>& subjects) {
    csv::Table t;
    t.header = {"ID", "Age", "Survival_days", "Extent_of_Resection"};
    for (const auto& s : subjects)
        t.rows.push_back({s.subject_id, csv::format_real(s.age),
                          s.survival_days ? csv::format_real(*s.survival_days) : std::string("NA"),
                          to_string(s.resection)});
    return t;
}

} // namespace gbmos
