#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gbmos/core/csv.hpp"
#include "gbmos/core/error.hpp"

namespace gbmos {

/// Subjects x named features, row-major. Missing values are NaN.
/// CSV form: first column "ID", then one column per feature name.
struct FeatureTable {
    std::vector<std::string> ids;
    std::vector<std::string> names;
    std::vector<double> values;

    std::size_t rows() const { return ids.size(); }
    std::size_t cols() const { return names.size(); }

    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
    double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }

    std::span<const double> row(std::size_t r) const { return {values.data() + r * cols(), cols()}; }

    std::optional<std::size_t> column(const std::string& name) const {
        for (std::size_t c = 0; c < names.size(); ++c)
            if (names[c] == name) return c;
        return std::nullopt;
    }

    std::vector<double> column_values(std::size_t c) const {
        std::vector<double> out(rows());
        for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
        return out;
    }

    void add_row(std::string id, std::span<const double> v) {
        if (v.size() != cols()) throw ParameterError("feature row has wrong width");
        ids.push_back(std::move(id));
        values.insert(values.end(), v.begin(), v.end());
    }

    /// Column subset in the order given; unknown names are an error.
    FeatureTable select(const std::vector<std::string>& wanted) const {
        std::vector<std::size_t> idx;
        for (const auto& w : wanted) {
            auto c = column(w);
            if (!c) throw DataError("feature '" + w + "' not present in table");
            idx.push_back(*c);
        }
        FeatureTable out;
        out.ids = ids;
        out.names = wanted;
        out.values.reserve(rows() * idx.size());
        for (std::size_t r = 0; r < rows(); ++r)
            for (auto c : idx) out.values.push_back(at(r, c));
        return out;
    }

    /// Row subset in the order given.
    FeatureTable select_rows(const std::vector<std::size_t>& rs) const {
        FeatureTable out;
        out.names = names;
        for (auto r : rs) out.add_row(ids[r], row(r));
        return out;
    }

    std::optional<std::size_t> row_of(const std::string& id) const {
        for (std::size_t r = 0; r < ids.size(); ++r)
            if (ids[r] == id) return r;
        return std::nullopt;
    }

    csv::Table to_csv() const {
        csv::Table t;
        t.header.push_back("ID");
        t.header.insert(t.header.end(), names.begin(), names.end());
        for (std::size_t r = 0; r < rows(); ++r) {
            std::vector<std::string> line{ids[r]};
            for (std::size_t c = 0; c < cols(); ++c) line.push_back(csv::format_real(at(r, c)));
            t.rows.push_back(std::move(line));
        }
        return t;
    }

    static FeatureTable from_csv(const csv::Table& t) {
        if (t.header.empty() || t.header[0] != "ID") throw DataError("feature table must start with an ID column");
        FeatureTable f;
        f.names.assign(t.header.begin() + 1, t.header.end());
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (const auto& line : t.rows) {
            f.ids.push_back(line[0]);
            for (std::size_t c = 1; c < line.size(); ++c) {
                auto v = csv::parse_real(line[c]);
                if (!v && !csv::is_missing(line[c]))
                    throw DataError("non-numeric value '" + line[c] + "' in column '" + t.header[c] + "'");
                f.values.push_back(v.value_or(nan));
            }
        }
        return f;
    }

    void write(const std::string& path) const { csv::write(path, to_csv()); }
    static FeatureTable read(const std::string& path) { return from_csv(csv::read(path)); }
};

} // namespace gbmos
