#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qvfe/csv.hpp"
#include "qvfe/errors.hpp"

namespace qvfe {

/// One table cell. monostate is an empty cell (undefined efficiency, failed row).
using Cell = std::variant<std::monostate, double, long long, std::string>;

inline Cell optional_cell(const std::optional<double>& x) {
    return x ? Cell{*x} : Cell{};
}

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    std::size_t column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (columns[i] == name) {
                return i;
            }
        }
        throw InvalidSpec("no column named '" + name + "'");
    }
};

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(const std::string& s) {
    if (s == "csv") {
        return OutputFormat::csv;
    }
    if (s == "json") {
        return OutputFormat::json;
    }
    throw ConfigError("format: expected 'csv' or 'json', got '" + s + "'");
}

inline std::string format_cell(const Cell& c) {
    struct Visitor {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(double x) const { return csv::format_double(x); }
        std::string operator()(long long x) const { return std::to_string(x); }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, c);
}

inline void write_csv(std::ostream& os, const ResultTable& t) {
    csv::write_row(os, t.columns);
    std::vector<std::string> fields;
    for (const auto& row : t.rows) {
        fields.clear();
        for (const auto& c : row) {
            fields.push_back(format_cell(c));
        }
        csv::write_row(os, fields);
    }
}

/// Array of row objects with keys in column order. Empty cells and non-finite numbers become null.
inline nlohmann::ordered_json to_json(const ResultTable& t) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            const Cell& c = i < row.size() ? row[i] : Cell{};
            if (const auto* d = std::get_if<double>(&c)) {
                obj[t.columns[i]] = std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr);
            } else if (const auto* n = std::get_if<long long>(&c)) {
                obj[t.columns[i]] = *n;
            } else if (const auto* s = std::get_if<std::string>(&c)) {
                obj[t.columns[i]] = *s;
            } else {
                obj[t.columns[i]] = nullptr;
            }
        }
        out.push_back(std::move(obj));
    }
    return out;
}

inline void write_table(std::ostream& os, const ResultTable& t, OutputFormat f) {
    if (f == OutputFormat::csv) {
        write_csv(os, t);
    } else {
        os << to_json(t).dump(2) << '\n';
    }
}

} // namespace qvfe
