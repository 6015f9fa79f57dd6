#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qvfe/errors.hpp"
#include "qvfe/table.hpp"

#ifndef QVFE_VERSION
#define QVFE_VERSION "0.0.0"
#endif

namespace qvfe {

inline constexpr const char* kVersion = QVFE_VERSION;

/// Sidecar written next to every output file: <file>.manifest.json.
struct Manifest {
    std::string kind;  // "sweep", "preset:fig3", "two-qubit", ...
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    std::vector<std::string> files;
    std::size_t rows = 0;
    double runtime_seconds = 0.0;

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["kind"] = kind;
        j["version"] = kVersion;
        j["parameters"] = parameters;
        j["files"] = files;
        j["rows"] = rows;
        j["runtime_seconds"] = runtime_seconds;
        return j;
    }
};

inline std::filesystem::path manifest_path(const std::filesystem::path& data) {
    return data.string() + ".manifest.json";
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << text;
    out.close();
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

inline void write_manifest(const std::filesystem::path& data, const Manifest& m) {
    write_text_file(manifest_path(data), m.to_json().dump(2) + "\n");
}

inline std::string render_table(const ResultTable& t, OutputFormat f) {
    std::ostringstream os;
    write_table(os, t, f);
    return os.str();
}

/// Writes the table and its manifest; the manifest lists the file and the row count.
inline void write_table_file(const std::filesystem::path& path, const ResultTable& t, OutputFormat f, Manifest m) {
    write_text_file(path, render_table(t, f));
    m.files = {path.filename().string()};
    m.rows = t.rows.size();
    write_manifest(path, m);
}

} // namespace qvfe
