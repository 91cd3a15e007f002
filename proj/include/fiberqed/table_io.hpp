#pragma once

// Result tables: CSV with a `#` metadata header, or a JSON mirror. Numbers
// are printed with %.17g so equal inputs give byte-identical files.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "fiberqed/errors.hpp"

namespace fiberqed {

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::string name;  // file stem
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size())
            throw std::logic_error("table " + name + ": row has " + std::to_string(row.size()) + " cells, expected " +
                                   std::to_string(columns.size()));
        rows.push_back(std::move(row));
    }
};

namespace table_detail {

inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

inline std::string cell_text(const Cell& c) {
    if (auto d = std::get_if<double>(&c)) return format_number(*d);
    if (auto i = std::get_if<long long>(&c)) return std::to_string(*i);
    return csv_escape(std::get<std::string>(c));
}

inline nlohmann::ordered_json cell_json(const Cell& c) {
    if (auto d = std::get_if<double>(&c)) {
        if (!std::isfinite(*d)) return format_number(*d);
        return *d;
    }
    if (auto i = std::get_if<long long>(&c)) return *i;
    return std::get<std::string>(c);
}

}  // namespace table_detail

inline std::string to_csv(const Table& t) {
    std::string s;
    for (const auto& [k, v] : t.metadata) {
        std::string line = v;
        for (auto& c : line)
            if (c == '\n') c = ' ';
        s += "# " + k + ": " + line + "\n";
    }
    for (size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + table_detail::csv_escape(t.columns[i]);
    s += "\n";
    for (const auto& row : t.rows) {
        for (size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + table_detail::cell_text(row[i]);
        s += "\n";
    }
    return s;
}

inline nlohmann::ordered_json to_json(const Table& t) {
    nlohmann::ordered_json j;
    j["name"] = t.name;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.metadata) meta[k] = v;
    j["metadata"] = meta;
    j["columns"] = t.columns;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::array();
        for (const auto& c : row) r.push_back(table_detail::cell_json(c));
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j;
}

/// Files written by one command. Each file goes to a temporary name first
/// and is renamed into place; if the command fails, discard() removes
/// everything written so far.
class OutputSet {
public:
    OutputSet(std::filesystem::path dir, std::string format) : dir_(std::move(dir)), format_(std::move(format)) {
        if (format_ != "csv" && format_ != "json") throw ConfigError("output format must be csv or json");
    }
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;
    ~OutputSet() {
        if (!committed_) discard();
    }

    std::filesystem::path write(const Table& t) {
        const std::string body = format_ == "csv" ? to_csv(t) : to_json(t).dump(1) + "\n";
        return write_text(t.name + "." + format_, body);
    }

    std::filesystem::path write_text(const std::string& filename, const std::string& body) {
        std::filesystem::create_directories(dir_);
        const auto path = dir_ / filename;
        const auto tmp = dir_ / (filename + ".partial");
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f) throw std::runtime_error("cannot write " + tmp.string());
            f << body;
            if (!f) throw std::runtime_error("write failed for " + tmp.string());
        }
        std::filesystem::rename(tmp, path);
        written_.push_back(path);
        return path;
    }

    void commit() { committed_ = true; }

    void discard() noexcept {
        std::error_code ec;
        for (const auto& p : written_) std::filesystem::remove(p, ec);
        written_.clear();
    }

    const std::vector<std::filesystem::path>& files() const { return written_; }
    const std::filesystem::path& dir() const { return dir_; }
    const std::string& format() const { return format_; }

private:
    std::filesystem::path dir_;
    std::string format_;
    std::vector<std::filesystem::path> written_;
    bool committed_ = false;
};

}  // namespace fiberqed
