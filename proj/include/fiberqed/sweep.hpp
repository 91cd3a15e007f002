#pragma once

// Two-axis parameter sweeps. Grid points are evaluated in parallel and
// stored by grid index, so the table never depends on scheduling. A failing
// point is recorded in its status column and the sweep continues. With a
// checkpoint file, finished points are appended as they complete and
// skipped when the sweep is run again.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fiberqed/parallel.hpp"
#include "fiberqed/table_io.hpp"

namespace fiberqed {

inline std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw DomainError("linspace: need at least one point");
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
    return v;
}

/// Thrown by a sweep point that is outside the valid region; the message
/// becomes the point status.
class SkipPoint : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridAxis {
    std::string name;
    std::vector<double> values;
};

struct PointResult {
    std::vector<double> values;
    std::string status = "ok";
};

struct SweepSpec {
    std::string name;
    GridAxis x, y;
    std::vector<std::string> outputs;
    int threads = 0;
    std::optional<std::filesystem::path> checkpoint;
    bool resume = false;
    std::string tag;  // identifies the inputs; a checkpoint with another tag is discarded
};

struct SweepResult {
    Table table;
    int failed = 0;   // status "error: ..."
    int skipped = 0;  // other non-ok status (SkipPoint)
    int resumed = 0;
};

namespace sweep_detail {

inline std::string checkpoint_line(long long index, const PointResult& r) {
    std::string s = std::to_string(index);
    for (double v : r.values) s += "," + table_detail::format_number(v);
    return s + "," + r.status + "\n";
}

inline std::string checkpoint_header(const std::string& tag) {
    std::string t = tag;
    for (auto& c : t)
        if (c == '\n') c = ' ';
    return "# " + t;
}

// Lines that do not parse (for example a write cut short) are ignored.
inline std::vector<std::optional<PointResult>> load_checkpoint(const std::filesystem::path& path,
                                                               const std::string& tag, size_t points, size_t outputs) {
    std::vector<std::optional<PointResult>> done(points);
    std::ifstream f(path);
    std::string line;
    if (!std::getline(f, line) || line != checkpoint_header(tag)) return done;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> parts;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        if (parts.size() != outputs + 2) continue;
        try {
            const long long idx = std::stoll(parts[0]);
            if (idx < 0 || static_cast<size_t>(idx) >= points) continue;
            PointResult r;
            for (size_t i = 0; i < outputs; ++i) {
                const std::string& t = parts[1 + i];
                r.values.push_back(t == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(t));
            }
            r.status = parts.back();
            done[idx] = std::move(r);
        } catch (...) {
        }
    }
    return done;
}

}  // namespace sweep_detail

/// Evaluate fn(ix, iy) on the grid x-major. fn returns one value per output
/// column; exceptions become a status message with NaN values.
inline SweepResult run_sweep(const SweepSpec& spec, const std::function<std::vector<double>(int, int)>& fn) {
    const size_t nx = spec.x.values.size(), ny = spec.y.values.size();
    const size_t points = nx * ny;
    const size_t nout = spec.outputs.size();
    std::vector<std::optional<PointResult>> results(points);
    SweepResult out;

    std::ofstream ck;
    std::mutex ck_mutex;
    if (spec.checkpoint) {
        if (spec.resume && std::filesystem::exists(*spec.checkpoint)) {
            results = sweep_detail::load_checkpoint(*spec.checkpoint, spec.tag, points, nout);
            for (const auto& r : results) out.resumed += r.has_value();
        }
        if (out.resumed > 0) {
            ck.open(*spec.checkpoint, std::ios::app);
            ck << "\n";  // terminate a line cut short by an interrupted run
        } else {
            if (spec.checkpoint->has_parent_path()) std::filesystem::create_directories(spec.checkpoint->parent_path());
            ck.open(*spec.checkpoint, std::ios::trunc);
            ck << sweep_detail::checkpoint_header(spec.tag) << "\n" << std::flush;
        }
        if (!ck) throw std::runtime_error("cannot open checkpoint " + spec.checkpoint->string());
    }

    std::vector<size_t> todo;
    for (size_t i = 0; i < points; ++i)
        if (!results[i]) todo.push_back(i);

    parallel_for(static_cast<int>(todo.size()), resolve_threads(spec.threads), [&](int t) {
        const size_t idx = todo[t];
        PointResult r;
        try {
            r.values = fn(static_cast<int>(idx / ny), static_cast<int>(idx % ny));
            if (r.values.size() != nout) throw std::logic_error("sweep point returned wrong number of values");
        } catch (const SkipPoint& e) {
            r.values.assign(nout, std::numeric_limits<double>::quiet_NaN());
            r.status = e.what();
        } catch (const std::exception& e) {
            r.values.assign(nout, std::numeric_limits<double>::quiet_NaN());
            r.status = std::string("error: ") + e.what();
        }
        if (r.status != "ok") {
            for (auto& c : r.status)
                if (c == '\n' || c == ',' || c == '\r') c = ';';
        }
        if (spec.checkpoint) {
            std::lock_guard lock(ck_mutex);
            ck << sweep_detail::checkpoint_line(static_cast<long long>(idx), r) << std::flush;
        }
        results[idx] = std::move(r);
    });

    Table& tab = out.table;
    tab.name = spec.name;
    tab.columns = {spec.x.name, spec.y.name};
    for (const auto& o : spec.outputs) tab.columns.push_back(o);
    tab.columns.push_back("status");
    for (size_t i = 0; i < points; ++i) {
        const auto& r = *results[i];
        std::vector<Cell> row{spec.x.values[i / ny], spec.y.values[i % ny]};
        for (double v : r.values) row.emplace_back(v);
        row.emplace_back(r.status);
        if (r.status.rfind("error", 0) == 0) ++out.failed;
        else if (r.status != "ok") ++out.skipped;
        tab.add_row(std::move(row));
    }
    return out;
}

}  // namespace fiberqed
