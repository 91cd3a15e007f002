#pragma once

// Flat `key = value` run configuration. Every key is listed in one schema
// table; parsing rejects unknown keys, and serialization writes all keys in
// schema order with round-trip precision.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fiberqed/coupling_kernel.hpp"
#include "fiberqed/driven_steady_state.hpp"
#include "fiberqed/errors.hpp"
#include "fiberqed/observables.hpp"

namespace fiberqed {

struct RunConfig {
    // chain and fiber
    int N = 15;
    double a_nm = 800.0;
    double h_nm = 100.0;
    double lambda_nm = 1000.0;
    double r_f_nm = 220.0;
    double n_f = 0.0;  // 0: Sellmeier index at lambda
    std::string dipole = "circular";
    double theta_z_rad = 0.0;
    double theta_x_rad = 0.0;

    // drive
    double omega_L_over_gamma = 0.01;
    double delta_over_gamma = 0.0;
    double phi_rad = pi / 2;

    // numerics
    double quad_rel_tol = 1e-8;
    double m_tol = 1e-8;
    int m_cap = 60;
    int max_intervals = 2000;
    bool fiber_scattering = true;
    std::string v_policy = "tier1";
    double spectrum_rel_tol = 1e-9;
    double delta_max_factor = 50.0;
    int threads = 0;

    // fig2
    double fig2_a_min_nm = 50.0;
    double fig2_a_max_nm = 1000.0;
    int fig2_a_points = 96;
    std::string fig2_profile_a_nm = "250,800";

    // fig3
    int fig3_a_points = 101;
    int fig3_phi_points = 101;
    double fig3_a_over_lambda_min = 0.1;
    double fig3_a_over_lambda_max = 1.0;
    double fig3_phi_min_rad = 0.0;
    double fig3_phi_max_rad = pi;
    std::string fig3_spectrum_phi_rad = "0,1.37";
    double fig3_delta_min_over_gamma = -30.0;
    double fig3_delta_max_over_gamma = 30.0;
    int fig3_delta_points = 601;
    std::string fig3_inset_N = "1,3,5,10,15";
    int fig3_inset_phi_points = 181;

    // fig4
    int fig4_lambda_points = 101;
    int fig4_r_f_points = 101;
    double fig4_lambda_min_nm = 500.0;
    double fig4_lambda_max_nm = 1500.0;
    double fig4_r_f_min_nm = 100.0;
    double fig4_r_f_max_nm = 600.0;
    std::string fig4_h_curve_r_f_nm = "150,200,220,250";
    double fig4_h_min_nm = 10.0;
    double fig4_h_max_nm = 300.0;
    int fig4_h_points = 59;

    // fig5
    int fig5_theta_z_points = 101;
    int fig5_theta_x_points = 101;
    double fig5_theta_z_min_rad = 0.0;
    double fig5_theta_z_max_rad = pi;
    double fig5_theta_x_min_rad = 0.0;
    double fig5_theta_x_max_rad = pi;
    double fig5_r_f_over_lambda = 0.22;

    // output
    std::string format = "csv";
};

namespace config_detail {

using Member = std::variant<int RunConfig::*, double RunConfig::*, bool RunConfig::*, std::string RunConfig::*>;

struct Key {
    const char* name;
    Member member;
};

inline const std::vector<Key>& schema() {
    static const std::vector<Key> keys{
        {"N", &RunConfig::N},
        {"a_nm", &RunConfig::a_nm},
        {"h_nm", &RunConfig::h_nm},
        {"lambda_nm", &RunConfig::lambda_nm},
        {"r_f_nm", &RunConfig::r_f_nm},
        {"n_f", &RunConfig::n_f},
        {"dipole", &RunConfig::dipole},
        {"theta_z_rad", &RunConfig::theta_z_rad},
        {"theta_x_rad", &RunConfig::theta_x_rad},
        {"omega_L_over_gamma", &RunConfig::omega_L_over_gamma},
        {"delta_over_gamma", &RunConfig::delta_over_gamma},
        {"phi_rad", &RunConfig::phi_rad},
        {"quad_rel_tol", &RunConfig::quad_rel_tol},
        {"m_tol", &RunConfig::m_tol},
        {"m_cap", &RunConfig::m_cap},
        {"max_intervals", &RunConfig::max_intervals},
        {"fiber_scattering", &RunConfig::fiber_scattering},
        {"v_policy", &RunConfig::v_policy},
        {"spectrum_rel_tol", &RunConfig::spectrum_rel_tol},
        {"delta_max_factor", &RunConfig::delta_max_factor},
        {"threads", &RunConfig::threads},
        {"fig2_a_min_nm", &RunConfig::fig2_a_min_nm},
        {"fig2_a_max_nm", &RunConfig::fig2_a_max_nm},
        {"fig2_a_points", &RunConfig::fig2_a_points},
        {"fig2_profile_a_nm", &RunConfig::fig2_profile_a_nm},
        {"fig3_a_points", &RunConfig::fig3_a_points},
        {"fig3_phi_points", &RunConfig::fig3_phi_points},
        {"fig3_a_over_lambda_min", &RunConfig::fig3_a_over_lambda_min},
        {"fig3_a_over_lambda_max", &RunConfig::fig3_a_over_lambda_max},
        {"fig3_phi_min_rad", &RunConfig::fig3_phi_min_rad},
        {"fig3_phi_max_rad", &RunConfig::fig3_phi_max_rad},
        {"fig3_spectrum_phi_rad", &RunConfig::fig3_spectrum_phi_rad},
        {"fig3_delta_min_over_gamma", &RunConfig::fig3_delta_min_over_gamma},
        {"fig3_delta_max_over_gamma", &RunConfig::fig3_delta_max_over_gamma},
        {"fig3_delta_points", &RunConfig::fig3_delta_points},
        {"fig3_inset_N", &RunConfig::fig3_inset_N},
        {"fig3_inset_phi_points", &RunConfig::fig3_inset_phi_points},
        {"fig4_lambda_points", &RunConfig::fig4_lambda_points},
        {"fig4_r_f_points", &RunConfig::fig4_r_f_points},
        {"fig4_lambda_min_nm", &RunConfig::fig4_lambda_min_nm},
        {"fig4_lambda_max_nm", &RunConfig::fig4_lambda_max_nm},
        {"fig4_r_f_min_nm", &RunConfig::fig4_r_f_min_nm},
        {"fig4_r_f_max_nm", &RunConfig::fig4_r_f_max_nm},
        {"fig4_h_curve_r_f_nm", &RunConfig::fig4_h_curve_r_f_nm},
        {"fig4_h_min_nm", &RunConfig::fig4_h_min_nm},
        {"fig4_h_max_nm", &RunConfig::fig4_h_max_nm},
        {"fig4_h_points", &RunConfig::fig4_h_points},
        {"fig5_theta_z_points", &RunConfig::fig5_theta_z_points},
        {"fig5_theta_x_points", &RunConfig::fig5_theta_x_points},
        {"fig5_theta_z_min_rad", &RunConfig::fig5_theta_z_min_rad},
        {"fig5_theta_z_max_rad", &RunConfig::fig5_theta_z_max_rad},
        {"fig5_theta_x_min_rad", &RunConfig::fig5_theta_x_min_rad},
        {"fig5_theta_x_max_rad", &RunConfig::fig5_theta_x_max_rad},
        {"fig5_r_f_over_lambda", &RunConfig::fig5_r_f_over_lambda},
        {"format", &RunConfig::format},
    };
    return keys;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double parse_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
        throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
    return x;
}

inline int parse_int(const std::string& key, const std::string& v) {
    int x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size())
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
    return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config: key '" + key + "' expects true or false, got '" + v + "'");
}

}  // namespace config_detail

/// Set one key from its text value.
inline void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& k : config_detail::schema()) {
        if (key != k.name) continue;
        std::visit(
            [&](auto m) {
                using T = std::remove_cvref_t<decltype(cfg.*m)>;
                if constexpr (std::is_same_v<T, int>) cfg.*m = config_detail::parse_int(key, value);
                else if constexpr (std::is_same_v<T, double>) cfg.*m = config_detail::parse_double(key, value);
                else if constexpr (std::is_same_v<T, bool>) cfg.*m = config_detail::parse_bool(key, value);
                else cfg.*m = value;
            },
            k.member);
        return;
    }
    throw ConfigError("config: unknown key '" + key + "'");
}

/// Parse `key = value` lines; `#` starts a comment. Later keys override
/// earlier ones, so a base config can be extended.
inline RunConfig parse_config(const std::string& text, RunConfig cfg = {}) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = config_detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = config_detail::trim(line.substr(0, eq));
        const std::string value = config_detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        set_key(cfg, key, value);
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot read '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

/// All keys in schema order as (key, text value).
inline std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& k : config_detail::schema()) {
        std::string v;
        std::visit(
            [&](auto m) {
                using T = std::remove_cvref_t<decltype(cfg.*m)>;
                if constexpr (std::is_same_v<T, int>) v = std::to_string(cfg.*m);
                else if constexpr (std::is_same_v<T, double>) v = config_detail::format_double(cfg.*m);
                else if constexpr (std::is_same_v<T, bool>) v = (cfg.*m) ? "true" : "false";
                else v = cfg.*m;
            },
            k.member);
        out.emplace_back(k.name, v);
    }
    return out;
}

inline std::string serialize_config(const RunConfig& cfg) {
    std::string s;
    for (const auto& [k, v] : config_entries(cfg)) s += k + " = " + v + "\n";
    return s;
}

/// Comma-separated list of numbers.
inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = config_detail::trim(item);
        if (!item.empty()) out.push_back(config_detail::parse_double(key, item));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Conversion to the physics types

inline Vec3c config_dipole(const RunConfig& cfg) {
    Vec3c d;
    if (cfg.dipole == "circular") d = base_circular_dipole();
    else if (cfg.dipole == "x") d = Vec3c(1, 0, 0);
    else if (cfg.dipole == "y") d = Vec3c(0, 1, 0);
    else if (cfg.dipole == "z") d = Vec3c(0, 0, 1);
    else throw ConfigError("config: dipole must be circular, x, y or z, got '" + cfg.dipole + "'");
    return rotate_dipole(d, cfg.theta_z_rad, cfg.theta_x_rad);
}

inline FiberSpec config_fiber(const RunConfig& cfg) {
    FiberSpec f{cfg.r_f_nm * 1e-9, cfg.lambda_nm * 1e-9, {}, 1.0};
    if (cfg.n_f != 0.0) f.index_override = cfg.n_f;
    return f;
}

inline ChainSpec config_chain(const RunConfig& cfg) {
    return ChainSpec{cfg.N, cfg.a_nm * 1e-9, cfg.h_nm * 1e-9, cfg.lambda_nm * 1e-9, config_dipole(cfg)};
}

inline QuadratureConfig config_quadrature(const RunConfig& cfg) {
    QuadratureConfig q;
    q.rel_tol = cfg.quad_rel_tol;
    q.m_tol = cfg.m_tol;
    q.m_cap = cfg.m_cap;
    q.max_intervals = cfg.max_intervals;
    q.fiber_scattering = cfg.fiber_scattering;
    q.threads = cfg.threads;
    return q;
}

inline VPolicy config_v_policy(const RunConfig& cfg) {
    if (cfg.v_policy == "tier1") return VPolicy::tier1;
    if (cfg.v_policy == "tier2") return VPolicy::tier2;
    throw ConfigError("config: v_policy must be tier1 or tier2, got '" + cfg.v_policy + "'");
}

inline DriveField config_drive(const RunConfig& cfg) {
    return DriveField{cfg.omega_L_over_gamma, cfg.delta_over_gamma, cfg.phi_rad};
}

inline SpectrumOptions config_spectrum(const RunConfig& cfg) {
    SpectrumOptions o;
    o.delta_max_factor = cfg.delta_max_factor;
    o.rel_tol = cfg.spectrum_rel_tol;
    return o;
}

/// Checks beyond per-key parsing: ranges and enumerations.
inline void validate_config(const RunConfig& cfg) {
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError("config: " + msg);
    };
    need(cfg.N >= 1, "N must be at least 1");
    need(cfg.a_nm > 0 || cfg.N == 1, "a_nm must be positive");
    need(cfg.h_nm > 0, "h_nm must be positive");
    need(cfg.lambda_nm > 0, "lambda_nm must be positive");
    need(cfg.r_f_nm > 0, "r_f_nm must be positive");
    need(cfg.n_f == 0.0 || cfg.n_f > 1.0, "n_f must be 0 (Sellmeier) or above 1");
    need(cfg.quad_rel_tol > 0 && cfg.m_tol > 0 && cfg.spectrum_rel_tol > 0, "tolerances must be positive");
    need(cfg.m_cap >= 1 && cfg.max_intervals >= 1, "m_cap and max_intervals must be positive");
    need(cfg.threads >= 0, "threads must be non-negative");
    need(cfg.format == "csv" || cfg.format == "json", "format must be csv or json");
    for (int p : {cfg.fig2_a_points, cfg.fig3_a_points, cfg.fig3_phi_points, cfg.fig3_delta_points,
                  cfg.fig3_inset_phi_points, cfg.fig4_lambda_points, cfg.fig4_r_f_points, cfg.fig4_h_points,
                  cfg.fig5_theta_z_points, cfg.fig5_theta_x_points})
        need(p >= 1, "grid point counts must be at least 1");
    need(cfg.fig4_r_f_min_nm > 0 && cfg.fig4_r_f_min_nm <= cfg.fig4_r_f_max_nm, "fig4 radius range is empty");
    need(cfg.fig4_lambda_min_nm > 0 && cfg.fig4_lambda_min_nm <= cfg.fig4_lambda_max_nm,
         "fig4 wavelength range is empty");
    need(cfg.fig4_h_min_nm > 0 && cfg.fig4_h_min_nm <= cfg.fig4_h_max_nm, "fig4 height range is empty");
    (void)config_dipole(cfg);
    (void)config_v_policy(cfg);
    for (const auto& [k, v] : {std::pair<const char*, const std::string*>{"fig2_profile_a_nm", &cfg.fig2_profile_a_nm},
                               {"fig3_spectrum_phi_rad", &cfg.fig3_spectrum_phi_rad},
                               {"fig3_inset_N", &cfg.fig3_inset_N},
                               {"fig4_h_curve_r_f_nm", &cfg.fig4_h_curve_r_f_nm}})
        (void)parse_list(k, *v);
}

}  // namespace fiberqed
