#pragma once

// Figure scenarios and single computations driven by a RunConfig. Each
// command writes its tables through an OutputSet; sweeps checkpoint into the
// output directory and drop the checkpoint once the table is written.

#include <boost/math/tools/minima.hpp>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fiberqed/collective_modes.hpp"
#include "fiberqed/config.hpp"
#include "fiberqed/coupling_kernel.hpp"
#include "fiberqed/driven_steady_state.hpp"
#include "fiberqed/observables.hpp"
#include "fiberqed/parallel.hpp"
#include "fiberqed/sweep.hpp"
#include "fiberqed/table_io.hpp"
#include "fiberqed/version.hpp"

namespace fiberqed {

struct CommandOptions {
    bool resume = false;  // reuse matching sweep checkpoints in the output directory
};

struct CommandReport {
    int failed_points = 0;
    int skipped_points = 0;
    std::vector<std::string> warnings;
};

namespace scenario_detail {

inline constexpr double nan = std::numeric_limits<double>::quiet_NaN();

inline std::string num(double x) { return table_detail::format_number(x); }

inline std::string short_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

using Meta = std::vector<std::pair<std::string, std::string>>;

// The thread count never changes results and is left out of the metadata.
inline Meta base_metadata(const RunConfig& cfg, const std::string& command) {
    Meta m{{"command", command}, {"version", version}};
    for (const auto& [k, v] : config_entries(cfg))
        if (k != "threads") m.emplace_back("config." + k, v);
    return m;
}

inline std::string config_tag(const RunConfig& cfg, const std::string& table) {
    RunConfig c = cfg;
    c.threads = 0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016zx", std::hash<std::string>{}(serialize_config(c) + "|" + table));
    return table + " " + buf + " " + version;
}

// Inner computations run single-threaded when the outer loop is parallel.
inline QuadratureConfig inner_quadrature(const RunConfig& cfg) {
    QuadratureConfig q = config_quadrature(cfg);
    q.threads = 1;
    return q;
}

inline void add_certificate(Meta& m, const std::string& prefix, const ConvergenceCertificate& c) {
    m.emplace_back(prefix + ".m_max", std::to_string(c.m_max));
    m.emplace_back(prefix + ".last_shell_relative", num(c.last_shell_relative));
    m.emplace_back(prefix + ".quad_error", num(c.quad_error));
    m.emplace_back(prefix + ".quad_converged", c.quad_converged ? "true" : "false");
}

// Worst-case certificate over many evaluations.
inline void merge(ConvergenceCertificate& into, const ConvergenceCertificate& c) {
    into.m_max = std::max(into.m_max, c.m_max);
    into.last_shell = std::max(into.last_shell, c.last_shell);
    into.last_shell_relative = std::max(into.last_shell_relative, c.last_shell_relative);
    into.quad_error = std::max(into.quad_error, c.quad_error);
    into.evaluations += c.evaluations;
    into.quad_converged = into.quad_converged && c.quad_converged;
}

/// Run a sweep with a checkpoint next to the output and write its table.
inline SweepResult sweep_to_table(SweepSpec spec, const RunConfig& cfg, const CommandOptions& opt, OutputSet& out,
                                  Meta meta, const std::function<std::vector<double>(int, int)>& fn,
                                  CommandReport& report) {
    const auto ck = out.dir() / (spec.name + ".checkpoint");
    spec.checkpoint = ck;
    spec.resume = opt.resume;
    spec.tag = config_tag(cfg, spec.name);
    spec.threads = cfg.threads;
    std::filesystem::create_directories(out.dir());
    SweepResult res = run_sweep(spec, fn);
    meta.emplace_back("points", std::to_string(res.table.rows.size()));
    meta.emplace_back("failed_points", std::to_string(res.failed));
    meta.emplace_back("skipped_points", std::to_string(res.skipped));
    res.table.metadata = std::move(meta);
    out.write(res.table);
    std::error_code ec;
    std::filesystem::remove(ck, ec);
    report.failed_points += res.failed;
    report.skipped_points += res.skipped;
    if (res.failed > 0)
        report.warnings.push_back(spec.name + ": " + std::to_string(res.failed) + " grid points failed");
    return res;
}

}  // namespace scenario_detail

// ---------------------------------------------------------------------------
// Shared pieces, also used by the acceptance checks

struct Fig2Point {
    CollectiveModes free_space, full, guided;
    double beta_f = 0.0;
    ConvergenceCertificate certificate;
};

/// Collective modes for free space, fiber (guided + unguided) and guided-only
/// couplings at one lattice constant.
inline Fig2Point fig2_point(ChainSpec chain, const FiberSpec& fiber, double a, const QuadratureConfig& qc) {
    chain.a = a;
    const auto cm = assemble(chain, fiber, qc, VPolicy::tier1);
    const auto geometry = std::make_pair(a, cm.guided.beta_f);
    Fig2Point p;
    p.beta_f = cm.guided.beta_f;
    p.free_space = diagonalize(free_space_oracle(chain).second, geometry);
    p.full = diagonalize(cm.Gamma, geometry);
    p.guided = guided_only_modes(cm.Gamma_gR, cm.Gamma_gL, a, cm.guided.beta_f);
    p.certificate = cm.radiation_certificate;
    return p;
}

struct BetaPeak {
    double beta_C = 0.0;
    double phi = 0.0;
    double C_C = 0.0;
};

/// Largest collective beta factor over the laser angle: grid scan, then a
/// Brent refinement between the neighbours of the best grid point.
inline BetaPeak peak_beta_over_phi(const CouplingMatrices& cm, const ChainSpec& chain, const std::vector<double>& phis,
                                   const SpectrumOptions& so) {
    if (phis.empty()) throw DomainError("peak_beta_over_phi: empty angle grid");
    auto eval = [&](double phi) { return integrate_collective(cm, drive_vector(chain, phi), so); };
    std::vector<double> b(phis.size());
    for (size_t i = 0; i < phis.size(); ++i) b[i] = eval(phis[i]).beta_C;
    const size_t best = std::max_element(b.begin(), b.end()) - b.begin();
    double phi = phis[best];
    if (phis.size() >= 3) {
        const double lo = phis[best == 0 ? 0 : best - 1];
        const double hi = phis[best + 1 == phis.size() ? best : best + 1];
        std::uintmax_t iters = 60;
        const auto r = boost::math::tools::brent_find_minima([&](double x) { return -eval(x).beta_C; }, lo, hi, 40,
                                                             iters);
        if (-r.second > b[best]) phi = r.first;
    }
    const auto o = eval(phi);
    return {o.beta_C, phi, o.C_C};
}

// ---------------------------------------------------------------------------
// fig2: collective decay rates versus lattice constant, superradiant profiles

inline CommandReport cmd_fig2(const RunConfig& cfg, OutputSet& out, const CommandOptions& = {}) {
    using namespace scenario_detail;
    validate_config(cfg);
    CommandReport report;
    const FiberSpec fiber = config_fiber(cfg);
    const ChainSpec chain = config_chain(cfg);
    const QuadratureConfig qc = inner_quadrature(cfg);
    const double lambda_nm = cfg.lambda_nm;

    const auto a_nm = linspace(cfg.fig2_a_min_nm, cfg.fig2_a_max_nm, cfg.fig2_a_points);
    std::vector<Fig2Point> pts(a_nm.size());
    parallel_for(static_cast<int>(a_nm.size()), resolve_threads(cfg.threads),
                 [&](int i) { pts[i] = fig2_point(chain, fiber, a_nm[i] * 1e-9, qc); });

    ConvergenceCertificate cert;
    for (const auto& p : pts) merge(cert, p.certificate);

    auto rates_table = [&](const std::string& name, const std::string& panel, auto pick, bool labels) {
        Table t;
        t.name = name;
        t.metadata = base_metadata(cfg, "fig2");
        t.metadata.emplace_back("panel", panel);
        add_certificate(t.metadata, "radiation", cert);
        t.columns = {"a_nm", "a_over_lambda", "rank", "gamma_c"};
        if (labels) {
            t.columns.push_back("overlap_right");
            t.columns.push_back("overlap_left");
        }
        for (size_t i = 0; i < pts.size(); ++i) {
            const CollectiveModes& m = pick(pts[i]);
            for (int c = 0; c < m.N(); ++c) {
                std::vector<Cell> row{a_nm[i], a_nm[i] / lambda_nm, static_cast<long long>(c), m.gamma_c(c)};
                if (labels) {
                    row.emplace_back(m.labels[c].overlap_right);
                    row.emplace_back(m.labels[c].overlap_left);
                }
                t.add_row(std::move(row));
            }
        }
        out.write(t);
    };
    rates_table("fig2a_free_space", "free space", [](const Fig2Point& p) -> const CollectiveModes& {
        return p.free_space;
    }, false);
    rates_table("fig2b_full", "guided and unguided", [](const Fig2Point& p) -> const CollectiveModes& {
        return p.full;
    }, true);
    rates_table("fig2c_guided_only", "guided only", [](const Fig2Point& p) -> const CollectiveModes& {
        return p.guided;
    }, true);

    const auto profile_a = parse_list("fig2_profile_a_nm", cfg.fig2_profile_a_nm);
    for (size_t i = 0; i < profile_a.size(); ++i) {
        const Fig2Point p = fig2_point(chain, fiber, profile_a[i] * 1e-9, config_quadrature(cfg));
        const ModeProfile fs = superradiant_profile(p.free_space), gd = superradiant_profile(p.guided),
                          fl = superradiant_profile(p.full);
        Table t;
        t.name = std::string("fig2") + char('d' + std::min<size_t>(i, 22)) + "_profile_a" +
                 short_num(profile_a[i]) + "nm";
        t.metadata = base_metadata(cfg, "fig2");
        t.metadata.emplace_back("a_nm", num(profile_a[i]));
        t.metadata.emplace_back("beta_f_per_m", num(p.beta_f));
        t.metadata.emplace_back("expected_phase_step_rad", num(wrap_angle(profile_a[i] * 1e-9 * p.beta_f)));
        t.metadata.emplace_back("phase_gradient_free_space", num(phase_gradient(fs)));
        t.metadata.emplace_back("phase_gradient_guided", num(phase_gradient(gd)));
        t.metadata.emplace_back("phase_gradient_full", num(phase_gradient(fl)));
        t.metadata.emplace_back("gamma_superradiant_free_space", num(p.free_space.gamma_c(0)));
        t.metadata.emplace_back("gamma_superradiant_guided", num(p.guided.gamma_c(0)));
        t.metadata.emplace_back("gamma_superradiant_full", num(p.full.gamma_c(0)));
        add_certificate(t.metadata, "radiation", p.certificate);
        t.columns = {"site", "z_nm", "magnitude_free_space", "phase_free_space", "magnitude_guided", "phase_guided",
                     "magnitude_full", "phase_full"};
        for (int j = 0; j < chain.N; ++j)
            t.add_row({static_cast<long long>(j), j * profile_a[i], fs.magnitude(j), fs.phase(j), gd.magnitude(j),
                       gd.phase(j), fl.magnitude(j), fl.phase(j)});
        out.write(t);
    }
    return report;
}

// ---------------------------------------------------------------------------
// fig3: driven chain, collective observables

inline CommandReport cmd_fig3(const RunConfig& cfg, OutputSet& out, const CommandOptions& opt = {}) {
    using namespace scenario_detail;
    validate_config(cfg);
    CommandReport report;
    const FiberSpec fiber = config_fiber(cfg);
    const ChainSpec chain = config_chain(cfg);
    const SpectrumOptions so = config_spectrum(cfg);
    const VPolicy policy = config_v_policy(cfg);
    const double lambda = cfg.lambda_nm * 1e-9;

    // Spectra at the working point.
    const auto cm0 = assemble(chain, fiber, config_quadrature(cfg), policy);
    const auto deltas = linspace(cfg.fig3_delta_min_over_gamma, cfg.fig3_delta_max_over_gamma, cfg.fig3_delta_points);
    const auto spectrum_phi = parse_list("fig3_spectrum_phi_rad", cfg.fig3_spectrum_phi_rad);
    for (size_t i = 0; i < spectrum_phi.size(); ++i) {
        const VectorXc v = drive_vector(chain, spectrum_phi[i]);
        Table t;
        const std::string panel = i == 0 ? "fig3a" : i == 1 ? "fig3b" : "fig3";
        t.name = panel + "_spectrum_phi" + short_num(spectrum_phi[i]);
        t.metadata = base_metadata(cfg, "fig3");
        t.metadata.emplace_back("phi_rad", num(spectrum_phi[i]));
        t.metadata.emplace_back("units", "rates in gamma at the configured Omega_L");
        add_certificate(t.metadata, "radiation", cm0.radiation_certificate);
        t.columns = {"delta_over_gamma", "N_p", "N_p_g", "N_p_gR", "N_p_gL", "N_p_u", "max_population"};
        for (double d : deltas) {
            const auto ss = solve_steady(cm0, v, cfg.omega_L_over_gamma, d);
            const auto r = emission_rates(cm0, ss.c);
            t.add_row({d, r.N_p, r.N_p_g, r.N_p_gR, r.N_p_gL, r.N_p_u, ss.max_population});
        }
        if (std::abs(cfg.omega_L_over_gamma) > weak_drive_limit)
            report.warnings.push_back("Omega_L exceeds gamma/10; single-excitation approximation questionable");
        out.write(t);
    }

    // Mode-matching lines for comparison.
    {
        const auto ax = linspace(cfg.fig3_a_over_lambda_min, cfg.fig3_a_over_lambda_max, cfg.fig3_a_points);
        Table t;
        t.name = "fig3e_matching_lines";
        t.metadata = base_metadata(cfg, "fig3");
        t.metadata.emplace_back("lambda_f_nm", num(cm0.guided.lambda_f * 1e9));
        t.columns = {"a_over_lambda", "phi_plus_n1", "phi_minus_n1"};
        for (double x : ax) {
            const auto p = mode_matching_angle(x * lambda, lambda, cm0.guided.lambda_f, 1, +1);
            const auto m = mode_matching_angle(x * lambda, lambda, cm0.guided.lambda_f, 1, -1);
            t.add_row({x, p.value_or(nan), m.value_or(nan)});
        }
        out.write(t);
    }

    // (a/lambda, phi) maps. Coupling matrices depend only on a.
    SweepSpec spec;
    spec.name = "fig3cde_collective_map";
    spec.x = {"a_over_lambda", linspace(cfg.fig3_a_over_lambda_min, cfg.fig3_a_over_lambda_max, cfg.fig3_a_points)};
    spec.y = {"phi_rad", linspace(cfg.fig3_phi_min_rad, cfg.fig3_phi_max_rad, cfg.fig3_phi_points)};
    spec.outputs = {"Gamma_C", "Gamma_C_g", "Gamma_C_gR", "Gamma_C_gL", "Gamma_C_u", "beta_C", "C_C",
                    "tail_error_relative", "quad_error_relative", "resolved"};
    const int nx = static_cast<int>(spec.x.values.size());
    std::vector<std::optional<CouplingMatrices>> cms(nx);
    std::vector<std::string> errors(nx);
    const QuadratureConfig qc = inner_quadrature(cfg);
    parallel_for(nx, resolve_threads(cfg.threads), [&](int i) {
        ChainSpec c = chain;
        c.a = spec.x.values[i] * lambda;
        try {
            cms[i] = assemble(c, fiber, qc, policy);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    ConvergenceCertificate cert;
    for (const auto& c : cms)
        if (c) merge(cert, c->radiation_certificate);
    Meta meta = base_metadata(cfg, "fig3");
    meta.emplace_back("units", "Gamma_C columns are detuning integrals divided by Omega_L^2 (gamma)");
    add_certificate(meta, "radiation", cert);
    sweep_to_table(spec, cfg, opt, out, meta, [&](int ix, int iy) {
        if (!cms[ix]) throw SolverError(errors[ix]);
        ChainSpec c = chain;
        c.a = spec.x.values[ix] * lambda;
        const auto o = integrate_collective(*cms[ix], drive_vector(c, spec.y.values[iy]), so);
        return std::vector<double>{o.Gamma_C, o.Gamma_C_g, o.Gamma_C_gR, o.Gamma_C_gL, o.Gamma_C_u, o.beta_C, o.C_C,
                                   o.tail_error_relative, o.quad_error_relative, o.resolved ? 1.0 : 0.0};
    }, report);

    // Inset: largest beta_C over phi versus N at the working lattice constant.
    const auto Ns = parse_list("fig3_inset_N", cfg.fig3_inset_N);
    const auto phis = linspace(0.0, pi, cfg.fig3_inset_phi_points);
    const double Gg = cm0.single_atom_guided.total(), Gu = cm0.single_atom_unguided;
    auto reference = [&](double n) { return n * Gg / (n * Gg + Gu); };
    std::vector<BetaPeak> peaks(Ns.size());
    parallel_for(static_cast<int>(Ns.size()), resolve_threads(cfg.threads), [&](int i) {
        ChainSpec c = chain;
        c.N = static_cast<int>(Ns[i]);
        if (c.N < 1 || c.N != Ns[i]) throw ConfigError("config: fig3_inset_N must hold positive integers");
        const auto cm = assemble(c, fiber, qc, policy);
        peaks[i] = peak_beta_over_phi(cm, c, phis, so);
    });
    {
        Table t;
        t.name = "fig3d_inset";
        t.metadata = base_metadata(cfg, "fig3");
        t.metadata.emplace_back("single_atom_Gamma_g", num(Gg));
        t.metadata.emplace_back("single_atom_Gamma_u", num(Gu));
        t.columns = {"N", "beta_C_max", "phi_at_max", "C_C_at_max", "reference"};
        for (size_t i = 0; i < Ns.size(); ++i)
            t.add_row({static_cast<long long>(Ns[i]), peaks[i].beta_C, peaks[i].phi, peaks[i].C_C,
                       reference(Ns[i])});
        out.write(t);
    }
    {
        Table t;
        t.name = "fig3d_inset_reference";
        t.metadata = base_metadata(cfg, "fig3");
        t.columns = {"N", "reference"};
        const double nmax = Ns.empty() ? 1.0 : *std::max_element(Ns.begin(), Ns.end());
        const int steps = std::max(1, static_cast<int>(std::lround((nmax - 1.0) * 10.0)));
        for (double n : linspace(1.0, std::max(nmax, 1.0), steps + 1)) t.add_row({n, reference(n)});
        out.write(t);
    }
    return report;
}

// ---------------------------------------------------------------------------
// fig4: single atom versus wavelength and fiber radius

inline CommandReport cmd_fig4(const RunConfig& cfg, OutputSet& out, const CommandOptions& opt = {}) {
    using namespace scenario_detail;
    validate_config(cfg);
    CommandReport report;
    const Vec3c d = config_dipole(cfg);
    const double h = cfg.h_nm * 1e-9;
    const QuadratureConfig qc = inner_quadrature(cfg);

    auto single = [&](double lambda_nm, double r_f_nm, double h_m) {
        FiberSpec f = config_fiber(cfg);
        f.wavelength = lambda_nm * 1e-9;
        f.radius = r_f_nm * 1e-9;
        f.validate();
        if (!check_single_mode(f)) throw SkipPoint("not single-mode");
        const auto g = solve_he11(f);
        return single_atom(f, g, h_m, d, qc);
    };

    SweepSpec spec;
    spec.name = "fig4abd_single_atom_map";
    spec.x = {"lambda_nm", linspace(cfg.fig4_lambda_min_nm, cfg.fig4_lambda_max_nm, cfg.fig4_lambda_points)};
    spec.y = {"r_f_nm", linspace(cfg.fig4_r_f_min_nm, cfg.fig4_r_f_max_nm, cfg.fig4_r_f_points)};
    spec.outputs = {"Gamma_over_gamma", "beta", "C", "Gamma_g", "Gamma_u", "r_plus_h_over_lambda", "m_max",
                    "quad_error"};
    Meta meta = base_metadata(cfg, "fig4");
    meta.emplace_back("h_nm", num(cfg.h_nm));
    const auto res = sweep_to_table(spec, cfg, opt, out, meta, [&](int ix, int iy) {
        const double lam = spec.x.values[ix], r = spec.y.values[iy];
        const auto s = single(lam, r, h);
        return std::vector<double>{s.Gamma_total, s.beta, s.C, s.Gamma_g, s.Gamma_u, (r + cfg.h_nm) / lam,
                                   double(s.certificate.m_max), s.certificate.quad_error};
    }, report);

    {
        Table t;
        t.name = "fig4_single_mode_boundary";
        t.metadata = base_metadata(cfg, "fig4");
        t.columns = {"lambda_nm", "r_cutoff_nm", "n_f"};
        for (double lam : spec.x.values) {
            FiberSpec f = config_fiber(cfg);
            f.wavelength = lam * 1e-9;
            t.add_row({lam, single_mode_cutoff_radius(f) * 1e9, f.index()});
        }
        out.write(t);
    }
    {
        // Radius of strongest guided coupling per wavelength, from the map.
        Table t;
        t.name = "fig4b_beta_max_radius";
        t.metadata = base_metadata(cfg, "fig4");
        t.columns = {"lambda_nm", "r_f_at_max_nm", "beta_max", "r_plus_h_over_lambda"};
        const size_t ny = spec.y.values.size();
        for (size_t ix = 0; ix < spec.x.values.size(); ++ix) {
            double best = -1, r_best = nan;
            for (size_t iy = 0; iy < ny; ++iy) {
                const double b = std::get<double>(res.table.rows[ix * ny + iy][3]);
                if (std::isfinite(b) && b > best) {
                    best = b;
                    r_best = spec.y.values[iy];
                }
            }
            const double lam = spec.x.values[ix];
            t.add_row({lam, r_best, best < 0 ? nan : best, (r_best + cfg.h_nm) / lam});
        }
        out.write(t);
    }

    SweepSpec hs;
    hs.name = "fig4c_beta_vs_h";
    hs.x = {"r_f_nm", parse_list("fig4_h_curve_r_f_nm", cfg.fig4_h_curve_r_f_nm)};
    hs.y = {"h_nm", linspace(cfg.fig4_h_min_nm, cfg.fig4_h_max_nm, cfg.fig4_h_points)};
    hs.outputs = {"beta", "Gamma_over_gamma", "C"};
    Meta hmeta = base_metadata(cfg, "fig4");
    hmeta.emplace_back("lambda_nm", num(cfg.lambda_nm));
    if (hs.x.values.empty()) throw ConfigError("config: fig4_h_curve_r_f_nm is empty");
    sweep_to_table(hs, cfg, opt, out, hmeta, [&](int ix, int iy) {
        const auto s = single(cfg.lambda_nm, hs.x.values[ix], hs.y.values[iy] * 1e-9);
        return std::vector<double>{s.beta, s.Gamma_total, s.C};
    }, report);
    return report;
}

// ---------------------------------------------------------------------------
// fig5: single atom versus dipole orientation

inline CommandReport cmd_fig5(const RunConfig& cfg, OutputSet& out, const CommandOptions& opt = {}) {
    using namespace scenario_detail;
    validate_config(cfg);
    CommandReport report;
    RunConfig base = cfg;
    base.theta_z_rad = base.theta_x_rad = 0.0;
    const Vec3c d0 = config_dipole(base);
    FiberSpec fiber = config_fiber(cfg);
    fiber.radius = cfg.fig5_r_f_over_lambda * fiber.wavelength;
    fiber.validate();
    const auto g = solve_he11(fiber);
    const double h = cfg.h_nm * 1e-9;
    const QuadratureConfig qc = inner_quadrature(cfg);

    SweepSpec spec;
    spec.name = "fig5bcd_rotation_map";
    spec.x = {"theta_z_rad", linspace(cfg.fig5_theta_z_min_rad, cfg.fig5_theta_z_max_rad, cfg.fig5_theta_z_points)};
    spec.y = {"theta_x_rad", linspace(cfg.fig5_theta_x_min_rad, cfg.fig5_theta_x_max_rad, cfg.fig5_theta_x_points)};
    spec.outputs = {"Gamma_over_gamma", "beta", "C", "Gamma_g", "Gamma_u", "m_max", "quad_error"};
    Meta meta = base_metadata(cfg, "fig5");
    meta.emplace_back("r_f_nm", num(fiber.radius * 1e9));
    meta.emplace_back("single_mode", check_single_mode(fiber) ? "true" : "false");
    sweep_to_table(spec, cfg, opt, out, meta, [&](int ix, int iy) {
        const auto s = single_atom(fiber, g, h, rotate_dipole(d0, spec.x.values[ix], spec.y.values[iy]), qc);
        return std::vector<double>{s.Gamma_total, s.beta, s.C, s.Gamma_g, s.Gamma_u, double(s.certificate.m_max),
                                   s.certificate.quad_error};
    }, report);
    return report;
}

// ---------------------------------------------------------------------------
// compute: one pipeline stage as a JSON record

inline const std::vector<std::string>& compute_selectors() {
    static const std::vector<std::string> s{"beta_f", "gamma_matrix", "modes", "spectrum", "collective",
                                            "single_atom"};
    return s;
}

namespace scenario_detail {

using json = nlohmann::ordered_json;

inline json matrix_json(const MatrixXc& M) {
    json re = json::array(), im = json::array();
    for (int i = 0; i < M.rows(); ++i) {
        json r = json::array(), s = json::array();
        for (int j = 0; j < M.cols(); ++j) {
            r.push_back(M(i, j).real());
            s.push_back(M(i, j).imag());
        }
        re.push_back(std::move(r));
        im.push_back(std::move(s));
    }
    return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

inline json vector_json(const VectorXc& v) {
    json re = json::array(), im = json::array();
    for (int i = 0; i < v.size(); ++i) {
        re.push_back(v(i).real());
        im.push_back(v(i).imag());
    }
    return json{{"re", std::move(re)}, {"im", std::move(im)}};
}

inline json certificate_json(const ConvergenceCertificate& c) {
    return json{{"m_max", c.m_max},
                {"last_shell_relative", c.last_shell_relative},
                {"quad_error", c.quad_error},
                {"evaluations", c.evaluations},
                {"quad_converged", c.quad_converged}};
}

}  // namespace scenario_detail

/// Result record for one selector. Unknown selectors raise ConfigError.
inline nlohmann::ordered_json cmd_compute(const RunConfig& cfg, const std::string& selector) {
    using namespace scenario_detail;
    if (std::find(compute_selectors().begin(), compute_selectors().end(), selector) == compute_selectors().end())
        throw ConfigError("unknown quantity '" + selector + "'");
    validate_config(cfg);
    json inputs = json::object();
    for (const auto& [k, v] : config_entries(cfg)) inputs[k] = v;
    json rec{{"selector", selector}, {"version", version}, {"inputs", inputs}};
    json outputs = json::object(), certs = json::object();

    const FiberSpec fiber = config_fiber(cfg);
    if (selector == "beta_f") {
        const auto g = solve_he11(fiber);
        outputs["beta_f"] = g.beta_f;
        outputs["beta_f_prime"] = g.beta_f_prime;
        outputs["lambda_f"] = g.lambda_f;
        outputs["n_f"] = g.n;
        outputs["single_mode"] = check_single_mode(fiber);
        certs["residual"] = g.residual;
    } else if (selector == "single_atom") {
        ChainSpec c = config_chain(cfg);
        c.N = 1;
        const auto s = single_atom(fiber, solve_he11(fiber), c.h, c.unit_dipole(), config_quadrature(cfg));
        outputs["Gamma_total"] = s.Gamma_total;
        outputs["Gamma_g"] = s.Gamma_g;
        outputs["Gamma_gR"] = s.Gamma_gR;
        outputs["Gamma_gL"] = s.Gamma_gL;
        outputs["Gamma_u"] = s.Gamma_u;
        outputs["beta"] = s.beta;
        outputs["C"] = s.C;
        certs["radiation"] = certificate_json(s.certificate);
    } else {
        const ChainSpec chain = config_chain(cfg);
        const auto cm = assemble(chain, fiber, config_quadrature(cfg), config_v_policy(cfg));
        certs["radiation"] = certificate_json(cm.radiation_certificate);
        if (cm.v_policy == VPolicy::tier2) certs["coherent"] = certificate_json(cm.v_certificate);
        const VectorXc v = drive_vector(chain, cfg.phi_rad);
        if (selector == "gamma_matrix") {
            outputs["Gamma"] = matrix_json(cm.Gamma);
            outputs["Gamma_gR"] = matrix_json(cm.Gamma_gR);
            outputs["Gamma_gL"] = matrix_json(cm.Gamma_gL);
            outputs["Gamma_u"] = matrix_json(cm.Gamma_u);
            outputs["V"] = matrix_json(cm.V);
        } else if (selector == "modes") {
            const auto m = diagonalize(cm.Gamma, std::make_pair(chain.a, cm.guided.beta_f));
            json gc = json::array(), labels = json::array();
            for (int c = 0; c < m.N(); ++c) {
                gc.push_back(m.gamma_c(c));
                labels.push_back(json{{"rank", m.labels[c].rank},
                                      {"overlap_right", m.labels[c].overlap_right},
                                      {"overlap_left", m.labels[c].overlap_left}});
            }
            outputs["gamma_c"] = gc;
            outputs["M"] = matrix_json(m.M);
            outputs["labels"] = labels;
            outputs["superradiant_phase_gradient"] = phase_gradient(superradiant_profile(m));
            certs["reconstruction_residual"] = m.reconstruction_residual;
            certs["top_pair_degenerate"] = m.top_pair_degenerate;
        } else if (selector == "spectrum") {
            const auto ss = solve_steady(cm, v, cfg.omega_L_over_gamma, cfg.delta_over_gamma);
            const auto r = emission_rates(cm, ss.c);
            outputs["c"] = vector_json(ss.c);
            outputs["N_p"] = r.N_p;
            outputs["N_p_g"] = r.N_p_g;
            outputs["N_p_gR"] = r.N_p_gR;
            outputs["N_p_gL"] = r.N_p_gL;
            outputs["N_p_u"] = r.N_p_u;
            certs["residual"] = ss.residual;
            certs["rcond"] = ss.rcond;
            certs["max_population"] = ss.max_population;
            certs["warnings"] = ss.warnings;
        } else {
            const auto o = integrate_collective(cm, v, config_spectrum(cfg));
            outputs["Gamma_C"] = o.Gamma_C;
            outputs["Gamma_C_g"] = o.Gamma_C_g;
            outputs["Gamma_C_gR"] = o.Gamma_C_gR;
            outputs["Gamma_C_gL"] = o.Gamma_C_gL;
            outputs["Gamma_C_u"] = o.Gamma_C_u;
            outputs["beta_C"] = o.beta_C;
            outputs["C_C"] = o.C_C;
            certs["delta_max"] = o.delta_max;
            certs["tail_fraction"] = o.tail_fraction;
            certs["tail_error_relative"] = o.tail_error_relative;
            certs["quad_error_relative"] = o.quad_error_relative;
            certs["evaluations"] = o.evaluations;
            certs["resolved"] = o.resolved;
            certs["warnings"] = o.warnings;
        }
    }
    rec["outputs"] = outputs;
    rec["certificates"] = certs;
    return rec;
}

}  // namespace fiberqed
