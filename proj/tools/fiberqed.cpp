// Command-line front end: figure scenarios and single computations.
//
//   fiberqed <fig2|fig3|fig4|fig5|compute> [--config FILE] [--set KEY=VALUE]...
//            [--out DIR] [--format csv|json] [--threads N] [--resume] [--quantity SEL]
//
// Exit codes: 0 success, 1 computational failure, 2 usage or config error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fiberqed/scenarios.hpp"

namespace {

using namespace fiberqed;

struct Args {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir = ".";
    std::string format;
    int threads = -1;
    bool resume = false;
    std::string quantity;
};

RunConfig build_config(const Args& args) {
    RunConfig cfg = args.config_path.empty() ? RunConfig{} : load_config(args.config_path);
    for (const auto& kv : args.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
        set_key(cfg, config_detail::trim(kv.substr(0, eq)), config_detail::trim(kv.substr(eq + 1)));
    }
    if (!args.format.empty()) cfg.format = args.format;
    if (args.threads >= 0) cfg.threads = args.threads;
    validate_config(cfg);
    return cfg;
}

int run(const std::string& command, const Args& args) {
    RunConfig cfg;
    try {
        cfg = build_config(args);
    } catch (const ConfigError& e) {
        std::cerr << "fiberqed: " << e.what() << "\n";
        return 2;
    }

    if (command == "compute") {
        try {
            std::cout << cmd_compute(cfg, args.quantity).dump(2) << "\n";
            return 0;
        } catch (const ConfigError& e) {
            std::cerr << "fiberqed: " << e.what() << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "fiberqed: computation failed: " << e.what() << "\n";
            return 1;
        }
    }

    try {
        OutputSet out(args.out_dir, cfg.format);
        const CommandOptions opt{args.resume};
        CommandReport report;
        if (command == "fig2") report = cmd_fig2(cfg, out, opt);
        else if (command == "fig3") report = cmd_fig3(cfg, out, opt);
        else if (command == "fig4") report = cmd_fig4(cfg, out, opt);
        else report = cmd_fig5(cfg, out, opt);
        out.commit();
        for (const auto& w : report.warnings) std::cerr << "fiberqed: warning: " << w << "\n";
        for (const auto& f : out.files()) std::cout << f.string() << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "fiberqed: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "fiberqed: " << command << " failed: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Atom chains beside an optical nanofiber: collective decay and chiral emission"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", std::string(fiberqed::version));

    Args args;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "flat key = value config file")->check(CLI::ExistingFile);
        sub->add_option("--set", args.sets, "override one config key (KEY=VALUE), repeatable");
        sub->add_option("--threads", args.threads, "worker threads (0: FIBERQED_THREADS or all cores)")
            ->check(CLI::NonNegativeNumber);
    };
    for (const char* name : {"fig2", "fig3", "fig4", "fig5"}) {
        auto* sub = app.add_subcommand(name, std::string("data tables for ") + name);
        common(sub);
        sub->add_option("--out", args.out_dir, "output directory");
        sub->add_option("--format", args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--resume", args.resume, "continue sweeps from checkpoints in the output directory");
    }
    auto* compute = app.add_subcommand("compute", "one pipeline stage as a JSON record on stdout");
    common(compute);
    compute->add_option("--quantity", args.quantity, "beta_f, gamma_matrix, modes, spectrum, collective, single_atom")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return run(app.get_subcommands().front()->get_name(), args);
}
