#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "fiberqed/scenarios.hpp"

namespace fs = std::filesystem;

namespace {

const std::string cli = FIBERQED_CLI;

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    Run r;
    const std::string cmd = cli + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("fiberqed_test_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Cli, ComputeBetaF) {
    const auto r = run("compute --quantity beta_f");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["selector"], "beta_f");
    EXPECT_TRUE(j["outputs"]["single_mode"].get<bool>());
    const double beta = j["outputs"]["beta_f"], lf = j["outputs"]["lambda_f"];
    EXPECT_NEAR(beta * lf, 2 * 3.141592653589793, 1e-12);
    EXPECT_GT(beta, 2 * 3.141592653589793 / 1e-6);
    EXPECT_TRUE(j["inputs"].contains("lambda_nm"));
}

TEST(Cli, ComputeSingleAtomAtWorkingPoint) {
    const auto r = run("compute --quantity single_atom");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["outputs"]["C"].get<double>(), 0.72, 0.02);
    EXPECT_TRUE(j["certificates"]["radiation"]["quad_converged"].get<bool>());
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("compute --quantity nonsense").code, 2);
    EXPECT_EQ(run("compute").code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("fig9").code, 2);
    EXPECT_EQ(run("fig2 --format xml").code, 2);
    EXPECT_EQ(run("compute --quantity beta_f --set nope=1").code, 2);
    EXPECT_EQ(run("compute --quantity beta_f --set N=abc").code, 2);
    // Multimode fiber: the guided-mode solver refuses.
    EXPECT_EQ(run("compute --quantity beta_f --set r_f_nm=900").code, 1);
    EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, MalformedConfigWritesNothing) {
    const auto dir = scratch("malformed");
    const auto cfg = fs::temp_directory_path() / "fiberqed_test_cli_bad.cfg";
    std::ofstream(cfg) << "N = 15\nlattice = 3\n";
    EXPECT_EQ(run("fig2 --config " + cfg.string() + " --out " + dir.string()).code, 2);
    EXPECT_FALSE(fs::exists(dir) && !fs::is_empty(dir));
    fs::remove(cfg);
}

TEST(Cli, FailedFigureLeavesNoFiles) {
    // Profile lattice constant below zero passes parsing but fails in the
    // chain validation after the rate tables were written.
    const auto dir = scratch("partial");
    const auto r = run("fig2 --set fig2_a_points=3 --set fig2_profile_a_nm=-5 --out " + dir.string());
    EXPECT_EQ(r.code, 1);
    EXPECT_TRUE(!fs::exists(dir) || fs::is_empty(dir));
}

TEST(Cli, Fig2DeterministicAndThreadIndependent) {
    const auto a = scratch("det_a"), b = scratch("det_b");
    const std::string common = "fig2 --set fig2_a_points=8 --set N=6";
    ASSERT_EQ(run(common + " --threads 1 --out " + a.string()).code, 0);
    ASSERT_EQ(run(common + " --threads 3 --out " + b.string()).code, 0);
    int files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        ++files;
        EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path();
    }
    EXPECT_EQ(files, 5);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Cli, JsonFormatAndNoCheckpointLeft) {
    const auto dir = scratch("json");
    ASSERT_EQ(run("fig5 --format json --set fig5_theta_z_points=3 --set fig5_theta_x_points=3 --out " +
                  dir.string())
                  .code,
              0);
    const auto j = nlohmann::json::parse(slurp(dir / "fig5bcd_rotation_map.json"));
    EXPECT_EQ(j["rows"].size(), 9u);
    EXPECT_EQ(j["metadata"]["config.fig5_r_f_over_lambda"], "0.22");
    EXPECT_FALSE(fs::exists(dir / "fig5bcd_rotation_map.checkpoint"));
    fs::remove_all(dir);
}

TEST(Cli, ResumeUsesMatchingCheckpointOnly) {
    const auto ref = scratch("resume_ref"), dir = scratch("resume");
    const std::string sets = " --set fig5_theta_z_points=4 --set fig5_theta_x_points=3";
    ASSERT_EQ(run("fig5" + sets + " --out " + ref.string()).code, 0);
    const std::string table = slurp(ref / "fig5bcd_rotation_map.csv");

    fiberqed::RunConfig cfg;
    cfg.fig5_theta_z_points = 4;
    cfg.fig5_theta_x_points = 3;
    const std::string tag = fiberqed::scenario_detail::config_tag(cfg, "fig5bcd_rotation_map");
    // Point 0 carries a planted value, so using it proves it was not recomputed.
    auto plant = [&](const std::string& header) {
        fs::create_directories(dir);
        std::ofstream(dir / "fig5bcd_rotation_map.checkpoint")
            << header << "\n0,7,7,7,7,7,7,7,ok\n5,1,2";  // last line cut short
    };

    plant("# " + tag);
    ASSERT_EQ(run("fig5 --resume" + sets + " --out " + dir.string()).code, 0);
    const std::string resumed = slurp(dir / "fig5bcd_rotation_map.csv");
    EXPECT_NE(resumed, table);
    EXPECT_NE(resumed.find("\n0,0,7,7,7,7,7,7,7,ok\n"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "fig5bcd_rotation_map.checkpoint"));

    plant("# another configuration");
    ASSERT_EQ(run("fig5 --resume" + sets + " --out " + dir.string()).code, 0);
    EXPECT_EQ(slurp(dir / "fig5bcd_rotation_map.csv"), table);

    plant("# " + tag);
    ASSERT_EQ(run("fig5" + sets + " --out " + dir.string()).code, 0);  // no --resume
    EXPECT_EQ(slurp(dir / "fig5bcd_rotation_map.csv"), table);
    fs::remove_all(ref);
    fs::remove_all(dir);
}
