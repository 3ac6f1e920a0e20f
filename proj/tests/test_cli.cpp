#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "fgsim/cli.hpp"

namespace {

using namespace fgsim;
namespace fs = std::filesystem;

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path d = fs::path(FGSIM_BINARY_DIR) / "cli_test_out" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

RunConfig quick_config(const fs::path& out)
{
    RunConfig c;
    c.modes = 16;
    c.galerkin_n = 4;
    c.steps_per_interval = 10;
    c.mc_samples = 4;
    c.m_values = {2, 4};
    c.n_values = {2, 4};
    c.n_ref = 16;
    c.out_dir = out.string();
    return c;
}

TEST(Config, ParsesSectionsAndLists)
{
    std::istringstream is("[problem]\nalpha = 1.7\nimpulse_onsets = 0.02\nimpulse_ends = 0.03\n"
                          "[numerics]\nmodes = 8\ngalerkin_n = 4\n[experiment]\nname = converge\nm_values = 1 2\n");
    const auto c = load_config(is);
    EXPECT_EQ(c.alpha, 1.7);
    EXPECT_EQ(c.impulse_onsets, std::vector<double>{0.02});
    EXPECT_EQ(c.modes, 8u);
    EXPECT_EQ(c.experiment, "converge");
    EXPECT_EQ(c.m_values, (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(c.beta, RunConfig{}.beta);
}

TEST(Config, RejectsBadInput)
{
    auto parse = [](const std::string& s) {
        std::istringstream is(s);
        return load_config(is);
    };
    EXPECT_THROW(parse("[problem]\nalpah = 1.5\n"), ConfigError);
    EXPECT_THROW(parse("[problem]\nalpha = fast\n"), ConfigError);
    EXPECT_THROW(parse("[numerics]\nmodes = -3\n"), ConfigError);
    EXPECT_THROW(parse("[numerics]\nmodes = 4\ngalerkin_n = 8\n"), ConfigError);
    EXPECT_THROW(parse("[experiment]\nname = dance\n"), ConfigError);
    EXPECT_THROW(parse("[problem]\nimpulse_onsets = 0.1 0.2\nimpulse_ends = 0.15\n"), ConfigError);
    EXPECT_THROW(load_config_file("/nonexistent/fgsim.ini"), ConfigError);
}

TEST(Config, RoundTripsThroughIni)
{
    RunConfig c;
    c.alpha = 1.2345678901234567;
    c.impulse_onsets = {0.02};
    c.impulse_ends = {0.025};
    c.n_values = {3, 5};
    std::ostringstream os;
    boost::property_tree::ini_parser::write_ini(os, config_to_ptree(c));
    std::istringstream is(os.str());
    const auto back = load_config(is);
    EXPECT_EQ(back.alpha, c.alpha);
    EXPECT_EQ(back.impulse_onsets, c.impulse_onsets);
    EXPECT_EQ(back.n_values, c.n_values);
}

TEST(Run, ConstantsExperimentReportsDeclaredValues)
{
    const auto dir = scratch_dir("constants");
    auto c = quick_config(dir);
    c.experiment = "constants";
    c.impulse_onsets = {0.02};
    c.impulse_ends = {0.025};
    std::ostringstream log;
    EXPECT_EQ(run(c, false, log), exit_ok);
    const auto text = slurp(dir / "constants.csv");
    EXPECT_NE(text.find("D_h1_1,0.1111111111111111"), std::string::npos);
    EXPECT_NE(text.find("D_h2_1,0.1111111111111111"), std::string::npos);
    // the manifest is itself a loadable config once the report sections are dropped
    auto pt = [&] {
        boost::property_tree::ptree t;
        boost::property_tree::ini_parser::read_ini((dir / "manifest.ini").string(), t);
        t.erase("ledger");
        t.erase("feasibility");
        return t;
    }();
    const auto back = config_from_ptree(pt);
    EXPECT_EQ(back.impulse_onsets, c.impulse_onsets);
}

TEST(Run, ExitCodes)
{
    const auto dir = scratch_dir("codes");
    std::ostringstream log;
    auto c = quick_config(dir);
    c.experiment = "nope";
    EXPECT_EQ(run(c, false, log), exit_config);
    c = quick_config(dir);
    c.alpha = 2.5;
    EXPECT_EQ(run(c, false, log), exit_config);
    // any impulse makes 2 Q_1 >= 1 for the heat example
    c = quick_config(dir);
    c.experiment = "constants";
    c.impulse_onsets = {0.02};
    c.impulse_ends = {0.03};
    EXPECT_EQ(run(c, true, log), exit_infeasible);
    EXPECT_EQ(run(c, false, log), exit_ok);
    c = quick_config(dir);
    c.picard_max_iter = 1;
    c.picard_tol = 1e-15;
    EXPECT_EQ(run(c, false, log), exit_numerical);
}

TEST(Run, MlcheckPasses)
{
    const auto dir = scratch_dir("mlcheck");
    auto c = quick_config(dir);
    c.experiment = "mlcheck";
    std::ostringstream log;
    EXPECT_EQ(run(c, false, log), exit_ok);
    EXPECT_NE(slurp(dir / "mlcheck.csv").find(",1\n"), std::string::npos);
}

TEST(Run, ScalarBuiltin)
{
    const auto dir = scratch_dir("scalar");
    auto c = quick_config(dir);
    c.builtin = "scalar6";
    c.modes = 1;
    c.galerkin_n = 1;
    c.horizon = 1.0;
    c.impulse_onsets = {0.3};
    c.impulse_ends = {0.5};
    std::ostringstream log;
    EXPECT_EQ(run(c, false, log), exit_ok) << log.str();
    EXPECT_TRUE(fs::exists(dir / "solution.csv"));
}

TEST(Executable, ByteIdenticalReruns)
{
    const auto root = scratch_dir("exe");
    const fs::path cfg = root / "run.ini";
    {
        std::ofstream os(cfg);
        os << "[numerics]\nmodes = 16\ngalerkin_n = 4\nsteps_per_interval = 10\nmc_samples = 6\n"
              "[experiment]\nname = converge\nm_values = 2 4\n";
    }
    for (const char* tag : {"a", "b"}) {
        const std::string cmd = std::string("\"") + FGSIM_CLI_PATH + "\" --config \"" + cfg.string() + "\" --seed 5 --out \"" +
                                (root / tag).string() + "\" 2>/dev/null";
        ASSERT_EQ(std::system(cmd.c_str()), 0);
    }
    const auto a = slurp(root / "a" / "convergence.csv");
    ASSERT_FALSE(a.empty());
    EXPECT_EQ(a, slurp(root / "b" / "convergence.csv"));
    const std::string bad = std::string("\"") + FGSIM_CLI_PATH + "\" --config /nonexistent.ini 2>/dev/null";
    const int rc = std::system(bad.c_str());
    EXPECT_EQ(WEXITSTATUS(rc), 2);
}

} // namespace
