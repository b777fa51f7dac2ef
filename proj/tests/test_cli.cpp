#include "photonwf/cli.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result call(std::vector<std::string> args) {
    args.insert(args.begin(), "photonwf");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = photonwf::cli::run(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
protected:
    fs::path dir;
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("photonwf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string config(const std::string& name, const std::string& body) {
        const auto p = dir / name;
        std::ofstream(p) << body;
        return p.string();
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

const char* kNeg = R"({"scenario": "two-mode-negativity", "modes.k1": 1.0, "modes.k2": 4.0, "modes.volume": 2.0, "alpha": 0.5})";

}  // namespace

TEST_F(CliTest, VerifyPasses) {
    const auto r = call({"verify", "--config", config("v.json", "{}"), "--out", (dir / "o").string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "o" / "verify_summary.json"));
    const auto s = nlohmann::json::parse(slurp(dir / "o" / "verify_summary.json"));
    EXPECT_TRUE(s.contains("config_hash"));
    for (const auto& [k, v] : s.items()) EXPECT_FALSE(v.is_object() || v.is_array()) << k;
}

TEST_F(CliTest, CotAblationFailsWithNamedCheck) {
    const auto r = call({"verify", "--config", config("v.json", "{}"), "--ablate", "cot"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("check failed: "), std::string::npos) << r.err;
}

TEST_F(CliTest, UsageErrors) {
    const auto out = dir / "o";
    EXPECT_EQ(call({"verify", "--config", config("bad.json", "{\"tol.exact\": "), "--out", out.string()}).code, 2);
    EXPECT_FALSE(fs::exists(out));
    EXPECT_EQ(call({"run", "--config", config("u.json", R"({"scenario": "two-photon", "bogus": 1})"), "--out", out.string()}).code, 2);
    EXPECT_FALSE(fs::exists(out));
    EXPECT_EQ(call({"run", "--config", config("t.json", R"({"scenario": "two-mode-negativity", "modes.k1": "one"})")}).code, 2);
    EXPECT_EQ(call({"run", "--config", config("s.json", R"({"scenario": "nope"})")}).code, 2);
    EXPECT_EQ(call({"run", "--config", config("n.json", "{}")}).code, 2);
    EXPECT_EQ(call({"verify", "--config", config("v.json", "{}"), "--ablate", "everything"}).code, 2);
    EXPECT_EQ(call({"run", "--config", config("w.json", kNeg), "--ablate", "cot"}).code, 2);
    EXPECT_EQ(call({"verify", "--config", (dir / "missing.json").string()}).code, 2);
    EXPECT_EQ(call({"verify"}).code, 2);
    EXPECT_EQ(call({}).code, 2);
    EXPECT_EQ(call({"--help"}).code, 0);
}

TEST_F(CliTest, NegativityScenarioOutputs) {
    const auto r = call({"run", "--config", config("n.json", kNeg), "--out", (dir / "o").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto s = nlohmann::json::parse(slurp(dir / "o" / "two-mode-negativity_summary.json"));
    EXPECT_NEAR(s["min_n_half"].get<double>(), -0.25 / 2.0, 1e-12);
    EXPECT_EQ(s["units"], "natural");

    const std::string csv = slurp(dir / "o" / "two-mode-negativity_profile.csv");
    std::istringstream in(csv);
    std::string line;
    bool hash = false, units = false;
    while (std::getline(in, line) && line[0] == '#') {
        hash |= line.find("config_hash: " + s["config_hash"].get<std::string>()) != std::string::npos;
        units |= line.find("natural") != std::string::npos;
    }
    EXPECT_TRUE(hash);
    EXPECT_TRUE(units);
    EXPECT_EQ(line, "z,n_alpha,n_lp");
    std::getline(in, line);
    std::getline(in, line);
    // round-trip precision
    const std::string first = line.substr(0, line.find(','));
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", std::stod(first));
    EXPECT_EQ(first, buf);
}

TEST_F(CliTest, OutputsAreDeterministic) {
    const auto cfg = config("n.json", kNeg);
    ASSERT_EQ(call({"run", "--config", cfg, "--out", (dir / "a").string()}).code, 0);
    ASSERT_EQ(call({"run", "--config", cfg, "--out", (dir / "b").string()}).code, 0);
    int files = 0;
    for (const auto& e : fs::directory_iterator(dir / "a")) {
        EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / e.path().filename())) << e.path();
        ++files;
    }
    EXPECT_EQ(files, 2);
}

TEST_F(CliTest, ConfigHashTracksContent) {
    const auto a = nlohmann::json::parse(call({"run", "--config", config("a.json", kNeg)}).out);
    const auto b = nlohmann::json::parse(
        call({"run", "--config", config("b.json", R"({"scenario": "two-mode-negativity", "modes.volume": 3.0})")}).out);
    EXPECT_NE(a["config_hash"], b["config_hash"]);
    const auto a2 = nlohmann::json::parse(call({"run", "--config", config("c.json", kNeg)}).out);
    EXPECT_EQ(a["config_hash"], a2["config_hash"]);
}

TEST_F(CliTest, ScenariosPass) {
    for (const char* cfg : {R"({"scenario": "beam-am"})", R"({"scenario": "two-photon"})",
                            R"({"scenario": "coherent-vs-one-photon"})"}) {
        const auto r = call({"run", "--config", config("s.json", cfg)});
        EXPECT_EQ(r.code, 0) << cfg << "\n" << r.err;
    }
}

TEST_F(CliTest, BinaryExitCodes) {
    const std::string exe = PHOTONWF_CLI_PATH;
    const auto run = [&](const std::string& args) {
        const int s = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    EXPECT_EQ(run("run --config " + config("n.json", kNeg)), 0);
    EXPECT_EQ(run("verify --config " + config("v.json", "{}") + " --ablate spin"), 1);
    EXPECT_EQ(run("run --config " + config("bad.json", "{oops")), 2);
    EXPECT_EQ(run(""), 2);
}
