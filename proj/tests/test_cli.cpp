#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(MHB_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string problem(const char* name) { return std::string(MHB_DATA_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Cli, SolveSecondBestLogExample) {
    const auto r = run("solve-second-best --problem " + problem("two_state_log.json"));
    ASSERT_EQ(r.status, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["wages"][0].get<double>(), 0.6065, 1e-4);
    EXPECT_NEAR(j["wages"][1].get<double>(), 4.4817, 1e-4);
    EXPECT_TRUE(j["incentive_constraints"][0]["binding"].get<bool>());
    EXPECT_EQ(j["tol"].get<double>(), 1e-9);
}

TEST(Cli, MlrpVerdict) {
    const auto r = run("mlrp --f 0.1,0.3,0.6 --g 0.6,0.3,0.1");
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(nlohmann::json::parse(r.out)["order"], "FDominatesG");
}

TEST(Cli, Iterate4PrintsSmallDelta) {
    const auto r = run("iterate4 --problem " + problem("four_state_cara.json"));
    ASSERT_EQ(r.status, 0);
    EXPECT_LE(nlohmann::json::parse(r.out)["cost_delta"].get<double>(), 1e-8);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("solve-first-best --problem /nonexistent.json").status, 2);
    EXPECT_EQ(run("compstat --problem " + problem("cara_three_state.json") + " --states 1,1 --eps-grid 0,0.1").status,
              2);
    EXPECT_EQ(run("compstat --problem " + problem("cara_three_state.json") + " --states 2,3 --eps-grid 0,0.9").status,
              2);
    EXPECT_EQ(run("detect-regime --problem " + problem("regime_flip.json") + " --states 2,1 --eps-range 0,0.35")
                  .status,
              1);
    EXPECT_EQ(run("no-such-command").status, 2);
    EXPECT_EQ(run("solve-first-best --problem " + problem("two_state_log.json") + " --format csv").status, 2);
}

TEST(Cli, OutFileAndSidecar) {
    const fs::path dir = fs::temp_directory_path() / "mhb_cli_test";
    fs::create_directories(dir);
    const fs::path out = dir / "sweep.csv";
    const auto r = run("compstat --problem " + problem("cara_three_state.json") +
                       " --states 2,3 --eps-grid 0:0.2:5 --format csv --out " + out.string());
    ASSERT_EQ(r.status, 0);
    EXPECT_TRUE(r.out.empty());
    const auto csv = slurp(out);
    EXPECT_EQ(csv.substr(0, 16), "eps,w_1,w_2,w_3,");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
    const auto meta = nlohmann::json::parse(slurp(out.string() + ".meta.json"));
    EXPECT_EQ(meta["command"], "compstat");
    fs::remove_all(dir);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
    for (const auto& entry : fs::directory_iterator(MHB_DATA_DIR)) {
        const std::string p = entry.path().string();
        for (const char* cmd : {"solve-first-best", "mlrp"}) {
            const auto a = run(std::string(cmd) + " --problem " + p);
            const auto b = run(std::string(cmd) + " --problem " + p);
            EXPECT_EQ(a.status, b.status) << p;
            EXPECT_EQ(a.out, b.out) << p;
            EXPECT_FALSE(a.out.empty()) << p;
        }
    }
}
