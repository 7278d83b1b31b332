#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "helpers.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kPanel = std::string(CORRNET_DATA_DIR) + "/synthetic_panel.csv";
const std::string kAttrs = std::string(CORRNET_DATA_DIR) + "/country_attributes.csv";

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
    static int counter = 0;
    const auto tag = "cli_run_" + std::to_string(counter++);
    const auto out_file = testutil::test_dir() / (tag + ".out");
    const auto err_file = testutil::test_dir() / (tag + ".err");
    const std::string cmd = (env.empty() ? "" : env + " ") + std::string(CORRNET_CLI_PATH) +
                            " " + args + " >" + out_file.string() + " 2>" + err_file.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
    r.out = testutil::read_file(out_file);
    r.err = testutil::read_file(err_file);
    return r;
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = testutil::test_dir() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

long line_count(const std::string& text) {
    return std::count(text.begin(), text.end(), '\n');
}

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

nlohmann::json load_json(const fs::path& path) {
    return nlohmann::json::parse(testutil::read_file(path));
}

}  // namespace

TEST_CASE("cli help") {
    const auto r = run_cli("--help");
    CHECK(r.code == 0);
    CHECK(r.out.find("summary") != std::string::npos);
    CHECK(r.out.find("ergm") != std::string::npos);
}

TEST_CASE("cli summary") {
    const auto dir = fresh_dir("cli_summary");
    const auto r = run_cli("summary --input " + kPanel + " --out " + dir.string());
    REQUIRE(r.code == 0);
    const auto text = testutil::read_file(dir / "summary.csv");
    CHECK(line_count(text) == 19);  // provenance + header + 17 entities
    CHECK(first_line(text).rfind("# corrnet summary config=", 0) == 0);
    CHECK(first_line(text).find("version=0.1.0") != std::string::npos);
    CHECK(text.find("\nname,min,max,mean,variance,skewness,kurtosis,ac1,ac2_1\n") !=
          std::string::npos);
    CHECK(text.find("\nIceland,") != std::string::npos);
}

TEST_CASE("cli rolling") {
    const auto dir = fresh_dir("cli_rolling");
    const auto r = run_cli("rolling --input " + kPanel + " --out " + dir.string());
    REQUIRE(r.code == 0);
    const auto text = testutil::read_file(dir / "rolling.csv");
    CHECK(line_count(text) == 17);  // provenance + header + 15 windows
    CHECK(text.find("mst_length") != std::string::npos);
    CHECK(text.find("tmfg_mol") != std::string::npos);

    const auto one = fresh_dir("cli_rolling_one");
    const auto r2 = run_cli("rolling --input " + kPanel + " --methods mst --out " +
                            one.string());
    REQUIRE(r2.code == 0);
    const auto text2 = testutil::read_file(one / "rolling.csv");
    CHECK(text2.find("mst_length") != std::string::npos);
    CHECK(text2.find("mast_") == std::string::npos);
    CHECK(text2.find("tmfg_") == std::string::npos);
}

TEST_CASE("cli window and step flags") {
    const auto dir = fresh_dir("cli_windowstep");
    const auto r = run_cli("rolling --input " + kPanel +
                           " --window 100 --step 50 --methods ag --out " + dir.string());
    REQUIRE(r.code == 0);
    CHECK(line_count(testutil::read_file(dir / "rolling.csv")) == 6);  // 4 windows
}

TEST_CASE("cli output bytes do not depend on the destination") {
    const auto a = fresh_dir("cli_bytes_a");
    const auto b = fresh_dir("cli_bytes_b");
    const auto args = "rolling --input " + kPanel + " --methods mst,ag --window 150 ";
    REQUIRE(run_cli(args + "--out " + a.string()).code == 0);
    REQUIRE(run_cli(args + "--out " + b.string()).code == 0);
    const auto ta = testutil::read_file(a / "rolling.csv");
    CHECK(ta == testutil::read_file(b / "rolling.csv"));
    CHECK(!ta.empty());
}

TEST_CASE("cli provenance digest tracks analysis parameters") {
    const auto a = fresh_dir("cli_digest_a");
    const auto b = fresh_dir("cli_digest_b");
    REQUIRE(run_cli("rolling --input " + kPanel + " --methods mst --step 10 --out " +
                    a.string())
                .code == 0);
    REQUIRE(run_cli("rolling --input " + kPanel + " --methods mst --step 20 --out " +
                    b.string())
                .code == 0);
    CHECK(first_line(testutil::read_file(a / "rolling.csv")) !=
          first_line(testutil::read_file(b / "rolling.csv")));
}

TEST_CASE("cli network outputs") {
    const auto dir = fresh_dir("cli_network");
    const auto r = run_cli("network --input " + kPanel + " --out " + dir.string());
    REQUIRE(r.code == 0);
    for (const auto* m : {"mst", "mast", "ag", "tmfg"}) {
        CHECK(fs::exists(dir / ("network_" + std::string(m) + "_2020-12-29.csv")));
        CHECK(fs::exists(dir / ("network_" + std::string(m) + "_2020-12-29.json")));
    }
    const auto tmfg = testutil::read_file(dir / "network_tmfg_2020-12-29.csv");
    CHECK(line_count(tmfg) == 47);  // provenance + header + 3(n-2) edges
    CHECK(tmfg.find("source,target,distance,method,window_end") != std::string::npos);

    const auto stats = load_json(dir / "network_stats_2020-12-29.json");
    CHECK(stats.contains("provenance"));
    CHECK(stats["window_end"] == "2020-12-29");
    CHECK(stats["methods"]["tmfg"]["edge_count"] == 45);
    CHECK(stats["methods"]["mst"]["edge_count"] == 16);
    CHECK(stats["names"].size() == 17);

    const auto edges = load_json(dir / "network_mst_2020-12-29.json");
    CHECK(edges.contains("provenance"));
    CHECK(edges["edges"].size() == 16);

    // No leftover staging files from the atomic writes.
    for (const auto& entry : fs::directory_iterator(dir))
        CHECK(entry.path().extension() != ".tmp");
}

TEST_CASE("cli network honours an explicit window end") {
    const auto roll = fresh_dir("cli_netroll");
    REQUIRE(run_cli("rolling --input " + kPanel + " --methods mst --out " + roll.string())
                .code == 0);
    const auto text = testutil::read_file(roll / "rolling.csv");
    // first data row, first column: the earliest window end
    const auto row = text.substr(text.find('\n', text.find('\n') + 1) + 1);
    const auto end = row.substr(0, row.find(','));
    REQUIRE(end.size() == 10);

    const auto dir = fresh_dir("cli_netexplicit");
    const auto r = run_cli("network --input " + kPanel + " --methods mst --window-end " +
                           end + " --out " + dir.string());
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / ("network_mst_" + end + ".csv")));

    const auto bad = run_cli("network --input " + kPanel + " --window-end 1999-01-01 --out " +
                             dir.string());
    CHECK(bad.code == 2);
    CHECK(bad.err.find("available window ends") != std::string::npos);
    CHECK(bad.err.find(end) != std::string::npos);
}

TEST_CASE("cli ergm") {
    const auto dir = fresh_dir("cli_ergm");
    const auto r = run_cli("ergm --input " + kPanel + " --attrs " + kAttrs +
                           " --method tmfg --nsim 200 --seed 3 --out " + dir.string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("ERGM fit: tmfg, window ending 2020-12-29") != std::string::npos);
    CHECK(r.out.find("edges") != std::string::npos);

    const auto report = load_json(dir / "ergm_tmfg_2020-12-29.json");
    CHECK(report.contains("provenance"));
    CHECK(report["method"] == "tmfg");
    CHECK(report["window_end"] == "2020-12-29");
    CHECK(report["converged"] == true);
    CHECK(report["spec"].size() == 8);
    CHECK(report["theta"].size() == 8);
    CHECK(report.contains("gof"));
    CHECK(report["gof"].size() == 8);
}

TEST_CASE("cli ergm edges-only recovers the density logit") {
    const auto dir = fresh_dir("cli_ergm_edges");
    const auto r = run_cli("ergm --input " + kPanel + " --attrs " + kAttrs +
                           " --method mst --edges-only --nsim 0 --out " + dir.string());
    REQUIRE(r.code == 0);
    const auto report = load_json(dir / "ergm_mst_2020-12-29.json");
    REQUIRE(report["theta"].size() == 1);
    const double theta = report["theta"][0];
    CHECK(theta == doctest::Approx(-2.0149030205422647).epsilon(1e-8));
    CHECK_FALSE(report.contains("gof"));  // --nsim 0 skips simulation
}

TEST_CASE("cli ergm reports non-convergence with exit 3") {
    // Flag only the hub of the maximum spanning tree: every observed edge
    // then touches the flagged group while no absent dyad does, so the
    // factor coefficient has no finite optimum.
    auto content = testutil::read_file(kAttrs);
    for (const auto* giips : {"Greece", "Ireland", "Italy", "Portugal", "Spain"}) {
        const auto tag = std::string(giips) + ",1";
        content.replace(content.find(tag), tag.size(), std::string(giips) + ",0");
    }
    const auto ice = content.find("Iceland,0");
    content.replace(ice, 9, "Iceland,1");
    const auto crafted = testutil::write_file("cli_sep_attrs.csv", content);

    const auto dir = fresh_dir("cli_ergm_sep");
    const auto r = run_cli("ergm --input " + kPanel + " --attrs " + crafted.string() +
                           " --method mast --out " + dir.string());
    CHECK(r.code == 3);
    CHECK(r.err.find("converge") != std::string::npos);
    const auto report = load_json(dir / "ergm_mast_2020-12-29.json");
    CHECK(report["converged"] == false);
}

TEST_CASE("cli usage errors exit with 1") {
    const auto dir = fresh_dir("cli_usage");
    CHECK(run_cli("ergm --input " + kPanel + " --out " + dir.string()).code == 1);
    CHECK(run_cli("ergm --input " + kPanel + " --attrs " + kAttrs +
                  " --method pmfg --out " + dir.string())
              .code == 1);
    CHECK(run_cli("rolling --input " + kPanel + " --corr spearman --out " + dir.string())
              .code == 1);
    CHECK(run_cli("rolling --input " + kPanel + " --methods mst,mst --out " + dir.string())
              .code == 1);
    CHECK(run_cli("").code == 1);  // a subcommand is required
}

TEST_CASE("cli data errors exit with 2") {
    const auto dir = fresh_dir("cli_data_err");
    const auto r = run_cli("summary --input /nonexistent/panel.csv --out " + dir.string());
    CHECK(r.code == 2);
    CHECK(!r.err.empty());

    // A window longer than the panel is a data problem, not a usage one.
    CHECK(run_cli("rolling --input " + kPanel + " --window 500 --out " + dir.string())
              .code == 2);
}

TEST_CASE("cli falls back to CORRNET_OUT") {
    const auto dir = fresh_dir("cli_env_out");
    const auto r = run_cli("summary --input " + kPanel,
                           "CORRNET_OUT=" + dir.string());
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "summary.csv"));
}
