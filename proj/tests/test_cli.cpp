// End-to-end checks of the rhlab command-line tool: exit codes, manifest
// handling, output files, and byte-for-byte reproducibility. The binary path
// comes in through RHLAB_CLI; scratch files live under the test working
// directory.

#include <sys/wait.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rhlab/bfa.hpp"
#include "rhlab/classifier.hpp"
#include "rhlab/kvconfig.hpp"
#include "rhlab/profiler.hpp"

#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace rhlab;

namespace {

/// Runs the CLI with `args`, capturing stdout/stderr; returns the exit code.
int run(const std::string& args, const std::string& stderr_path = "cli_stderr.txt") {
    const std::string cmd =
        std::string(RHLAB_CLI) + " " + args + " >cli_stdout.txt 2>" + stderr_path;
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

bool contains(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

void reset_dir(const std::string& dir) {
    fs::remove_all(dir);
    fs::create_directories(dir);
}

/// Shared small-device sweep; victim row 1 keeps flips inside the footprint
/// of the toy network so attack runs have bits to work with.
const char* kBaseFlags =
    "--vendor mf-A --rows 64 --cols 256 --trials 2 --hc-levels 200000,1000000 --victims 1";

void profile_base(const std::string& out) {
    CHECK_EQ(run(std::string("profile ") + kBaseFlags + " --out " + out), 0);
}

// --- suites -----------------------------------------------------------

void usage_errors() {
    testing::begin("usage errors");
    CHECK_EQ(run(""), 1);                          // a subcommand is required
    CHECK_EQ(run("hammer"), 1);                    // unknown subcommand
    CHECK_EQ(run("profile --bogus-flag 3"), 1);    // unknown flag
    CHECK_EQ(run("profile --rows notanumber"), 1); // flag type error
    CHECK_EQ(run("--help"), 0);
    CHECK_EQ(run("profile --help"), 0);
}

void profile_outputs() {
    testing::begin("profile outputs");
    reset_dir("cli_base");
    profile_base("cli_base");

    const ProfileResult result = load_result("cli_base/result.txt");
    CHECK_EQ(result.profile.name, std::string("mf-A"));
    CHECK_EQ(result.device.rows, 64u);
    CHECK_EQ(result.device.cols, 256u);
    CHECK_EQ(result.trials, 2u);
    CHECK_EQ(result.models.size(), std::size_t{3});
    CHECK(result.hc_levels == (std::vector<std::uint64_t>{200000, 1000000}));
    CHECK(result.victim_rows == (std::vector<std::uint32_t>{1}));

    CHECK_EQ(first_line(slurp("cli_base/curves.csv")), std::string("model,hc,mean,min,max"));
    for (const char* model : {"sg", "vc", "db"}) {
        const std::string path = std::string("cli_base/persistence-") + model + ".csv";
        CHECK(fs::exists(path));
        CHECK_EQ(first_line(slurp(path)), std::string("row,col,count,bucket"));
    }

    // A single hc level carries no persistence information, so no CSVs.
    reset_dir("cli_single");
    CHECK_EQ(run("profile --vendor mf-A --rows 64 --cols 256 --trials 1 --hc-levels 1000000 "
                 "--victims 1 --out cli_single"),
             0);
    CHECK(!fs::exists("cli_single/persistence-sg.csv"));

    // hc 0 never reaches any threshold: the whole curve is zero.
    reset_dir("cli_zero");
    CHECK_EQ(run("profile --vendor mf-A --rows 64 --cols 256 --trials 1 --hc-levels 0 "
                 "--victims 1 --out cli_zero"),
             0);
    const ProfileResult zero = load_result("cli_zero/result.txt");
    for (const FlipRecord& record : zero.records) CHECK(record.flips.empty());

    // Broken plans surface as input-class exits, not crashes.
    CHECK_EQ(run("profile --vendor no-such-vendor --out cli_zero"), 2);
    CHECK_EQ(run(std::string("profile ") + kBaseFlags), 2);  // --out missing
}

void determinism() {
    testing::begin("re-runs are byte-identical");
    reset_dir("cli_d1");
    reset_dir("cli_d2");
    profile_base("cli_d1");
    profile_base("cli_d2");
    for (const char* name : {"result.txt", "curves.csv", "persistence-sg.csv",
                             "persistence-vc.csv", "persistence-db.csv"}) {
        const std::string a = slurp(std::string("cli_d1/") + name);
        CHECK(!a.empty());
        CHECK(a == slurp(std::string("cli_d2/") + name));
    }

    CHECK_EQ(run("classify --result cli_d1/result.txt --out cli_d1"), 0);
    CHECK_EQ(run("classify --result cli_d2/result.txt --out cli_d2"), 0);
    for (const char* name : {"levels.csv", "levels.bitmap", "classification.txt"}) {
        const std::string a = slurp(std::string("cli_d1/") + name);
        CHECK(!a.empty());
        CHECK(a == slurp(std::string("cli_d2/") + name));
    }

    CHECK_EQ(run("attack --bitmap cli_d1/levels.bitmap --model DB --max-iters 12 --out cli_d1"),
             0);
    CHECK_EQ(run("attack --bitmap cli_d2/levels.bitmap --model DB --max-iters 12 --out cli_d2"),
             0);
    CHECK(slurp("cli_d1/attack-db.json") == slurp("cli_d2/attack-db.json"));
    CHECK(slurp("cli_d1/network.qnet") == slurp("cli_d2/network.qnet"));
}

void manifest_overrides() {
    testing::begin("manifest config and flag overrides");
    {
        std::ofstream cfg("cli_manifest.cfg");
        cfg << "# sweep manifest\n";
        cfg << "vendor = mf-A\n";
        cfg << "rows = 64\n";
        cfg << "cols = 256\n";
        cfg << "trials = 9\n";  // overridden by the flag below
        cfg << "hc_levels = 200000,1000000\n";
        cfg << "victims = 1\n";
        cfg << "out = cli_cfg\n";
    }
    reset_dir("cli_cfg");
    CHECK_EQ(run("profile --config cli_manifest.cfg --trials 2"), 0);
    CHECK(slurp("cli_cfg/result.txt") == slurp("cli_d1/result.txt"));

    // Config alone also works; trials = 9 then takes effect.
    reset_dir("cli_cfg");
    CHECK_EQ(run("profile --config cli_manifest.cfg"), 0);
    CHECK_EQ(load_result("cli_cfg/result.txt").trials, 9u);

    std::ofstream("cli_broken.cfg") << "this line has no equals sign\n";
    CHECK_EQ(run("profile --config cli_broken.cfg"), 2);
    CHECK_EQ(run("profile --config cli_missing.cfg"), 2);
}

void classify_outputs() {
    testing::begin("classify outputs");
    // cli_d1 was classified in the determinism suite.
    const std::string csv = slurp("cli_d1/levels.csv");
    CHECK_EQ(first_line(csv), std::string("# scheme = THREE_LEVEL"));
    CHECK(contains(csv, "row,col,level"));

    const SecurityLevelMap map = load_bitmap("cli_d1/levels.bitmap");
    CHECK(map.scheme == Scheme::ThreeLevel);
    CHECK_EQ(map.rows, 64u);
    CHECK_EQ(map.cols, 256u);

    const KvConfig summary = KvConfig::load("cli_d1/classification.txt");
    CHECK_EQ(summary.get("vendor"), std::string("mf-A"));
    CHECK_EQ(summary.get("scheme"), std::string("THREE_LEVEL"));
    const LevelCounts counts = level_counts(map);
    CHECK_EQ(summary.get_int("level1"), static_cast<long long>(counts.level1));
    CHECK_EQ(summary.get_int("level2"), static_cast<long long>(counts.level2));
    CHECK_EQ(summary.get_int("level3"), static_cast<long long>(counts.level3));
    CHECK_EQ(summary.get_int("level4"), static_cast<long long>(counts.level4));
    CHECK_EQ(counts.total(), std::uint64_t{64} * 256);
    CHECK(!summary.get("defense").empty());
}

void classify_missing_model() {
    testing::begin("classify rejects incomplete results");
    reset_dir("cli_part");
    CHECK_EQ(run("profile --vendor mf-A --rows 64 --cols 256 --trials 1 --hc-levels 1000000 "
                 "--victims 1 --models SG,VC --out cli_part"),
             0);
    CHECK_EQ(run("classify --result cli_part/result.txt --out cli_part"), 2);

    const nlohmann::json record = nlohmann::json::parse(slurp("cli_stderr.txt"));
    CHECK_EQ(record.at("error").get<std::string>(), std::string("input"));
    CHECK(contains(record.at("message").get<std::string>(), "DB"));

    // The hc must match too: the sweep above only covers hc 1M.
    CHECK_EQ(run("classify --result cli_d1/result.txt --hc 777 --out cli_part"), 2);
}

void attack_outputs() {
    testing::begin("attack outputs");
    const nlohmann::json db = nlohmann::json::parse(slurp("cli_d1/attack-db.json"));
    CHECK_EQ(db.at("weight_bits").get<std::uint64_t>(), std::uint64_t{2080});
    CHECK_EQ(db.at("trajectory").size(), db.at("iterations").get<std::size_t>() + 1);
    CHECK_EQ(db.at("flips").size(), db.at("iterations").get<std::size_t>());
    CHECK(db.at("allowed_bits").get<std::uint64_t>() > 0);

    // mf-A is an overlap vendor: the VC report must equal the DB report
    // byte for byte (the payload carries no model name for this reason).
    CHECK_EQ(run("attack --bitmap cli_d1/levels.bitmap --model VC --max-iters 12 --out cli_d1"),
             0);
    CHECK(slurp("cli_d1/attack-vc.json") == slurp("cli_d1/attack-db.json"));

    // No level-4 cells here, so single-sided hammering has nothing to flip;
    // that is a finding, not a failure.
    CHECK_EQ(run("attack --bitmap cli_d1/levels.bitmap --model SG --out cli_d1"), 0);
    const nlohmann::json sg = nlohmann::json::parse(slurp("cli_d1/attack-sg.json"));
    CHECK_EQ(sg.at("iterations").get<std::uint64_t>(), std::uint64_t{0});
    CHECK_EQ(sg.at("reason").get<std::string>(), std::string("no flippable bits"));
    CHECK_EQ(sg.at("allowed_bits").get<std::uint64_t>(), std::uint64_t{0});

    // The toy network the attack ran against is persisted and loadable.
    const QuantizedNetwork net = load_network("cli_d1/network.qnet");
    net.validate();
    CHECK_EQ(net.weight_bits(), std::uint64_t{2080});

    CHECK_EQ(run("attack --bitmap cli_missing.bitmap --model DB --out cli_d1"), 2);
    CHECK_EQ(run("attack --bitmap cli_d1/levels.bitmap --model XX --out cli_d1"), 2);
}

void report_outputs() {
    testing::begin("report outputs");
    reset_dir("cli_runs");

    // a-full: result + classification + one attack. b-part: result only.
    // c-nohc: result without the reference hammer count.
    reset_dir("cli_runs/a-full");
    profile_base("cli_runs/a-full");
    CHECK_EQ(run("classify --result cli_runs/a-full/result.txt --out cli_runs/a-full"), 0);
    CHECK_EQ(run("attack --bitmap cli_runs/a-full/levels.bitmap --model DB --max-iters 12 "
                 "--out cli_runs/a-full"),
             0);
    reset_dir("cli_runs/b-part");
    CHECK_EQ(run("profile --vendor mf-A --rows 64 --cols 256 --trials 1 --hc-levels 1000000 "
                 "--victims 1 --models SG,VC --out cli_runs/b-part"),
             0);
    reset_dir("cli_runs/c-nohc");
    CHECK_EQ(run("profile --vendor mf-A --rows 64 --cols 256 --trials 1 --hc-levels 200000 "
                 "--victims 1 --out cli_runs/c-nohc"),
             0);

    CHECK_EQ(run("report --out cli_runs", "cli_warn.txt"), 0);
    const std::string warnings = slurp("cli_warn.txt");
    CHECK(contains(warnings, "b-part: no classification.txt"));
    CHECK(contains(warnings, "c-nohc: no hc 1000000"));
    CHECK(contains(warnings, "no attack-sg.json"));

    std::vector<std::string> lines;
    std::istringstream csv(slurp("cli_runs/summary.csv"));
    for (std::string line; std::getline(csv, line);) lines.push_back(line);
    CHECK_EQ(lines.size(), std::size_t{1 + 3 + 2 + 3});
    CHECK_EQ(lines[0], std::string("vendor,model,flips_1m,level1,level2,level3,level4,scheme,"
                                   "defense,attack_iterations"));
    CHECK(contains(lines[1], "mf-A,SG,"));
    CHECK(contains(lines[1], "THREE_LEVEL"));
    CHECK(contains(lines[3], ",DB,"));
    // b-part rows carry flip counts but no classification or attack columns.
    CHECK_EQ(lines[4], std::string("mf-A,SG,0,,,,,,,"));
    CHECK_EQ(lines[5], std::string("mf-A,VC,4,,,,,,,"));
    // c-nohc rows have an empty flips column as well.
    CHECK_EQ(lines[6], std::string("mf-A,SG,,,,,,,,"));

    CHECK_EQ(first_line(slurp("cli_runs/summary.txt")).substr(0, 6), std::string("vendor"));

    // Re-running the report rewrites the same bytes.
    const std::string before = slurp("cli_runs/summary.csv");
    CHECK_EQ(run("report --out cli_runs", "cli_warn.txt"), 0);
    CHECK(before == slurp("cli_runs/summary.csv"));

    reset_dir("cli_empty/only-empty");
    CHECK_EQ(run("report --out cli_empty"), 2);
}

void calibrate_cmd() {
    testing::begin("calibrate subcommand");
    fs::remove("cli_cal.profile");
    CHECK_EQ(run("calibrate --vc-over-db 1.0 --vc-over-sg 5.0 --sg-count 1000 "
                 "--name cli-cal --out cli_cal.profile"),
             0);
    const VendorProfile profile = load_profile("cli_cal.profile");
    profile.validate();
    CHECK_EQ(profile.name, std::string("cli-cal"));
    CHECK(profile.behavior_class == BehaviorClass::Overlap);
    CHECK_EQ(profile.w_same, profile.w_diff);

    // The solved profile feeds straight back into a sweep.
    reset_dir("cli_calrun");
    CHECK_EQ(run("profile --vendor cli_cal.profile --rows 64 --cols 256 --trials 1 "
                 "--hc-levels 1000000 --victims 1 --out cli_calrun"),
             0);
    CHECK_EQ(load_result("cli_calrun/result.txt").profile.name, std::string("cli-cal"));

    // VC six times DB while VC stays under DB's superset bound cannot exist.
    CHECK_EQ(run("calibrate --vc-over-db 6.0 --vc-over-sg 5.0 --sg-count 100"), 2);
    const nlohmann::json record = nlohmann::json::parse(slurp("cli_stderr.txt"));
    CHECK_EQ(record.at("error").get<std::string>(), std::string("calibration"));
}

}  // namespace

int main() {
    usage_errors();
    profile_outputs();
    determinism();
    manifest_overrides();
    classify_outputs();
    classify_missing_model();
    attack_outputs();
    report_outputs();
    calibrate_cmd();
    return testing::finish();
}
