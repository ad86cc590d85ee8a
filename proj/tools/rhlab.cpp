// rhlab: command-line front end for the RowHammer laboratory.
//
// Subcommands: profile, classify, attack, report, calibrate. Every run is a
// pure function of its manifest (config file plus flag overrides; flags win),
// so re-running with the same manifest reproduces every output byte for byte.
// Exit codes: 0 success or finding, 1 usage error, 2 input/config error,
// 3 broken internal invariant. Module errors print one machine-readable JSON
// record on stderr.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rhlab/bfa.hpp"
#include "rhlab/classifier.hpp"
#include "rhlab/errors.hpp"
#include "rhlab/kvconfig.hpp"
#include "rhlab/pattern.hpp"
#include "rhlab/profiler.hpp"
#include "rhlab/profiles.hpp"
#include "rhlab/timing.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace rhlab;

namespace {

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

/// "input error" -> "input"; the trailing word is uniform across kinds.
std::string kind_slug(ErrorKind kind) {
    std::string s = to_string(kind);
    const std::string suffix = " error";
    if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0)
        s.erase(s.size() - suffix.size());
    return s;
}

std::string error_record(ErrorKind kind, const std::string& message) {
    return ordered_json{{"error", kind_slug(kind)}, {"message", message}}.dump();
}

void warn(const std::string& message) { std::cerr << "warning: " << message << "\n"; }

// --- manifest plumbing -------------------------------------------------
// Config keys are the long flag names with dashes turned into underscores
// (--hc-max -> hc_max). A value is taken from the config only when the flag
// was not given on the command line.

KvConfig load_manifest(const std::string& path) {
    return path.empty() ? KvConfig{} : KvConfig::load(path);
}

std::string key_of(const char* flag) {
    std::string key(flag + 2);  // strip the leading "--"
    for (char& c : key)
        if (c == '-') c = '_';
    return key;
}

void fold(const CLI::App& sub, const KvConfig& cfg, const char* flag, std::string& value) {
    const std::string key = key_of(flag);
    if (sub.count(flag) == 0 && cfg.has(key)) value = cfg.get(key);
}

void fold(const CLI::App& sub, const KvConfig& cfg, const char* flag, double& value) {
    const std::string key = key_of(flag);
    if (sub.count(flag) == 0 && cfg.has(key)) value = cfg.get_double(key);
}

void fold(const CLI::App& sub, const KvConfig& cfg, const char* flag, std::int64_t& value) {
    const std::string key = key_of(flag);
    if (sub.count(flag) == 0 && cfg.has(key)) value = cfg.get_int(key);
}

void fold(const CLI::App& sub, const KvConfig& cfg, const char* flag, std::uint64_t& value) {
    const std::string key = key_of(flag);
    if (sub.count(flag) != 0 || !cfg.has(key)) return;
    const long long raw = cfg.get_int(key);
    if (raw < 0)
        fail(ErrorKind::Config, "config key " + key + ": must be non-negative");
    value = static_cast<std::uint64_t>(raw);
}

void fold(const CLI::App& sub, const KvConfig& cfg, const char* flag, std::uint32_t& value) {
    const std::string key = key_of(flag);
    if (sub.count(flag) != 0 || !cfg.has(key)) return;
    const long long raw = cfg.get_int(key);
    if (raw < 0 || raw > static_cast<long long>(UINT32_MAX))
        fail(ErrorKind::Config, "config key " + key + ": out of range");
    value = static_cast<std::uint32_t>(raw);
}

/// Whether a setting was supplied at all, by flag or by config key.
bool supplied(const CLI::App& sub, const KvConfig& cfg, const char* flag) {
    return sub.count(flag) != 0 || cfg.has(key_of(flag));
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    fail(ErrorKind::Parse, "config key " + key + ": expected true or false, got " + value);
}

// --- list parsing ------------------------------------------------------

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto a = item.find_first_not_of(" \t");
        const auto b = item.find_last_not_of(" \t");
        parts.push_back(a == std::string::npos ? std::string() : item.substr(a, b - a + 1));
    }
    return parts;
}

std::uint64_t parse_u64(const std::string& text, const char* what) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
        fail(ErrorKind::Parse, std::string(what) + ": not a non-negative integer: " + text);
    try {
        return std::stoull(text);
    } catch (const std::exception&) {
        fail(ErrorKind::Parse, std::string(what) + ": out of range: " + text);
    }
}

std::vector<std::uint64_t> parse_u64_list(const std::string& text, const char* what) {
    std::vector<std::uint64_t> out;
    for (const std::string& part : split_list(text)) out.push_back(parse_u64(part, what));
    return out;
}

std::vector<std::uint32_t> parse_u32_list(const std::string& text, const char* what) {
    std::vector<std::uint32_t> out;
    for (const std::string& part : split_list(text)) {
        const std::uint64_t v = parse_u64(part, what);
        if (v > UINT32_MAX)
            fail(ErrorKind::Parse, std::string(what) + ": out of range: " + part);
        out.push_back(static_cast<std::uint32_t>(v));
    }
    return out;
}

std::vector<AttackModel> parse_models(const std::string& text) {
    std::vector<AttackModel> out;
    for (const std::string& part : split_list(text)) out.push_back(attack_model_from(part));
    return out;
}

// --- shared output helpers ----------------------------------------------

void require(const std::string& value, const char* flag) {
    if (value.empty())
        fail(ErrorKind::Config,
             std::string(flag) + " required (flag or config key " + key_of(flag) + ")");
}

void make_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        fail(ErrorKind::Input, "cannot create output directory " + dir + ": " + ec.message());
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Input, "cannot write " + path);
    return out;
}

std::string path_join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

TimingParams timing_from(const KvConfig& cfg) {
    TimingParams t = ddr4_2400();
    t.t_ck = cfg.get_double_or("t_ck", t.t_ck);
    t.t_ras = cfg.get_int_or("t_ras", t.t_ras);
    t.t_rp = cfg.get_int_or("t_rp", t.t_rp);
    t.t_refw = cfg.get_double_or("t_refw", t.t_refw);
    t.sleep = cfg.get_int_or("sleep", t.sleep);
    if (cfg.has("allow_nonstandard"))
        t.allow_nonstandard = parse_bool("allow_nonstandard", cfg.get("allow_nonstandard"));
    return t;
}

// --- profile -------------------------------------------------------------

struct ProfileArgs {
    std::string config_path;
    std::string vendor;
    std::string out;
    std::string models = "SG,VC,DB";
    std::string hc_levels;
    std::string victims;
    std::string orientation = "hammer-second";
    std::uint64_t seed = 7;
    std::uint64_t hc_max = 0;
    std::uint64_t trial_seed_base = 1;
    std::uint32_t rows = 1024;
    std::uint32_t cols = 8192;
    std::uint32_t trials = 5;
    std::uint32_t victim_count = 16;
    std::uint32_t workers = 0;
};

std::vector<std::uint64_t> capped_default_levels(std::uint64_t hc_max) {
    std::vector<std::uint64_t> levels = default_hc_levels();
    std::erase_if(levels, [&](std::uint64_t hc) { return hc > hc_max; });
    if (levels.empty())
        fail(ErrorKind::Config,
             "no default hc level at or below " + std::to_string(hc_max));
    return levels;
}

void cmd_profile(const CLI::App& sub, ProfileArgs& a) {
    const KvConfig cfg = load_manifest(a.config_path);
    fold(sub, cfg, "--vendor", a.vendor);
    fold(sub, cfg, "--out", a.out);
    fold(sub, cfg, "--models", a.models);
    fold(sub, cfg, "--hc-levels", a.hc_levels);
    fold(sub, cfg, "--hc-max", a.hc_max);
    fold(sub, cfg, "--victims", a.victims);
    fold(sub, cfg, "--orientation", a.orientation);
    fold(sub, cfg, "--seed", a.seed);
    fold(sub, cfg, "--trial-seed-base", a.trial_seed_base);
    fold(sub, cfg, "--rows", a.rows);
    fold(sub, cfg, "--cols", a.cols);
    fold(sub, cfg, "--trials", a.trials);
    fold(sub, cfg, "--victim-count", a.victim_count);
    fold(sub, cfg, "--workers", a.workers);
    require(a.vendor, "--vendor");
    require(a.out, "--out");

    SweepPlan plan;
    plan.profile = a.vendor;
    plan.device = DeviceConfig{a.rows, a.cols, a.seed};
    plan.timing = timing_from(cfg);
    plan.models = parse_models(a.models);
    if (supplied(sub, cfg, "--hc-levels"))
        plan.hc_levels = parse_u64_list(a.hc_levels, "hc level");
    else if (supplied(sub, cfg, "--hc-max"))
        plan.hc_levels = capped_default_levels(a.hc_max);
    plan.trials = a.trials;
    plan.trial_seed_base = a.trial_seed_base;
    plan.victim_rows = supplied(sub, cfg, "--victims")
                           ? parse_u32_list(a.victims, "victim row")
                           : default_victim_rows(a.rows, a.victim_count);
    plan.orientation = sg_orientation_from(a.orientation);
    plan.workers = a.workers;

    const ProfileResult result = run_sweep(plan);

    make_out_dir(a.out);
    const std::string result_path = path_join(a.out, "result.txt");
    const std::string curves_path = path_join(a.out, "curves.csv");
    save_result(result, result_path);
    save_curves_csv(result, curves_path);

    std::cout << "profile " << result.profile.name << ": " << a.rows << "x" << a.cols
              << " device, " << plan.models.size() << " models, " << plan.hc_levels.size()
              << " hc levels, " << plan.trials << " trials\n";
    for (AttackModel model : result.models) {
        const CurvePoint top = flip_curve(result, model).back();
        std::cout << "  " << to_string(model) << ": mean " << format_double(top.mean)
                  << " flips at hc " << top.hc << "\n";
    }
    std::cout << "wrote " << result_path << "\n";
    std::cout << "wrote " << curves_path << "\n";

    // Persistence needs at least two tiers to say anything.
    if (plan.hc_levels.size() >= 2)
        for (AttackModel model : result.models) {
            const std::string path =
                path_join(a.out, "persistence-" + lower(to_string(model)) + ".csv");
            persistence_map(result, model).save_csv(path);
            std::cout << "wrote " << path << "\n";
        }
}

// --- classify ------------------------------------------------------------

struct ClassifyArgs {
    std::string config_path;
    std::string out;
    std::vector<std::string> results;
    std::uint64_t hc = kReferenceHc;
    double epsilon = 0.02;
};

void cmd_classify(const CLI::App& sub, ClassifyArgs& a) {
    const KvConfig cfg = load_manifest(a.config_path);
    fold(sub, cfg, "--out", a.out);
    fold(sub, cfg, "--hc", a.hc);
    fold(sub, cfg, "--epsilon", a.epsilon);
    if (sub.count("--result") == 0 && cfg.has("result")) a.results = split_list(cfg.get("result"));
    if (a.results.empty())
        fail(ErrorKind::Config, "--result required (flag or config key result)");
    require(a.out, "--out");

    DefensePolicy policy;
    policy.scarce_level4 = cfg.get_double_or("scarce_level4", policy.scarce_level4);
    policy.balanced_max_share = cfg.get_double_or("balanced_max_share", policy.balanced_max_share);

    std::vector<ProfileResult> loaded;
    for (const std::string& path : a.results) loaded.push_back(load_result(path));
    for (const ProfileResult& r : loaded) {
        if (r.device.rows != loaded[0].device.rows || r.device.cols != loaded[0].device.cols ||
            r.device.seed != loaded[0].device.seed)
            fail(ErrorKind::Input, "result files describe different devices");
        if (r.profile.name != loaded[0].profile.name)
            fail(ErrorKind::Input, "result files describe different vendors");
    }

    // One flip set per model, from the first result that covers it at --hc.
    std::vector<std::vector<CellCoord>> flips(3);
    std::vector<std::string> missing;
    for (AttackModel model : {AttackModel::SG, AttackModel::VC, AttackModel::DB}) {
        const ProfileResult* source = nullptr;
        for (const ProfileResult& r : loaded) {
            const bool has_model =
                std::find(r.models.begin(), r.models.end(), model) != r.models.end();
            const bool has_hc =
                std::find(r.hc_levels.begin(), r.hc_levels.end(), a.hc) != r.hc_levels.end();
            if (has_model && has_hc) {
                source = &r;
                break;
            }
        }
        if (source == nullptr) {
            missing.push_back(to_string(model));
            continue;
        }
        flips[static_cast<std::size_t>(model)] = union_flips(*source, model, a.hc);
    }
    if (!missing.empty()) {
        std::string list = missing[0];
        for (std::size_t i = 1; i < missing.size(); ++i) list += ", " + missing[i];
        fail(ErrorKind::Input, "results lack " + list + " at hc " + std::to_string(a.hc));
    }

    const std::uint32_t rows = loaded[0].device.rows;
    const std::uint32_t cols = loaded[0].device.cols;
    const SecurityLevelMap map =
        classify(flips[static_cast<std::size_t>(AttackModel::SG)],
                 flips[static_cast<std::size_t>(AttackModel::VC)],
                 flips[static_cast<std::size_t>(AttackModel::DB)], rows, cols, a.epsilon);
    const LevelCounts counts = level_counts(map);
    const std::string defense = recommend_defense(counts, policy);

    make_out_dir(a.out);
    const std::string csv_path = path_join(a.out, "levels.csv");
    const std::string bitmap_path = path_join(a.out, "levels.bitmap");
    const std::string summary_path = path_join(a.out, "classification.txt");
    map.save_csv(csv_path);
    map.save_bitmap(bitmap_path);
    {
        std::ofstream out = open_out(summary_path);
        out << "# rhlab classification\n";
        out << "vendor = " << loaded[0].profile.name << "\n";
        out << "scheme = " << to_string(map.scheme) << "\n";
        out << "rows = " << rows << "\n";
        out << "cols = " << cols << "\n";
        out << "hc = " << a.hc << "\n";
        out << "epsilon = " << format_double(a.epsilon) << "\n";
        out << "level1 = " << counts.level1 << "\n";
        out << "level2 = " << counts.level2 << "\n";
        out << "level3 = " << counts.level3 << "\n";
        out << "level4 = " << counts.level4 << "\n";
        out << "defense = " << defense << "\n";
    }

    std::cout << "classify " << loaded[0].profile.name << ": scheme " << to_string(map.scheme)
              << " over " << rows << "x" << cols << " cells at hc " << a.hc << "\n";
    std::cout << "  level 1: " << counts.level1 << "\n";
    std::cout << "  level 2: " << counts.level2 << "\n";
    std::cout << "  level 3: " << counts.level3 << "\n";
    std::cout << "  level 4: " << counts.level4 << "\n";
    std::cout << "  defense: " << defense << "\n";
    std::cout << "wrote " << csv_path << "\n";
    std::cout << "wrote " << bitmap_path << "\n";
    std::cout << "wrote " << summary_path << "\n";
}

// --- attack ----------------------------------------------------------------

struct AttackArgs {
    std::string config_path;
    std::string bitmap;
    std::string network;
    std::string model;
    std::string out;
    std::uint64_t seed = 0;
    std::uint64_t max_iters = 100;
    double target_acc = 0.10;
    std::uint32_t batch = 256;
    std::uint32_t workers = 0;
};

void cmd_attack(const CLI::App& sub, AttackArgs& a) {
    const KvConfig cfg = load_manifest(a.config_path);
    fold(sub, cfg, "--bitmap", a.bitmap);
    fold(sub, cfg, "--network", a.network);
    fold(sub, cfg, "--model", a.model);
    fold(sub, cfg, "--out", a.out);
    fold(sub, cfg, "--seed", a.seed);
    fold(sub, cfg, "--max-iters", a.max_iters);
    fold(sub, cfg, "--target-acc", a.target_acc);
    fold(sub, cfg, "--batch", a.batch);
    fold(sub, cfg, "--workers", a.workers);
    require(a.bitmap, "--bitmap");
    require(a.model, "--model");
    require(a.out, "--out");

    const AttackModel model = attack_model_from(a.model);
    const ToyTask task = build_toy_network(a.seed);
    const QuantizedNetwork net = a.network.empty() ? task.network : load_network(a.network);
    const SecurityLevelMap map = load_bitmap(a.bitmap);
    const CellLayout layout = make_cell_layout(net, map.rows, map.cols);
    const std::vector<BitRef> allowed = allowed_bits(map, layout, model);

    AttackConfig config;
    config.max_iters = a.max_iters;
    config.target_acc = a.target_acc;
    config.batch = a.batch;
    config.workers = a.workers;
    const AttackReport report = attack(net, task.dataset, allowed, config);

    // The payload deliberately omits the attack model and the input paths:
    // two models with identical allowed sets must produce identical files.
    ordered_json j;
    j["seed"] = a.seed;
    j["target_accuracy"] = config.target_acc;
    j["max_iterations"] = config.max_iters;
    j["batch"] = config.batch;
    j["weight_bits"] = layout.total_bits;
    j["allowed_bits"] = allowed.size();
    j["iterations"] = report.iterations;
    j["final_accuracy"] = report.final_accuracy;
    j["reason"] = report.reason;
    j["trajectory"] = report.trajectory;
    j["flips"] = ordered_json::array();
    for (const BitRef& ref : report.flipped) {
        const CellCoord cell = layout.cell_of(ref);
        j["flips"].push_back(ordered_json{{"layer", ref.layer},
                                          {"row", ref.row},
                                          {"col", ref.col},
                                          {"bit", ref.bit},
                                          {"dram_row", cell.row},
                                          {"dram_col", cell.col}});
    }

    make_out_dir(a.out);
    const std::string report_path =
        path_join(a.out, "attack-" + lower(to_string(model)) + ".json");
    open_out(report_path) << j.dump(2) << "\n";

    std::cout << "attack " << to_string(model) << " on " << map.rows << "x" << map.cols
              << " map: " << layout.total_bits << " weight bits, " << allowed.size()
              << " allowed\n";
    std::cout << "  iterations " << report.iterations << ", accuracy "
              << format_double(report.trajectory.front()) << " -> "
              << format_double(report.final_accuracy) << ", reason: " << report.reason << "\n";
    std::cout << "wrote " << report_path << "\n";
    if (a.network.empty()) {
        const std::string net_path = path_join(a.out, "network.qnet");
        save_network(task.network, net_path);
        std::cout << "wrote " << net_path << "\n";
    }
}

// --- report ------------------------------------------------------------------

struct ReportArgs {
    std::string config_path;
    std::string out;
};

struct ReportRow {
    std::string vendor, model, flips, level1, level2, level3, level4, scheme, defense, iters;
};

void cmd_report(const CLI::App& sub, ReportArgs& a) {
    const KvConfig cfg = load_manifest(a.config_path);
    fold(sub, cfg, "--out", a.out);
    require(a.out, "--out");
    if (!fs::is_directory(a.out))
        fail(ErrorKind::Input, "not a directory: " + a.out);

    std::vector<fs::path> dirs;
    for (const fs::directory_entry& entry : fs::directory_iterator(a.out))
        if (entry.is_directory()) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());

    std::vector<ReportRow> rows;
    for (const fs::path& dir : dirs) {
        const std::string name = dir.filename().string();
        const std::string result_path = (dir / "result.txt").string();
        if (!fs::exists(result_path)) {
            warn(name + ": no result.txt; skipped");
            continue;
        }
        ProfileResult result;
        try {
            result = load_result(result_path);
        } catch (const Error& e) {
            warn(name + ": " + e.what() + "; skipped");
            continue;
        }

        std::string level1, level2, level3, level4, scheme, defense;
        const std::string class_path = (dir / "classification.txt").string();
        if (fs::exists(class_path)) {
            const KvConfig cls = KvConfig::load(class_path);
            scheme = cls.get_or("scheme", "");
            defense = cls.get_or("defense", "");
            level1 = cls.get_or("level1", "");
            level2 = cls.get_or("level2", "");
            level3 = cls.get_or("level3", "");
            level4 = cls.get_or("level4", "");
        } else {
            warn(name + ": no classification.txt; level columns blank");
        }

        const bool has_ref_hc = std::find(result.hc_levels.begin(), result.hc_levels.end(),
                                          kReferenceHc) != result.hc_levels.end();
        if (!has_ref_hc)
            warn(name + ": no hc " + std::to_string(kReferenceHc) + " level; flips column blank");

        for (AttackModel model : result.models) {
            ReportRow row;
            row.vendor = result.profile.name;
            row.model = to_string(model);
            row.level1 = level1;
            row.level2 = level2;
            row.level3 = level3;
            row.level4 = level4;
            row.scheme = scheme;
            row.defense = defense;
            if (has_ref_hc) {
                for (const CurvePoint& p : flip_curve(result, model))
                    if (p.hc == kReferenceHc) row.flips = format_double(p.mean);
            }
            const std::string attack_path =
                (dir / ("attack-" + lower(to_string(model)) + ".json")).string();
            if (fs::exists(attack_path)) {
                std::ifstream in(attack_path);
                const nlohmann::json j = nlohmann::json::parse(in);
                row.iters = std::to_string(j.at("iterations").get<std::uint64_t>());
            } else {
                warn(name + ": no attack-" + lower(to_string(model)) + ".json; column blank");
            }
            rows.push_back(row);
        }
    }
    if (rows.empty())
        fail(ErrorKind::Input, "no profiling results under " + a.out);

    const std::vector<std::string> header = {"vendor", "model",  "flips_1m", "level1",
                                             "level2", "level3", "level4",   "scheme",
                                             "defense", "attack_iterations"};
    const auto cells = [](const ReportRow& r) {
        return std::vector<std::string>{r.vendor, r.model,  r.flips,  r.level1, r.level2,
                                        r.level3, r.level4, r.scheme, r.defense, r.iters};
    };

    const std::string csv_path = path_join(a.out, "summary.csv");
    {
        std::ofstream out = open_out(csv_path);
        for (std::size_t i = 0; i < header.size(); ++i)
            out << header[i] << (i + 1 < header.size() ? ',' : '\n');
        for (const ReportRow& r : rows) {
            const std::vector<std::string> c = cells(r);
            for (std::size_t i = 0; i < c.size(); ++i)
                out << c[i] << (i + 1 < c.size() ? ',' : '\n');
        }
    }

    // Text table: aligned columns, "-" for blanks.
    std::vector<std::size_t> width(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
    for (const ReportRow& r : rows) {
        const std::vector<std::string> c = cells(r);
        for (std::size_t i = 0; i < c.size(); ++i)
            width[i] = std::max(width[i], std::max<std::size_t>(c[i].size(), 1));
    }
    std::ostringstream table;
    const auto emit = [&](const std::vector<std::string>& c) {
        for (std::size_t i = 0; i < c.size(); ++i) {
            const std::string text = c[i].empty() ? "-" : c[i];
            table << text;
            if (i + 1 < c.size()) table << std::string(width[i] - text.size() + 2, ' ');
        }
        table << "\n";
    };
    emit(header);
    for (const ReportRow& r : rows) emit(cells(r));

    const std::string txt_path = path_join(a.out, "summary.txt");
    open_out(txt_path) << table.str();
    std::cout << table.str();
    std::cout << "wrote " << csv_path << "\n";
    std::cout << "wrote " << txt_path << "\n";
}

// --- calibrate ---------------------------------------------------------------

struct CalibrateArgs {
    std::string config_path;
    std::string name = "calibrated";
    std::string out;
    double vc_over_db = 0.75;
    double vc_over_sg = 5.0;
    double noise_amp = 0.0;
    std::int64_t sg_count = 1200;
};

void cmd_calibrate(const CLI::App& sub, CalibrateArgs& a) {
    const KvConfig cfg = load_manifest(a.config_path);
    fold(sub, cfg, "--name", a.name);
    fold(sub, cfg, "--out", a.out);
    fold(sub, cfg, "--vc-over-db", a.vc_over_db);
    fold(sub, cfg, "--vc-over-sg", a.vc_over_sg);
    fold(sub, cfg, "--noise-amp", a.noise_amp);
    fold(sub, cfg, "--sg-count", a.sg_count);
    if (a.out.empty()) a.out = a.name + ".profile";

    CalibrationTargets targets;
    targets.vc_over_db = a.vc_over_db;
    targets.vc_over_sg = a.vc_over_sg;
    targets.sg_count = a.sg_count;
    const VendorProfile profile = calibrate(targets, a.name, a.noise_amp);
    save_profile(profile, a.out);

    std::cout << "calibrated " << profile.name << ": class "
              << to_string(profile.behavior_class) << ", w_diff "
              << format_double(profile.w_diff) << ", w_same " << format_double(profile.w_same)
              << ", threshold median " << format_double(profile.threshold_dist.median)
              << " sigma " << format_double(profile.threshold_dist.sigma) << ", noise_amp "
              << format_double(profile.noise_amp) << "\n";
    std::cout << "wrote " << a.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RowHammer laboratory: sweep simulated DRAM, classify cells, attack stored nets"};
    app.require_subcommand(1);

    ProfileArgs pa;
    ClassifyArgs ca;
    AttackArgs aa;
    ReportArgs ra;
    CalibrateArgs la;

    CLI::App* profile = app.add_subcommand("profile", "Run a hammer-count sweep, export curves");
    profile->add_option("--config", pa.config_path, "key = value manifest; flags win");
    profile->add_option("--vendor", pa.vendor, "built-in profile name or profile file");
    profile->add_option("--out", pa.out, "output directory");
    profile->add_option("--models", pa.models, "comma list of SG,VC,DB");
    CLI::Option* hc_levels_opt =
        profile->add_option("--hc-levels", pa.hc_levels, "comma list of hammer counts");
    CLI::Option* hc_max_opt =
        profile->add_option("--hc-max", pa.hc_max, "cap the default hc ladder at this count");
    hc_levels_opt->excludes(hc_max_opt);
    hc_max_opt->excludes(hc_levels_opt);
    CLI::Option* victims_opt =
        profile->add_option("--victims", pa.victims, "comma list of victim rows");
    CLI::Option* victim_count_opt =
        profile->add_option("--victim-count", pa.victim_count, "number of default victim rows");
    victims_opt->excludes(victim_count_opt);
    victim_count_opt->excludes(victims_opt);
    profile->add_option("--orientation", pa.orientation, "hammer-second or hammer-first");
    profile->add_option("--seed", pa.seed, "device threshold seed");
    profile->add_option("--trial-seed-base", pa.trial_seed_base, "trial t uses base + t");
    profile->add_option("--rows", pa.rows, "device rows");
    profile->add_option("--cols", pa.cols, "device cols");
    profile->add_option("--trials", pa.trials, "trials per grid point");
    profile->add_option("--workers", pa.workers, "grid parallelism; 0 = hardware");
    profile->callback([&]() { cmd_profile(*profile, pa); });

    CLI::App* classify = app.add_subcommand("classify", "Turn flip sets into a level map");
    classify->add_option("--config", ca.config_path, "key = value manifest; flags win");
    classify->add_option("--result", ca.results, "profiling result file; repeatable");
    classify->add_option("--out", ca.out, "output directory");
    classify->add_option("--hc", ca.hc, "hammer count to classify at");
    classify->add_option("--epsilon", ca.epsilon, "level-2 overlap tolerance");
    classify->callback([&]() { cmd_classify(*classify, ca); });

    CLI::App* attack = app.add_subcommand("attack", "Greedy bit-flip attack on a stored network");
    attack->add_option("--config", aa.config_path, "key = value manifest; flags win");
    attack->add_option("--bitmap", aa.bitmap, "security-level bitmap from classify");
    attack->add_option("--network", aa.network, "network file; default builds the toy task");
    attack->add_option("--model", aa.model, "attack model: SG, VC, or DB");
    attack->add_option("--out", aa.out, "output directory");
    attack->add_option("--seed", aa.seed, "toy-task seed");
    attack->add_option("--max-iters", aa.max_iters, "iteration cap");
    attack->add_option("--target-acc", aa.target_acc, "stop once accuracy falls this low");
    attack->add_option("--batch", aa.batch, "scoring batch size");
    attack->add_option("--workers", aa.workers, "candidate-scoring parallelism; 0 = hardware");
    attack->callback([&]() { cmd_attack(*attack, aa); });

    CLI::App* report = app.add_subcommand("report", "Summarize per-vendor outputs in one table");
    report->add_option("--config", ra.config_path, "key = value manifest; flags win");
    report->add_option("--out", ra.out, "directory holding one subdirectory per vendor");
    report->callback([&]() { cmd_report(*report, ra); });

    CLI::App* calibrate_cmd =
        app.add_subcommand("calibrate", "Solve a vendor profile from flip-count targets");
    calibrate_cmd->add_option("--config", la.config_path, "key = value manifest; flags win");
    calibrate_cmd->add_option("--name", la.name, "profile name");
    calibrate_cmd->add_option("--out", la.out, "profile file path; default <name>.profile");
    calibrate_cmd->add_option("--vc-over-db", la.vc_over_db, "target count(VC)/count(DB) at 1M");
    calibrate_cmd->add_option("--vc-over-sg", la.vc_over_sg, "target count(VC)/count(SG) at 1M");
    calibrate_cmd->add_option("--sg-count", la.sg_count, "target SG flip count at 1M");
    calibrate_cmd->add_option("--noise-amp", la.noise_amp, "threshold jitter for the profile");
    calibrate_cmd->callback([&]() { cmd_calibrate(*calibrate_cmd, la); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << error_record(e.kind(), e.what()) << "\n";
        return e.kind() == ErrorKind::Internal ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << error_record(ErrorKind::Internal, e.what()) << "\n";
        return 3;
    }
    return 0;
}
