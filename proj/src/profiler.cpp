#include "rhlab/profiler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rhlab/errors.hpp"
#include "rhlab/execute.hpp"
#include "rhlab/parallel.hpp"

namespace rhlab {

namespace {

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

std::uint32_t anchor_row(AttackModel model, std::uint32_t victim, SgOrientation orientation) {
    if (model == AttackModel::SG && orientation == SgOrientation::HammerSecond)
        return victim;
    return victim - 1;
}

void check_model_present(const ProfileResult& result, AttackModel model) {
    if (std::find(result.models.begin(), result.models.end(), model) == result.models.end())
        fail(ErrorKind::Input,
             std::string("model ") + to_string(model) + " not part of this result");
}

}  // namespace

std::vector<std::uint64_t> default_hc_levels() {
    std::vector<std::uint64_t> levels(8);
    for (int i = 0; i < 8; ++i)
        levels[i] = static_cast<std::uint64_t>(
            std::llround(std::pow(10.0, 4.0 + 2.0 * i / 7.0)));
    return levels;
}

std::vector<std::uint32_t> default_victim_rows(std::uint32_t rows, std::uint32_t count) {
    if (count == 0)
        fail(ErrorKind::Config, "victim row count must be >= 1");
    std::vector<std::uint32_t> victims(count);
    for (std::uint32_t i = 0; i < count; ++i) victims[i] = 17 + 64 * i;
    if (static_cast<std::uint64_t>(victims.back()) + 2 >= rows)
        fail(ErrorKind::Addressing, "victim row " + std::to_string(victims.back()) +
                                        " needs a 3-row window inside " +
                                        std::to_string(rows) + " rows");
    return victims;
}

void SweepPlan::validate() const {
    device.validate();
    timing.validate();
    if (models.empty())
        fail(ErrorKind::Config, "plan selects no attack models");
    for (std::size_t i = 0; i < models.size(); ++i)
        for (std::size_t j = i + 1; j < models.size(); ++j)
            if (models[i] == models[j])
                fail(ErrorKind::Config, "duplicate attack model in plan");
    if (hc_levels.empty())
        fail(ErrorKind::Config, "plan has no hc levels");
    for (std::size_t i = 1; i < hc_levels.size(); ++i)
        if (hc_levels[i] <= hc_levels[i - 1])
            fail(ErrorKind::Config, "hc levels must be strictly ascending");
    if (hc_levels.back() > kMaxSweepHc)
        fail(ErrorKind::Config, "hc level " + std::to_string(hc_levels.back()) +
                                    " exceeds the 1M sweep cap");
    const std::int64_t budget = hammer_budget(timing);
    if (hc_levels.back() > static_cast<std::uint64_t>(budget))
        fail(ErrorKind::Budget, "hc level " + std::to_string(hc_levels.back()) +
                                    " exceeds activation budget " + std::to_string(budget));
    if (trials == 0)
        fail(ErrorKind::Config, "trials must be >= 1");
    if (victim_rows.empty())
        fail(ErrorKind::Config, "plan has no victim rows");
    for (std::uint32_t v : victim_rows)
        if (v < 1 || static_cast<std::uint64_t>(v) + 2 >= device.rows)
            fail(ErrorKind::Addressing,
                 "victim row " + std::to_string(v) + " leaves no room for its window");
    for (std::size_t i = 1; i < victim_rows.size(); ++i)
        if (victim_rows[i] < victim_rows[i - 1] + 4)
            fail(ErrorKind::Config,
                 "victim rows must ascend with gaps >= 4 so windows and spill "
                 "rows stay disjoint");
}

ProfileResult run_sweep(const SweepPlan& plan) {
    return run_sweep(plan, resolve_profile(plan.profile));
}

ProfileResult run_sweep(const SweepPlan& plan, const VendorProfile& profile) {
    plan.validate();
    profile.validate();

    ProfileResult out;
    out.profile = profile;
    out.device = plan.device;
    out.timing = plan.timing;
    out.orientation = plan.orientation;
    out.trial_seed_base = plan.trial_seed_base;
    out.trials = plan.trials;
    out.models = plan.models;
    out.hc_levels = plan.hc_levels;
    out.victim_rows = plan.victim_rows;

    struct Point {
        AttackModel model;
        std::uint64_t hc;
        std::uint32_t trial;
    };
    std::vector<Point> grid;
    grid.reserve(plan.models.size() * plan.hc_levels.size() * plan.trials);
    for (AttackModel model : plan.models)
        for (std::uint64_t hc : plan.hc_levels)
            for (std::uint32_t trial = 0; trial < plan.trials; ++trial)
                grid.push_back({model, hc, trial});

    const Device master(plan.device, profile);
    out.records.resize(grid.size());
    parallel_for(
        grid.size(),
        [&](std::size_t i) {
            const Point& pt = grid[i];
            FlipRecord rec;
            rec.model = pt.model;
            rec.hc = pt.hc;
            rec.trial = pt.trial;
            // Copying the untouched master equals constructing a fresh device:
            // thresholds are pure functions of the seed and data starts zeroed.
            Device dev = master;
            try {
                for (std::uint32_t victim : plan.victim_rows) {
                    const PatternSpec spec = make_pattern_spec(
                        anchor_row(pt.model, victim, plan.orientation), dev.cols(), pt.hc);
                    const CommandTrace trace = build_program(pt.model, spec, plan.timing,
                                                             dev.rows(), plan.orientation);
                    const ExecutionLog log =
                        execute(dev, trace, plan.trial_seed_base + pt.trial);
                    const std::vector<CellCoord> flips =
                        detect_bitflips(log, spec, pt.model, plan.orientation);
                    rec.flips.insert(rec.flips.end(), flips.begin(), flips.end());
                }
            } catch (const Error& e) {
                fail(e.kind(), "grid point model=" + std::string(to_string(pt.model)) +
                                   " hc=" + std::to_string(pt.hc) +
                                   " trial=" + std::to_string(pt.trial) + ": " + e.what());
            }
            out.records[i] = std::move(rec);
        },
        plan.workers);
    return out;
}

const FlipRecord& ProfileResult::record(AttackModel model, std::uint64_t hc,
                                        std::uint32_t trial) const {
    for (const FlipRecord& rec : records)
        if (rec.model == model && rec.hc == hc && rec.trial == trial) return rec;
    fail(ErrorKind::Input, "no record for model=" + std::string(to_string(model)) +
                               " hc=" + std::to_string(hc) +
                               " trial=" + std::to_string(trial));
}

std::vector<CurvePoint> flip_curve(const ProfileResult& result, AttackModel model) {
    check_model_present(result, model);
    std::vector<CurvePoint> curve;
    curve.reserve(result.hc_levels.size());
    for (std::uint64_t hc : result.hc_levels) {
        CurvePoint point;
        point.hc = hc;
        point.min = ~0ull;
        double sum = 0;
        for (std::uint32_t trial = 0; trial < result.trials; ++trial) {
            const std::uint64_t n = result.record(model, hc, trial).flips.size();
            sum += static_cast<double>(n);
            point.min = std::min(point.min, n);
            point.max = std::max(point.max, n);
        }
        point.mean = sum / result.trials;
        curve.push_back(point);
    }
    return curve;
}

void save_curves_csv(const ProfileResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Input, "cannot write " + path);
    out << "model,hc,mean,min,max\n";
    for (AttackModel model : result.models)
        for (const CurvePoint& p : flip_curve(result, model))
            out << to_string(model) << ',' << p.hc << ',' << format_double(p.mean) << ','
                << p.min << ',' << p.max << '\n';
    if (!out)
        fail(ErrorKind::Input, "write failed: " + path);
}

std::uint32_t PersistenceMap::bucket(std::uint32_t persistence) const {
    if (persistence == 0) return 0;
    return (4 * persistence + tiers - 1) / tiers;
}

void PersistenceMap::save_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Input, "cannot write " + path);
    out << "row,col,count,bucket\n";
    for (const auto& [cell, persistence] : counts)
        out << cell.row << ',' << cell.col << ',' << persistence << ','
            << bucket(persistence) << '\n';
    if (!out)
        fail(ErrorKind::Input, "write failed: " + path);
}

PersistenceMap persistence_map(const ProfileResult& result, AttackModel model) {
    check_model_present(result, model);
    if (result.hc_levels.size() < 2)
        fail(ErrorKind::Config, "persistence needs at least two hc levels");

    PersistenceMap map;
    map.model = model;
    map.rows = result.device.rows;
    map.cols = result.device.cols;
    map.tiers = static_cast<std::uint32_t>(result.hc_levels.size());

    std::map<CellCoord, std::uint32_t> counts;
    for (std::uint64_t hc : result.hc_levels) {
        // A cell appears at this tier if any trial flipped it.
        std::set<CellCoord> tier;
        for (std::uint32_t trial = 0; trial < result.trials; ++trial)
            for (const CellCoord& cell : result.record(model, hc, trial).flips)
                tier.insert(cell);
        for (const CellCoord& cell : tier) ++counts[cell];
    }
    map.counts.assign(counts.begin(), counts.end());
    return map;
}

double stability(const ProfileResult& result, AttackModel model, std::uint64_t hc) {
    check_model_present(result, model);
    if (result.trials < 2)
        fail(ErrorKind::Config, "stability needs at least two trials");
    std::uint64_t min = ~0ull, max = 0;
    double sum = 0;
    for (std::uint32_t trial = 0; trial < result.trials; ++trial) {
        const std::uint64_t n = result.record(model, hc, trial).flips.size();
        sum += static_cast<double>(n);
        min = std::min(min, n);
        max = std::max(max, n);
    }
    const double mean = sum / result.trials;
    if (mean == 0)
        fail(ErrorKind::Metric,
             "stability undefined: zero mean flip count at hc " + std::to_string(hc));
    return static_cast<double>(max - min) / mean;
}

std::vector<std::pair<std::uint64_t, double>> stability_series(const ProfileResult& result,
                                                               AttackModel model) {
    std::vector<std::pair<std::uint64_t, double>> series;
    for (std::uint64_t hc : result.hc_levels) {
        bool any = false;
        for (std::uint32_t trial = 0; trial < result.trials; ++trial)
            any |= !result.record(model, hc, trial).flips.empty();
        if (any) series.emplace_back(hc, stability(result, model, hc));
    }
    return series;
}

void save_result(const ProfileResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Input, "cannot write " + path);
    out << "# rhlab profile result v1\n";
    out << "# name = " << result.profile.name << "\n";
    out << "# class = " << to_string(result.profile.behavior_class) << "\n";
    out << "# w_diff = " << format_double(result.profile.w_diff) << "\n";
    out << "# w_same = " << format_double(result.profile.w_same) << "\n";
    out << "# threshold_median = " << format_double(result.profile.threshold_dist.median)
        << "\n";
    out << "# threshold_sigma = " << format_double(result.profile.threshold_dist.sigma)
        << "\n";
    out << "# noise_amp = " << format_double(result.profile.noise_amp) << "\n";
    out << "# rows = " << result.device.rows << "\n";
    out << "# cols = " << result.device.cols << "\n";
    out << "# device_seed = " << result.device.seed << "\n";
    out << "# t_ck = " << format_double(result.timing.t_ck) << "\n";
    out << "# t_ras = " << result.timing.t_ras << "\n";
    out << "# t_rp = " << result.timing.t_rp << "\n";
    out << "# t_refw = " << format_double(result.timing.t_refw) << "\n";
    out << "# sleep = " << result.timing.sleep << "\n";
    if (result.timing.allow_nonstandard)
        out << "# allow_nonstandard = 1\n";
    out << "# orientation = " << to_string(result.orientation) << "\n";
    out << "# trial_seed_base = " << result.trial_seed_base << "\n";
    out << "# trials = " << result.trials << "\n";
    out << "# models = ";
    for (std::size_t i = 0; i < result.models.size(); ++i)
        out << (i ? "," : "") << to_string(result.models[i]);
    out << "\n# hc_levels = ";
    for (std::size_t i = 0; i < result.hc_levels.size(); ++i)
        out << (i ? "," : "") << result.hc_levels[i];
    out << "\n# victim_rows = ";
    for (std::size_t i = 0; i < result.victim_rows.size(); ++i)
        out << (i ? "," : "") << result.victim_rows[i];
    out << "\n";
    for (const FlipRecord& rec : result.records) {
        out << to_string(rec.model) << ',' << rec.hc << ',' << rec.trial << ','
            << rec.flips.size() << ',';
        for (std::size_t i = 0; i < rec.flips.size(); ++i)
            out << (i ? " " : "") << rec.flips[i].row << ':' << rec.flips[i].col;
        out << '\n';
    }
    if (!out)
        fail(ErrorKind::Input, "write failed: " + path);
}

namespace {

[[noreturn]] void load_fail(const std::string& path, std::size_t lineno,
                            const std::string& message) {
    fail(ErrorKind::Parse, path + ":" + std::to_string(lineno) + ": " + message);
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t end = text.find(sep, start);
        parts.push_back(text.substr(start, end - start));
        if (end == std::string::npos) return parts;
        start = end + 1;
    }
}

std::uint64_t parse_u64(const std::string& path, std::size_t lineno, const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used);
    } catch (const std::exception&) {
        load_fail(path, lineno, "expected integer, got '" + s + "'");
    }
    if (used != s.size() || s.empty() || s[0] == '-')
        load_fail(path, lineno, "expected integer, got '" + s + "'");
    return v;
}

double parse_f64(const std::string& path, std::size_t lineno, const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        load_fail(path, lineno, "expected number, got '" + s + "'");
    }
    if (used != s.size() || s.empty())
        load_fail(path, lineno, "expected number, got '" + s + "'");
    return v;
}

}  // namespace

ProfileResult load_result(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::Input, "cannot read " + path);

    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line) || line != "# rhlab profile result v1")
        load_fail(path, 1, "missing result header");
    ++lineno;

    std::map<std::string, std::string> meta;
    std::vector<std::string> record_lines;
    std::vector<std::size_t> record_linenos;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::size_t eq = line.find(" = ");
            if (line.size() < 3 || line[1] != ' ' || eq == std::string::npos)
                load_fail(path, lineno, "malformed metadata line");
            meta[line.substr(2, eq - 2)] = line.substr(eq + 3);
        } else {
            record_lines.push_back(line);
            record_linenos.push_back(lineno);
        }
    }

    auto need = [&](const std::string& key) -> const std::string& {
        const auto it = meta.find(key);
        if (it == meta.end())
            fail(ErrorKind::Parse, path + ": missing metadata key '" + key + "'");
        return it->second;
    };

    ProfileResult result;
    result.profile.name = need("name");
    result.profile.behavior_class = behavior_class_from(need("class"));
    result.profile.w_diff = parse_f64(path, 0, need("w_diff"));
    result.profile.w_same = parse_f64(path, 0, need("w_same"));
    result.profile.threshold_dist.median = parse_f64(path, 0, need("threshold_median"));
    result.profile.threshold_dist.sigma = parse_f64(path, 0, need("threshold_sigma"));
    result.profile.noise_amp = parse_f64(path, 0, need("noise_amp"));
    result.device.rows = static_cast<std::uint32_t>(parse_u64(path, 0, need("rows")));
    result.device.cols = static_cast<std::uint32_t>(parse_u64(path, 0, need("cols")));
    result.device.seed = parse_u64(path, 0, need("device_seed"));
    result.timing.t_ck = parse_f64(path, 0, need("t_ck"));
    result.timing.t_ras = static_cast<std::int64_t>(parse_u64(path, 0, need("t_ras")));
    result.timing.t_rp = static_cast<std::int64_t>(parse_u64(path, 0, need("t_rp")));
    result.timing.t_refw = parse_f64(path, 0, need("t_refw"));
    result.timing.sleep = static_cast<std::int64_t>(parse_u64(path, 0, need("sleep")));
    result.timing.allow_nonstandard =
        meta.count("allow_nonstandard") && meta.at("allow_nonstandard") == "1";
    result.orientation = sg_orientation_from(need("orientation"));
    result.trial_seed_base = parse_u64(path, 0, need("trial_seed_base"));
    result.trials = static_cast<std::uint32_t>(parse_u64(path, 0, need("trials")));
    for (const std::string& name : split(need("models"), ','))
        result.models.push_back(attack_model_from(name));
    for (const std::string& v : split(need("hc_levels"), ','))
        result.hc_levels.push_back(parse_u64(path, 0, v));
    for (const std::string& v : split(need("victim_rows"), ','))
        result.victim_rows.push_back(static_cast<std::uint32_t>(parse_u64(path, 0, v)));
    result.profile.validate();
    result.device.validate();
    result.timing.validate();

    const std::size_t expected =
        result.models.size() * result.hc_levels.size() * result.trials;
    if (record_lines.size() != expected)
        fail(ErrorKind::Parse, path + ": expected " + std::to_string(expected) +
                                   " records, found " + std::to_string(record_lines.size()));

    std::size_t index = 0;
    for (AttackModel model : result.models) {
        for (std::uint64_t hc : result.hc_levels) {
            for (std::uint32_t trial = 0; trial < result.trials; ++trial, ++index) {
                const std::string& text = record_lines[index];
                const std::size_t at = record_linenos[index];
                const std::vector<std::string> fields = split(text, ',');
                if (fields.size() != 5)
                    load_fail(path, at, "record needs 5 comma-separated fields");
                FlipRecord rec;
                rec.model = attack_model_from(fields[0]);
                rec.hc = parse_u64(path, at, fields[1]);
                rec.trial = static_cast<std::uint32_t>(parse_u64(path, at, fields[2]));
                if (rec.model != model || rec.hc != hc || rec.trial != trial)
                    load_fail(path, at, "record out of grid order");
                const std::uint64_t count = parse_u64(path, at, fields[3]);
                if (!fields[4].empty()) {
                    for (const std::string& pair : split(fields[4], ' ')) {
                        const std::vector<std::string> rc = split(pair, ':');
                        if (rc.size() != 2)
                            load_fail(path, at, "flip entry needs row:col");
                        rec.flips.push_back(
                            {static_cast<std::uint32_t>(parse_u64(path, at, rc[0])),
                             static_cast<std::uint32_t>(parse_u64(path, at, rc[1]))});
                    }
                }
                if (rec.flips.size() != count)
                    load_fail(path, at, "flip count does not match list length");
                result.records.push_back(std::move(rec));
            }
        }
    }
    return result;
}

}  // namespace rhlab
