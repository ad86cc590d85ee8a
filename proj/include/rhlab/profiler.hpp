#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rhlab/device.hpp"
#include "rhlab/pattern.hpp"
#include "rhlab/profiles.hpp"
#include "rhlab/timing.hpp"

namespace rhlab {

/// Largest per-aggressor hammer count a sweep may request.
inline constexpr std::uint64_t kMaxSweepHc = 1'000'000;

/// Eight logarithmically spaced hammer-count levels from 10K to 1M.
std::vector<std::uint64_t> default_hc_levels();

/// `count` victim rows starting at row 17, spaced 64 apart. Throws an
/// addressing error when the last window does not fit in `rows`.
std::vector<std::uint32_t> default_victim_rows(std::uint32_t rows, std::uint32_t count);

/// One profiling campaign: models x hc levels x trials, each grid point
/// measured over every victim row.
struct SweepPlan {
    std::string profile;  ///< built-in vendor name or profile file path
    DeviceConfig device;
    TimingParams timing;
    std::vector<AttackModel> models{AttackModel::SG, AttackModel::VC, AttackModel::DB};
    std::vector<std::uint64_t> hc_levels = default_hc_levels();
    std::uint32_t trials = 5;
    std::uint64_t trial_seed_base = 1;  ///< trial t uses trial_seed_base + t
    std::vector<std::uint32_t> victim_rows;  ///< ascending, gaps >= 4 rows
    SgOrientation orientation = SgOrientation::HammerSecond;
    std::uint32_t workers = 0;  ///< grid-point parallelism; 0 = hardware

    void validate() const;
};

/// Flips observed at one grid point, unioned over the plan's victim rows.
struct FlipRecord {
    AttackModel model = AttackModel::SG;
    std::uint64_t hc = 0;
    std::uint32_t trial = 0;
    std::vector<CellCoord> flips;  ///< ascending (row, col)
};

struct ProfileResult {
    VendorProfile profile;
    DeviceConfig device;
    TimingParams timing;
    SgOrientation orientation = SgOrientation::HammerSecond;
    std::uint64_t trial_seed_base = 1;
    std::uint32_t trials = 0;
    std::vector<AttackModel> models;
    std::vector<std::uint64_t> hc_levels;
    std::vector<std::uint32_t> victim_rows;
    std::vector<FlipRecord> records;  ///< complete grid: model-major, then hc, then trial

    const FlipRecord& record(AttackModel model, std::uint64_t hc, std::uint32_t trial) const;
};

/// Runs the full grid. Every grid point executes on a pristine copy of the
/// same device (thresholds are pure functions of the seed, so a copy equals a
/// fresh construction); trials differ only in trial seed. Deterministic for a
/// fixed plan regardless of worker count.
ProfileResult run_sweep(const SweepPlan& plan);

/// Same, with the vendor parameters supplied directly instead of resolving
/// plan.profile.
ProfileResult run_sweep(const SweepPlan& plan, const VendorProfile& profile);

struct CurvePoint {
    std::uint64_t hc = 0;
    double mean = 0;
    std::uint64_t min = 0;
    std::uint64_t max = 0;
};

/// Flip counts per hc level aggregated over trials.
std::vector<CurvePoint> flip_curve(const ProfileResult& result, AttackModel model);

/// Writes every model's curve as CSV: model,hc,mean,min,max.
void save_curves_csv(const ProfileResult& result, const std::string& path);

/// Per-cell count of hc tiers at which the cell flipped (in any trial).
struct PersistenceMap {
    AttackModel model = AttackModel::SG;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::uint32_t tiers = 0;  ///< number of hc levels in the sweep
    std::vector<std::pair<CellCoord, std::uint32_t>> counts;  ///< nonzero, ascending cell

    /// Four-color scale: ceil(4 * persistence / tiers); 0 stays unhighlighted.
    std::uint32_t bucket(std::uint32_t persistence) const;

    /// CSV export: row,col,count,bucket (flipped cells only).
    void save_csv(const std::string& path) const;
};

PersistenceMap persistence_map(const ProfileResult& result, AttackModel model);

/// Relative fluctuation (max - min) / mean of flip counts over trials at one
/// hc level. Undefined-metric error when the mean is zero.
double stability(const ProfileResult& result, AttackModel model, std::uint64_t hc);

/// stability at every hc level; levels with zero mean are omitted.
std::vector<std::pair<std::uint64_t, double>> stability_series(const ProfileResult& result,
                                                               AttackModel model);

void save_result(const ProfileResult& result, const std::string& path);
ProfileResult load_result(const std::string& path);

/// Desired flip-count structure at the reference hammer count, hc = 1M.
struct CalibrationTargets {
    double vc_over_db = 0.75;   ///< 1.0 selects the overlap class exactly
    double vc_over_sg = 5.0;    ///< must exceed 1
    std::int64_t sg_count = 1200;  ///< absolute anchor; sets the overall scale
};

/// Fixed device all calibrated numbers refer to: 1024 x 8192, seed 7.
DeviceConfig reference_device();

/// Sixteen victim rows on the reference device: 17, 81, ..., 977.
std::vector<std::uint32_t> reference_victim_rows();

inline constexpr std::uint64_t kReferenceHc = 1'000'000;

/// Solves (threshold median, sigma, w_same) so that noise-free flip counts on
/// the reference device hit the targets at hc = 1M, then polishes by
/// deterministic coordinate descent until every ratio is within 5% relative.
/// The returned profile carries `name`, `noise_amp`, and the behavior class
/// implied by vc_over_db. Calibration error on non-convergence.
VendorProfile calibrate(const CalibrationTargets& targets,
                        const std::string& name = "calibrated", double noise_amp = 0.0);

}  // namespace rhlab
