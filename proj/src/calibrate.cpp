#include "rhlab/profiler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "rhlab/errors.hpp"
#include "rhlab/rng.hpp"

namespace rhlab {

DeviceConfig reference_device() { return DeviceConfig{1024, 8192, 7}; }

std::vector<std::uint32_t> reference_victim_rows() {
    return default_victim_rows(reference_device().rows, 16);
}

namespace {

/// Standard-normal draws underlying the reference victims' thresholds,
/// ascending. Every victim cell's threshold is median * exp(sigma * g), so
/// noise-free flip counts are pure order statistics of this array.
std::vector<double> reference_gaussians() {
    const DeviceConfig cfg = reference_device();
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(reference_victim_rows().size()) * cfg.cols);
    for (std::uint32_t row : reference_victim_rows())
        for (std::uint32_t col = 0; col < cfg.cols; ++col)
            g.push_back(rng::gaussian(
                rng::mix(cfg.seed ^ rng::kSaltThreshold, rng::cell_key(row, col))));
    std::sort(g.begin(), g.end());
    return g;
}

/// Flip count at disturbance d with noise off: cells whose g puts their
/// threshold at or below d.
std::int64_t count_at(const std::vector<double>& g, double d, double median, double sigma) {
    const double z = std::log(d / median) / sigma;
    return std::upper_bound(g.begin(), g.end(), z) - g.begin();
}

/// Value of z with exactly n draws at or below it, centered in the gap so
/// the equality is robust to rounding in later arithmetic.
double quantile_split(const std::vector<double>& g, std::int64_t n) {
    return 0.5 * (g[n - 1] + g[n]);
}

}  // namespace

VendorProfile calibrate(const CalibrationTargets& targets, const std::string& name,
                        double noise_amp) {
    if (!(targets.vc_over_db > 0))
        fail(ErrorKind::Calibration, "vc_over_db target must be positive");
    if (!(targets.vc_over_sg > 1))
        fail(ErrorKind::Calibration, "vc_over_sg target must exceed 1");
    if (targets.sg_count < 1)
        fail(ErrorKind::Calibration, "sg_count target must be >= 1");

    const std::vector<double> g = reference_gaussians();
    const std::int64_t universe = static_cast<std::int64_t>(g.size());
    const bool overlap = targets.vc_over_db == 1.0;
    const std::int64_t n_sg = targets.sg_count;
    const std::int64_t n_vc = std::llround(targets.vc_over_sg * static_cast<double>(n_sg));
    const std::int64_t n_db =
        overlap ? n_vc : std::llround(static_cast<double>(n_vc) / targets.vc_over_db);
    for (std::int64_t n : {n_sg, n_vc, n_db})
        if (n >= universe)
            fail(ErrorKind::Calibration,
                 "target count " + std::to_string(n) + " exceeds the " +
                     std::to_string(universe) + " reference victim cells");
    if (n_db <= n_sg)
        fail(ErrorKind::Calibration, "targets need more DB flips than SG flips");

    // Analytic start: solve the three quantile equations exactly.
    //   count(hc*w_diff) = n_sg, count(2*hc*w_diff) = n_db,
    //   count(hc*(w_diff+w_same)) = n_vc, with w_diff fixed at 1.
    const double w_diff = 1.0;
    const double d_sg = static_cast<double>(kReferenceHc) * w_diff;
    const double z_sg = quantile_split(g, n_sg);
    const double z_db = quantile_split(g, n_db);
    double sigma = std::log(2.0) / (z_db - z_sg);
    double median = std::exp(std::log(d_sg) - sigma * z_sg);
    double w_same = overlap ? w_diff
                            : std::exp(sigma * (quantile_split(g, n_vc) - z_sg)) - 1.0;

    // Worst relative miss across the three targets.
    const auto objective = [&](double m, double s, double ws) {
        const std::int64_t sg = count_at(g, static_cast<double>(kReferenceHc) * w_diff, m, s);
        const std::int64_t db =
            count_at(g, 2.0 * static_cast<double>(kReferenceHc) * w_diff, m, s);
        const std::int64_t vc =
            overlap ? db
                    : count_at(g, static_cast<double>(kReferenceHc) * (w_diff + ws), m, s);
        if (sg == 0 || db == 0) return 1e9;
        const double e1 = std::fabs(static_cast<double>(vc) / static_cast<double>(db) -
                                    targets.vc_over_db) /
                          targets.vc_over_db;
        const double e2 = std::fabs(static_cast<double>(vc) / static_cast<double>(sg) -
                                    targets.vc_over_sg) /
                          targets.vc_over_sg;
        const double e3 = std::fabs(static_cast<double>(sg - n_sg)) /
                          static_cast<double>(n_sg);
        return std::max({e1, e2, e3});
    };

    // Deterministic coordinate descent with multiplicative steps; the
    // analytic start normally lands inside tolerance immediately.
    const double tolerance = 0.05;
    double best = objective(median, sigma, w_same);
    double step = 0.05;
    for (int iteration = 0; iteration < 400 && best > tolerance; ++iteration) {
        bool improved = false;
        const int coords = overlap ? 2 : 3;
        for (int coord = 0; coord < coords; ++coord) {
            for (double factor : {1.0 + step, 1.0 / (1.0 + step)}) {
                double m = median, s = sigma, ws = w_same;
                (coord == 0 ? m : coord == 1 ? s : ws) *= factor;
                const double candidate = objective(m, s, ws);
                if (candidate < best) {
                    best = candidate;
                    median = m;
                    sigma = s;
                    w_same = ws;
                    improved = true;
                }
            }
        }
        if (!improved) {
            step *= 0.5;
            if (step < 1e-9) break;
        }
    }
    if (best > tolerance) {
        std::ostringstream report;
        report.precision(17);
        report << "targets missed by " << best * 100 << "% relative; best found median="
               << median << " sigma=" << sigma << " w_same=" << w_same;
        fail(ErrorKind::Calibration, report.str());
    }

    VendorProfile profile;
    profile.name = name;
    profile.behavior_class = overlap ? BehaviorClass::Overlap
                             : targets.vc_over_db < 1.0 ? BehaviorClass::Reduced
                                                        : BehaviorClass::Inverted;
    profile.w_diff = w_diff;
    profile.w_same = w_same;
    profile.threshold_dist = {median, sigma};
    profile.noise_amp = noise_amp;
    profile.validate();
    return profile;
}

}  // namespace rhlab
