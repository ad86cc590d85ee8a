#pragma once

// Independent re-derivations used to cross-check the library. Everything here
// is deliberately written as straight-line definitions (full-array loops, no
// sparse indexes, no incremental updates) so a disagreement points at the
// optimized implementation.

#include <cmath>
#include <cstdint>
#include <vector>

#include "rhlab/bitvec.hpp"
#include "rhlab/device.hpp"
#include "rhlab/profiles.hpp"
#include "rhlab/rng.hpp"

namespace oracles {

// Frozen: floor(64e6 ns / 46.7 ns). Checked by hand:
// 1370449 * 46.7 = 63999968.3 <= 64e6 < 64000015.0 = 1370450 * 46.7.
inline constexpr std::int64_t kBudget64ms46p7ns = 1'370'449;

/// Standard normal CDF.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Threshold a device must assign to (row, col): same closed form, derived
/// from the rng primitives rather than Device internals.
inline double threshold(const rhlab::DeviceConfig& cfg, const rhlab::VendorProfile& prof,
                        std::uint32_t row, std::uint32_t col) {
    namespace rng = rhlab::rng;
    const std::uint64_t h = rng::mix(cfg.seed ^ rng::kSaltThreshold, rng::cell_key(row, col));
    return prof.threshold_dist.median * std::exp(prof.threshold_dist.sigma * rng::gaussian(h));
}

inline double jitter(const rhlab::DeviceConfig& cfg, const rhlab::VendorProfile& prof,
                     std::uint32_t row, std::uint32_t col, std::uint64_t trial_seed) {
    namespace rng = rhlab::rng;
    if (prof.noise_amp == 0.0) return 0.0;
    const std::uint64_t h =
        rng::mix(cfg.seed ^ rng::kSaltJitter, trial_seed, rng::cell_key(row, col));
    return prof.noise_amp * (2.0 * rng::unit(h) - 1.0);
}

/// Brute-force flip predicate over every column of the victim row. `rows`
/// holds the full current array contents, one BitVec per row.
inline std::vector<rhlab::CellCoord> flips(const rhlab::DeviceConfig& cfg,
                                           const rhlab::VendorProfile& prof,
                                           const std::vector<rhlab::BitVec>& rows,
                                           const rhlab::HammerContext& ctx,
                                           std::uint64_t trial_seed) {
    std::vector<rhlab::CellCoord> out;
    for (std::uint32_t c = 0; c < cfg.cols; ++c) {
        const bool bit = rows[ctx.victim_row].get(c);
        std::vector<bool> neighbor_bits;
        for (std::uint32_t nb : {ctx.victim_row > 0 ? ctx.victim_row - 1 : ctx.victim_row,
                                 ctx.victim_row + 1}) {
            if (nb == ctx.victim_row) continue;
            for (std::uint32_t h : ctx.hammered)
                if (h == nb) neighbor_bits.push_back(rows[nb].get(c));
        }
        bool any_diff = false;
        for (bool nb_bit : neighbor_bits)
            if (nb_bit != bit) any_diff = true;
        if (!any_diff) continue;
        const double d = rhlab::disturbance(bit, neighbor_bits, prof, ctx.hc);
        const double t = threshold(cfg, prof, ctx.victim_row, c);
        if (d >= t * (1.0 + jitter(cfg, prof, ctx.victim_row, c, trial_seed)))
            out.push_back({ctx.victim_row, c});
    }
    return out;
}

}  // namespace oracles
