#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include "rhlab/bitvec.hpp"
#include "rhlab/profiles.hpp"

namespace rhlab {

struct DeviceConfig {
    std::uint32_t rows = 1024;
    std::uint32_t cols = 8192;
    std::uint64_t seed = 7;  ///< fixes every per-cell threshold

    void validate() const;
};

struct CellCoord {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    auto operator<=>(const CellCoord&) const = default;
};

/// One hammering episode against a single victim row.
struct HammerContext {
    std::uint32_t victim_row = 0;
    std::vector<std::uint32_t> hammered;  ///< subset of {victim_row-1, victim_row+1}
    std::uint64_t hc = 0;                 ///< activations per hammered neighbor
};

/// Largest per-neighbor hammer count the disturbance model covers; the
/// vulnerable-cell index is sized against it.
inline constexpr std::uint64_t kHammerHorizon = 2'000'000;

/// Cumulative disturbance on a cell: hc * sum of per-neighbor weights,
/// w_diff where the hammered neighbor's bit differs, w_same where it matches.
double disturbance(bool cell_bit, const std::vector<bool>& hammered_neighbor_bits,
                   const VendorProfile& profile, std::uint64_t hc);

/// Simulated single-bank DRAM array. Stored bits are mutable; per-cell flip
/// thresholds are a pure function of (config.seed, row, col) and never change.
/// Single writer at a time; clone by re-constructing with the same inputs.
class Device {
public:
    Device(const DeviceConfig& config, const VendorProfile& profile);

    std::uint32_t rows() const { return cfg_.rows; }
    std::uint32_t cols() const { return cfg_.cols; }
    const DeviceConfig& config() const { return cfg_; }
    const VendorProfile& profile() const { return prof_; }

    void write_row(std::uint32_t row, const BitVec& pattern);
    const BitVec& row(std::uint32_t row) const;

    /// Inverts one stored bit.
    void flip_bit(std::uint32_t row, std::uint32_t col);

    /// Zeroes every stored bit. Thresholds are untouched, so this is
    /// equivalent to constructing a fresh device with the same inputs.
    void reset();

    /// Closed-form threshold for any cell, vulnerable or not.
    double threshold_at(std::uint32_t row, std::uint32_t col) const;

    /// Relative threshold jitter for one trial, uniform in +-noise_amp.
    double jitter_at(std::uint32_t row, std::uint32_t col, std::uint64_t trial_seed) const;

    /// Cells of the victim row that flip under ctx: at least one hammered
    /// neighbor differs at that column and disturbance reaches the jittered
    /// threshold. Ascending column order. Does not modify the device.
    std::vector<CellCoord> compute_flips(const HammerContext& ctx,
                                         std::uint64_t trial_seed) const;

    /// compute_flips plus inverting the flipped bits in place.
    std::vector<CellCoord> flips_for(const HammerContext& ctx, std::uint64_t trial_seed);

    /// Number of index entries (cells that could flip within the horizon).
    std::size_t vulnerable_cells() const;

private:
    void check_context(const HammerContext& ctx) const;

    struct VulnCell {
        std::uint32_t col;
        double threshold;
    };

    DeviceConfig cfg_;
    VendorProfile prof_;
    double cutoff_;                        ///< max threshold reachable within the horizon
    std::vector<BitVec> data_;
    std::vector<std::vector<VulnCell>> vuln_;  ///< per row, ascending col
};

}  // namespace rhlab
