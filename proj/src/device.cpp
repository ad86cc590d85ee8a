#include "rhlab/device.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rhlab/errors.hpp"
#include "rhlab/rng.hpp"

namespace rhlab {

void DeviceConfig::validate() const {
    if (rows < 3)
        fail(ErrorKind::Config, "rows must be >= 3, got " + std::to_string(rows));
    if (cols < 1)
        fail(ErrorKind::Config, "cols must be >= 1");
}

double disturbance(bool cell_bit, const std::vector<bool>& hammered_neighbor_bits,
                   const VendorProfile& profile, std::uint64_t hc) {
    double sum = 0.0;
    for (bool neighbor_bit : hammered_neighbor_bits)
        sum += neighbor_bit != cell_bit ? profile.w_diff : profile.w_same;
    return static_cast<double>(hc) * sum;
}

Device::Device(const DeviceConfig& config, const VendorProfile& profile)
    : cfg_(config), prof_(profile) {
    cfg_.validate();
    prof_.validate();
    // A cell can flip only if some reachable disturbance meets its jittered
    // threshold: T * (1 - noise_amp) <= horizon * max weight sum.
    const double max_weight = prof_.w_diff + std::max(prof_.w_diff, prof_.w_same);
    cutoff_ = static_cast<double>(kHammerHorizon) * max_weight / (1.0 - prof_.noise_amp);
    data_.assign(cfg_.rows, BitVec(cfg_.cols));
    vuln_.resize(cfg_.rows);
    for (std::uint32_t r = 0; r < cfg_.rows; ++r) {
        for (std::uint32_t c = 0; c < cfg_.cols; ++c) {
            const double t = threshold_at(r, c);
            if (t <= cutoff_)
                vuln_[r].push_back({c, t});
        }
    }
}

void Device::write_row(std::uint32_t row, const BitVec& pattern) {
    if (row >= cfg_.rows)
        fail(ErrorKind::Addressing, "row " + std::to_string(row) + " out of range");
    if (pattern.size() != cfg_.cols)
        fail(ErrorKind::Shape, "pattern length " + std::to_string(pattern.size()) +
                                   " != cols " + std::to_string(cfg_.cols));
    data_[row] = pattern;
}

const BitVec& Device::row(std::uint32_t row) const {
    if (row >= cfg_.rows)
        fail(ErrorKind::Addressing, "row " + std::to_string(row) + " out of range");
    return data_[row];
}

void Device::flip_bit(std::uint32_t row, std::uint32_t col) {
    if (row >= cfg_.rows || col >= cfg_.cols)
        fail(ErrorKind::Addressing, "cell " + std::to_string(row) + ":" +
                                        std::to_string(col) + " out of range");
    data_[row].flip(col);
}

void Device::reset() {
    for (BitVec& r : data_) r = BitVec(cfg_.cols);
}

double Device::threshold_at(std::uint32_t row, std::uint32_t col) const {
    const std::uint64_t h =
        rng::mix(cfg_.seed ^ rng::kSaltThreshold, rng::cell_key(row, col));
    return prof_.threshold_dist.median *
           std::exp(prof_.threshold_dist.sigma * rng::gaussian(h));
}

double Device::jitter_at(std::uint32_t row, std::uint32_t col,
                         std::uint64_t trial_seed) const {
    if (prof_.noise_amp == 0.0) return 0.0;
    const std::uint64_t h =
        rng::mix(cfg_.seed ^ rng::kSaltJitter, trial_seed, rng::cell_key(row, col));
    return prof_.noise_amp * (2.0 * rng::unit(h) - 1.0);
}

void Device::check_context(const HammerContext& ctx) const {
    if (ctx.victim_row >= cfg_.rows)
        fail(ErrorKind::Addressing,
             "victim row " + std::to_string(ctx.victim_row) + " out of range");
    if (ctx.hammered.empty())
        fail(ErrorKind::Addressing, "no hammered neighbors given");
    for (std::uint32_t h : ctx.hammered) {
        const bool adjacent = (ctx.victim_row > 0 && h == ctx.victim_row - 1) ||
                              h == ctx.victim_row + 1;
        if (!adjacent || h >= cfg_.rows)
            fail(ErrorKind::Addressing,
                 "row " + std::to_string(h) + " is not a neighbor of victim " +
                     std::to_string(ctx.victim_row) + " inside the bank");
    }
    if (ctx.hammered.size() > 2)
        fail(ErrorKind::Addressing, "more than two hammered neighbors");
    if (ctx.hammered.size() == 2 && ctx.hammered[0] == ctx.hammered[1])
        fail(ErrorKind::Addressing, "duplicate hammered neighbor");
    if (ctx.hc > kHammerHorizon)
        fail(ErrorKind::Budget, "hc " + std::to_string(ctx.hc) +
                                    " beyond supported horizon " +
                                    std::to_string(kHammerHorizon));
}

std::vector<CellCoord> Device::compute_flips(const HammerContext& ctx,
                                             std::uint64_t trial_seed) const {
    check_context(ctx);
    std::vector<CellCoord> out;
    if (ctx.hc == 0) return out;

    // Fixed neighbor order (victim-1 first) keeps the weight sum bit-stable.
    std::vector<const BitVec*> neighbors;
    for (std::uint32_t h : ctx.hammered)
        if (ctx.victim_row > 0 && h == ctx.victim_row - 1) neighbors.push_back(&data_[h]);
    for (std::uint32_t h : ctx.hammered)
        if (h == ctx.victim_row + 1) neighbors.push_back(&data_[h]);

    const double hc = static_cast<double>(ctx.hc);
    for (const VulnCell& cell : vuln_[ctx.victim_row]) {
        const bool bit = data_[ctx.victim_row].get(cell.col);
        bool any_diff = false;
        double sum = 0.0;
        for (const BitVec* nb : neighbors) {
            const bool nb_bit = nb->get(cell.col);
            if (nb_bit != bit) {
                any_diff = true;
                sum += prof_.w_diff;
            } else {
                sum += prof_.w_same;
            }
        }
        if (!any_diff) continue;
        const double d = hc * sum;
        if (d >= cell.threshold * (1.0 + jitter_at(ctx.victim_row, cell.col, trial_seed)))
            out.push_back({ctx.victim_row, cell.col});
    }
    return out;
}

std::vector<CellCoord> Device::flips_for(const HammerContext& ctx, std::uint64_t trial_seed) {
    std::vector<CellCoord> out = compute_flips(ctx, trial_seed);
    for (const CellCoord& cell : out) data_[cell.row].flip(cell.col);
    return out;
}

std::size_t Device::vulnerable_cells() const {
    std::size_t n = 0;
    for (const auto& row : vuln_) n += row.size();
    return n;
}

}  // namespace rhlab
