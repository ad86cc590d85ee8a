#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "rhlab/bitvec.hpp"
#include "rhlab/device.hpp"
#include "rhlab/pattern.hpp"
#include "rhlab/trace.hpp"

namespace rhlab {

struct Readback {
    std::int64_t cycle = 0;
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    BitVec data;  ///< stored bits col..cols-1 at read time
};

struct ExecutionLog {
    std::map<std::uint32_t, std::int64_t> act_counts;     ///< every ACT, per row
    std::map<std::uint32_t, std::int64_t> hammer_counts;  ///< data-less ACT..PRE episodes
    std::vector<Readback> readbacks;
    std::vector<CellCoord> flips;  ///< all disturbance flips applied, in application order
};

/// Replays a validated trace against the device. An ACT..PRE episode with no
/// RD/WR inside is one hammer; episodes that touch data are accesses and do
/// not disturb neighbors. Disturbance flips land on rows adjacent to hammered
/// rows (hammered rows themselves are refreshed by their own activations)
/// before any subsequent RD and at trace end, using the cumulative hammer
/// counts; a cell flips at most once per execution.
///
/// Throws: protocol error when the trace fails validation; addressing error
/// for rows outside the device; shape error on cols mismatch;
/// unsupported-pattern error when a victim's two aggressors have unequal
/// hammer counts at a point where flips must be applied.
ExecutionLog execute(Device& device, const CommandTrace& trace, std::uint64_t trial_seed);

/// Differences between the victim row's read-back and what the program wrote
/// there. Input error if the log holds no full-width read-back of that row.
std::vector<CellCoord> detect_bitflips(const ExecutionLog& log, const PatternSpec& spec,
                                       AttackModel model,
                                       SgOrientation orientation = SgOrientation::HammerSecond);

}  // namespace rhlab
