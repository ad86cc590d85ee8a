#pragma once

#include <cstdint>

namespace rhlab {

/// DDR4 timing constants. Times are nanoseconds, gaps are cycles.
struct TimingParams {
    double t_ck = 1.0 / 1.2;     ///< ns per cycle (DDR4-2400: 1200 MHz clock)
    std::int64_t t_ras = 39;     ///< min ACT -> PRE gap, cycles; covers ACT + sleep + PRE issue
    std::int64_t t_rp = 17;      ///< min PRE -> ACT gap, cycles
    double t_refw = 64.0e6;      ///< refresh window, ns; 0 means no activation allowance
    std::int64_t sleep = 5;      ///< idle cycles between ACT and PRE inside one hammer
    bool allow_nonstandard = false;  ///< lifts the 36..48 t_ras range check

    /// Throws a config error when a field is out of range.
    void validate() const;
};

/// DDR4-2400 defaults.
TimingParams ddr4_2400();

/// Which gap counts as one hammer period.
/// ActToAct: full close-to-open cycle, (t_ras + t_rp) * t_ck. Default; with
/// DDR4-2400 numbers this is the convention whose 64 ms budget lands at ~1.37M.
/// RasOnly: t_ras * t_ck alone, for the looser reading of the row-active time.
enum class BudgetConvention { ActToAct, RasOnly };

/// Max activations to one row inside one refresh window:
/// floor(t_refw / period). Requires validated timing.
std::int64_t hammer_budget(const TimingParams& timing,
                           BudgetConvention convention = BudgetConvention::ActToAct);

}  // namespace rhlab
