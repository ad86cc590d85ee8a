#include "rhlab/timing.hpp"

#include <cmath>
#include <string>

#include "rhlab/errors.hpp"

namespace rhlab {

void TimingParams::validate() const {
    if (!(t_ck > 0))
        fail(ErrorKind::Config, "t_ck must be > 0");
    if (!allow_nonstandard && (t_ras < 36 || t_ras > 48))
        fail(ErrorKind::Config, "t_ras " + std::to_string(t_ras) +
                                    " outside 36..48 cycles; set allow_nonstandard to override");
    if (t_ras < 1)
        fail(ErrorKind::Config, "t_ras must be >= 1");
    if (t_rp <= 0)
        fail(ErrorKind::Config, "t_rp must be > 0");
    if (!(t_refw >= 0))
        fail(ErrorKind::Config, "t_refw must be >= 0");
    if (sleep < 0)
        fail(ErrorKind::Config, "sleep must be >= 0");
    if (sleep + 2 > t_ras)
        fail(ErrorKind::Config, "t_ras too short to hold ACT + sleep + PRE");
}

TimingParams ddr4_2400() { return TimingParams{}; }

std::int64_t hammer_budget(const TimingParams& timing, BudgetConvention convention) {
    timing.validate();
    const std::int64_t cycles =
        convention == BudgetConvention::ActToAct ? timing.t_ras + timing.t_rp : timing.t_ras;
    const double period = static_cast<double>(cycles) * timing.t_ck;
    return static_cast<std::int64_t>(std::floor(timing.t_refw / period));
}

}  // namespace rhlab
