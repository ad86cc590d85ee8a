#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rhlab/device.hpp"
#include "rhlab/profiler.hpp"

namespace rhlab {

/// How many distinct security levels the classification could support.
enum class Scheme {
    FourLevel,   ///< levels 1..4 all meaningful
    ThreeLevel,  ///< level 2 deleted (DB adds almost nothing over VC)
    TwoLevel,    ///< nesting failed; only levels 1 and 4 remain
};

const char* to_string(Scheme scheme);
Scheme scheme_from(const std::string& name);

/// Per-cell security level over a rows x cols universe. Level 4 flips under
/// single-sided hammering, level 3 needs a victim clone, level 2 needs true
/// double-sided pressure, level 1 withstands everything.
struct SecurityLevelMap {
    Scheme scheme = Scheme::FourLevel;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<std::uint8_t> levels;  ///< row-major, values 1..4

    std::uint8_t level_at(std::uint32_t row, std::uint32_t col) const;

    /// CSV export: row,col,level for cells above level 1 (level 1 is the
    /// implicit background; the bitmap carries the full map). The first
    /// line records the scheme as a `# scheme = ...` comment.
    void save_csv(const std::string& path) const;

    /// Compact binary export: "RHLV" magic, format version, scheme, rows,
    /// cols, then 2 bits per cell (level - 1), row-major, four cells per
    /// byte, least significant pair first.
    void save_bitmap(const std::string& path) const;
};

SecurityLevelMap load_bitmap(const std::string& path);

struct LevelCounts {
    std::uint64_t level1 = 0;
    std::uint64_t level2 = 0;
    std::uint64_t level3 = 0;
    std::uint64_t level4 = 0;

    std::uint64_t total() const { return level1 + level2 + level3 + level4; }
    std::uint64_t flipped() const { return level2 + level3 + level4; }
};

/// Assigns a level to every cell of the universe from the three flip sets.
/// Nesting failure (SG through VC through DB) collapses to two levels; a DB
/// set that adds at most overlap_epsilon * |DB| cells over VC deletes level 2.
/// Cells outside the universe raise an addressing error.
SecurityLevelMap classify(const std::vector<CellCoord>& flips_sg,
                          const std::vector<CellCoord>& flips_vc,
                          const std::vector<CellCoord>& flips_db, std::uint32_t rows,
                          std::uint32_t cols, double overlap_epsilon = 0.02);

LevelCounts level_counts(const SecurityLevelMap& map);

/// Cells that flipped in any trial at one (model, hc) grid point, ascending.
std::vector<CellCoord> union_flips(const ProfileResult& result, AttackModel model,
                                   std::uint64_t hc);

/// Thresholds for recommend_defense; the CLI loads overrides from config.
struct DefensePolicy {
    double scarce_level4 = 0.01;     ///< level 4 share of flipped cells below this is "scarce"
    double balanced_max_share = 0.5; ///< balanced when no level holds more of the flipped cells

    void validate() const;
};

/// Deterministic rule table over level populations:
///   no flipped cells                     -> "no action needed"
///   level 4 scarce among flipped cells   -> "double-sided-focused"
///   no level dominates the flipped cells -> "counter-based"
///   otherwise                            -> "targeted-upper-levels"
std::string recommend_defense(const LevelCounts& counts, const DefensePolicy& policy = {});

}  // namespace rhlab
