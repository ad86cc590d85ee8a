#pragma once

#include <cstdint>
#include <string>

#include "rhlab/bitvec.hpp"
#include "rhlab/trace.hpp"

namespace rhlab {

/// SG: one aggressor. VC: two aggressors, one holding a copy of the victim's
/// data. DB: two aggressors, both holding the victim's complement.
enum class AttackModel { SG, VC, DB };

const char* to_string(AttackModel model);
AttackModel attack_model_from(const std::string& name);

/// Which of the two written rows the single-sided variant hammers. The data
/// layout is the same either way: data_pattern at initial_row, its complement
/// at initial_row+1.
enum class SgOrientation {
    HammerSecond,  ///< aggressor initial_row+1, victim initial_row (default)
    HammerFirst,   ///< aggressor initial_row, victim initial_row+1
};

const char* to_string(SgOrientation orientation);
SgOrientation sg_orientation_from(const std::string& name);

/// Inputs to one generated test program over a 3-row window starting at
/// initial_row.
struct PatternSpec {
    std::uint32_t initial_row = 0;
    BitVec data_pattern;      ///< row-width bits; all-ones by default
    BitVec data_pattern_inv;  ///< bitwise complement of data_pattern
    std::uint64_t hc = 0;     ///< activations per aggressor

    /// Throws config/addressing/budget errors on inconsistent fields.
    void validate(std::uint32_t rows, std::uint32_t cols, const TimingParams& timing) const;
};

/// All-ones data pattern, the default fill.
PatternSpec make_pattern_spec(std::uint32_t initial_row, std::uint32_t cols, std::uint64_t hc);

/// Row the generated program measures for flips.
std::uint32_t victim_row(AttackModel model, const PatternSpec& spec,
                         SgOrientation orientation = SgOrientation::HammerSecond);

/// Data the victim row holds after setup.
const BitVec& victim_data(AttackModel model, const PatternSpec& spec,
                          SgOrientation orientation = SgOrientation::HammerSecond);

/// Full test program: data-layout writes, hc hammer iterations per aggressor
/// (two-sided aggressors interleaved), then a read-back of the 3-row window.
/// The result always passes validate_trace.
CommandTrace build_program(AttackModel model, const PatternSpec& spec,
                           const TimingParams& timing, std::uint32_t rows,
                           SgOrientation orientation = SgOrientation::HammerSecond);

}  // namespace rhlab
