#include "rhlab/pattern.hpp"

#include "rhlab/errors.hpp"

namespace rhlab {

const char* to_string(AttackModel model) {
    switch (model) {
        case AttackModel::SG: return "SG";
        case AttackModel::VC: return "VC";
        case AttackModel::DB: return "DB";
    }
    return "?";
}

AttackModel attack_model_from(const std::string& name) {
    if (name == "SG") return AttackModel::SG;
    if (name == "VC") return AttackModel::VC;
    if (name == "DB") return AttackModel::DB;
    fail(ErrorKind::Parse, "unknown attack model: " + name);
}

const char* to_string(SgOrientation orientation) {
    return orientation == SgOrientation::HammerSecond ? "hammer-second" : "hammer-first";
}

SgOrientation sg_orientation_from(const std::string& name) {
    if (name == "hammer-second") return SgOrientation::HammerSecond;
    if (name == "hammer-first") return SgOrientation::HammerFirst;
    fail(ErrorKind::Parse, "unknown orientation: " + name);
}

void PatternSpec::validate(std::uint32_t rows, std::uint32_t cols,
                           const TimingParams& timing) const {
    if (data_pattern.size() != cols || data_pattern_inv.size() != cols)
        fail(ErrorKind::Config, "data pattern width does not match cols");
    if (data_pattern_inv != data_pattern.complement())
        fail(ErrorKind::Config, "data_pattern_inv is not the complement of data_pattern");
    if (static_cast<std::uint64_t>(initial_row) + 2 >= rows)
        fail(ErrorKind::Addressing,
             "window " + std::to_string(initial_row) + ".." +
                 std::to_string(initial_row + 2) + " does not fit in " +
                 std::to_string(rows) + " rows");
    const std::int64_t budget = hammer_budget(timing);
    if (hc > static_cast<std::uint64_t>(budget))
        fail(ErrorKind::Budget, "hc " + std::to_string(hc) + " exceeds activation budget " +
                                    std::to_string(budget));
}

PatternSpec make_pattern_spec(std::uint32_t initial_row, std::uint32_t cols,
                              std::uint64_t hc) {
    PatternSpec spec;
    spec.initial_row = initial_row;
    spec.data_pattern = BitVec::ones(cols);
    spec.data_pattern_inv = spec.data_pattern.complement();
    spec.hc = hc;
    return spec;
}

std::uint32_t victim_row(AttackModel model, const PatternSpec& spec,
                         SgOrientation orientation) {
    if (model == AttackModel::SG)
        return orientation == SgOrientation::HammerSecond ? spec.initial_row
                                                          : spec.initial_row + 1;
    return spec.initial_row + 1;
}

const BitVec& victim_data(AttackModel model, const PatternSpec& spec,
                          SgOrientation orientation) {
    if (model == AttackModel::SG && orientation == SgOrientation::HammerSecond)
        return spec.data_pattern;
    return spec.data_pattern_inv;
}

namespace {

/// Appends writes, hammers, and read-backs with minimal legal spacing.
class ProgramBuilder {
public:
    ProgramBuilder(const TimingParams& timing, std::uint32_t cols) {
        trace_.timing = timing;
        trace_.cols = cols;
    }

    void reserve(std::size_t commands) { trace_.commands.reserve(commands); }

    void write(std::uint32_t row, const BitVec& data) {
        trace_.act(cycle_, row);
        trace_.wr(cycle_ + 1, 0, data);
        close_row();
    }

    void hammer_once(std::uint32_t row) {
        trace_.act(cycle_, row);
        close_row();
    }

    void read(std::uint32_t row) {
        trace_.act(cycle_, row);
        trace_.rd(cycle_ + 1, 0);
        close_row();
    }

    /// Closes the refresh window so phases budget their activations
    /// independently.
    void refresh() {
        trace_.ref(cycle_);
        ++cycle_;
    }

    CommandTrace take() { return std::move(trace_); }

private:
    void close_row() {
        trace_.pre(cycle_ + trace_.timing.t_ras);
        cycle_ += trace_.timing.t_ras + trace_.timing.t_rp;
    }

    CommandTrace trace_;
    std::int64_t cycle_ = 0;
};

}  // namespace

CommandTrace build_program(AttackModel model, const PatternSpec& spec,
                           const TimingParams& timing, std::uint32_t rows,
                           SgOrientation orientation) {
    timing.validate();
    spec.validate(rows, static_cast<std::uint32_t>(spec.data_pattern.size()), timing);

    const std::uint32_t r = spec.initial_row;
    const bool two_sided = model != AttackModel::SG;
    ProgramBuilder b(timing, static_cast<std::uint32_t>(spec.data_pattern.size()));
    b.reserve((two_sided ? 4 : 2) * spec.hc + 32);

    switch (model) {
        case AttackModel::SG:
            // Layout (pattern, complement); one aggressor next to one victim.
            b.write(r, spec.data_pattern);
            b.write(r + 1, spec.data_pattern_inv);
            break;
        case AttackModel::VC:
            // Middle row is the victim; the far aggressor clones its data.
            b.write(r, spec.data_pattern);
            b.write(r + 1, spec.data_pattern_inv);
            b.write(r + 2, spec.data_pattern_inv);
            break;
        case AttackModel::DB:
            // Both aggressors differ from the middle victim at every column.
            b.write(r, spec.data_pattern);
            b.write(r + 1, spec.data_pattern_inv);
            b.write(r + 2, spec.data_pattern);
            break;
    }

    b.refresh();
    if (two_sided) {
        for (std::uint64_t i = 0; i < spec.hc; ++i) {
            b.hammer_once(r);
            b.hammer_once(r + 2);
        }
    } else {
        const std::uint32_t aggressor =
            orientation == SgOrientation::HammerSecond ? r + 1 : r;
        for (std::uint64_t i = 0; i < spec.hc; ++i)
            b.hammer_once(aggressor);
    }

    b.refresh();
    for (std::uint32_t row = r; row <= r + 2; ++row)
        b.read(row);

    return b.take();
}

}  // namespace rhlab
