#include "rhlab/execute.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "rhlab/errors.hpp"

namespace rhlab {

namespace {

class Executor {
public:
    Executor(Device& device, const CommandTrace& trace, std::uint64_t trial_seed)
        : dev_(device),
          trace_(trace),
          trial_seed_(trial_seed),
          acts_(device.rows(), 0),
          hammers_(device.rows(), 0) {}

    ExecutionLog run() {
        for (const Command& cmd : trace_.commands) step(cmd);
        if (row_open_ && !episode_data_)
            note_hammer(open_row_);
        apply_pending_flips();
        for (std::uint32_t r = 0; r < dev_.rows(); ++r) {
            if (acts_[r] > 0) log_.act_counts[r] = acts_[r];
            if (hammers_[r] > 0) log_.hammer_counts[r] = hammers_[r];
        }
        return std::move(log_);
    }

private:
    void step(const Command& cmd) {
        switch (cmd.kind) {
            case CommandKind::Act:
                if (cmd.arg >= dev_.rows())
                    fail(ErrorKind::Addressing,
                         "ACT row " + std::to_string(cmd.arg) + " outside device");
                row_open_ = true;
                open_row_ = cmd.arg;
                episode_data_ = false;
                ++acts_[cmd.arg];
                break;
            case CommandKind::Pre:
                if (!row_open_)
                    fail(ErrorKind::Protocol, "PRE with no open row");
                if (!episode_data_)
                    note_hammer(open_row_);
                row_open_ = false;
                break;
            case CommandKind::Rd: {
                if (!row_open_)
                    fail(ErrorKind::Protocol, "RD with no open row");
                episode_data_ = true;
                // Disturbance accumulated so far must be visible to the read.
                apply_pending_flips();
                const BitVec& row = dev_.row(open_row_);
                BitVec data(trace_.cols - cmd.arg);
                for (std::uint32_t c = cmd.arg; c < trace_.cols; ++c)
                    data.set(c - cmd.arg, row.get(c));
                log_.readbacks.push_back({cmd.cycle, open_row_, cmd.arg, std::move(data)});
                break;
            }
            case CommandKind::Wr: {
                if (!row_open_)
                    fail(ErrorKind::Protocol, "WR with no open row");
                episode_data_ = true;
                const BitVec& payload = trace_.payloads[cmd.payload];
                BitVec row = dev_.row(open_row_);
                for (std::uint32_t c = 0; c < payload.size(); ++c)
                    row.set(cmd.arg + c, payload.get(c));
                dev_.write_row(open_row_, row);
                break;
            }
            case CommandKind::Ref:
                // No cell-state effect; refresh-window bookkeeping is
                // validation's concern.
                break;
        }
    }

    void note_hammer(std::uint32_t row) {
        if (hammers_[row]++ == 0)
            hammered_rows_.insert(row);
        pending_ = true;
    }

    void apply_pending_flips() {
        if (!pending_) return;
        pending_ = false;

        std::set<std::uint32_t> victims;
        for (std::uint32_t row : hammered_rows_) {
            if (row > 0) victims.insert(row - 1);
            if (row + 1 < dev_.rows()) victims.insert(row + 1);
        }
        // Hammered rows refresh themselves with every activation.
        for (std::uint32_t row : hammered_rows_) victims.erase(row);

        for (std::uint32_t v : victims) {
            HammerContext ctx;
            ctx.victim_row = v;
            std::int64_t hc = -1;
            for (std::uint32_t nb : {v > 0 ? v - 1 : v, v + 1}) {
                if (nb == v || nb >= dev_.rows() || hammers_[nb] == 0) continue;
                ctx.hammered.push_back(nb);
                if (hc >= 0 && hc != hammers_[nb])
                    fail(ErrorKind::UnsupportedPattern,
                         "victim " + std::to_string(v) +
                             " has aggressors with unequal hammer counts (" +
                             std::to_string(hc) + " vs " + std::to_string(hammers_[nb]) +
                             ")");
                hc = hammers_[nb];
            }
            ctx.hc = static_cast<std::uint64_t>(hc);
            std::set<std::uint32_t>& done = applied_[v];
            for (const CellCoord& cell : dev_.compute_flips(ctx, trial_seed_)) {
                if (!done.insert(cell.col).second) continue;
                dev_.flip_bit(cell.row, cell.col);
                log_.flips.push_back(cell);
            }
        }
    }

    Device& dev_;
    const CommandTrace& trace_;
    std::uint64_t trial_seed_;
    ExecutionLog log_;
    std::vector<std::int64_t> acts_;
    std::vector<std::int64_t> hammers_;
    std::set<std::uint32_t> hammered_rows_;
    bool row_open_ = false;
    bool episode_data_ = false;
    std::uint32_t open_row_ = 0;
    bool pending_ = false;
    std::map<std::uint32_t, std::set<std::uint32_t>> applied_;
};

}  // namespace

ExecutionLog execute(Device& device, const CommandTrace& trace, std::uint64_t trial_seed) {
    if (trace.cols != device.cols())
        fail(ErrorKind::Shape, "trace cols " + std::to_string(trace.cols) +
                                   " != device cols " + std::to_string(device.cols()));
    const std::vector<Violation> violations = validate_trace(trace);
    if (!violations.empty()) {
        const Violation& v = violations.front();
        std::string msg = "trace fails validation: " + std::string(to_string(v.rule)) +
                          " at command " + std::to_string(v.index) + " (" + v.detail + ")";
        if (violations.size() > 1)
            msg += " and " + std::to_string(violations.size() - 1) + " more";
        fail(ErrorKind::Protocol, msg);
    }
    return Executor(device, trace, trial_seed).run();
}

std::vector<CellCoord> detect_bitflips(const ExecutionLog& log, const PatternSpec& spec,
                                       AttackModel model, SgOrientation orientation) {
    const std::uint32_t victim = victim_row(model, spec, orientation);
    const Readback* last = nullptr;
    for (const Readback& rb : log.readbacks)
        if (rb.row == victim && rb.col == 0) last = &rb;
    if (last == nullptr)
        fail(ErrorKind::Input,
             "log holds no full read-back of victim row " + std::to_string(victim));
    const BitVec& expected = victim_data(model, spec, orientation);
    std::vector<CellCoord> out;
    for (std::uint32_t col : last->data.diff(expected))
        out.push_back({victim, col});
    return out;
}

}  // namespace rhlab
