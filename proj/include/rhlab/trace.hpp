#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "rhlab/bitvec.hpp"
#include "rhlab/timing.hpp"

namespace rhlab {

enum class CommandKind : std::uint8_t { Act, Pre, Rd, Wr, Ref };

const char* to_string(CommandKind kind);

/// One timestamped DRAM command. arg is the row for ACT, the start column
/// for RD/WR, unused otherwise. WR payloads live in CommandTrace::payloads
/// and cover columns arg..cols-1.
struct Command {
    std::int64_t cycle = 0;
    CommandKind kind = CommandKind::Act;
    std::uint32_t arg = 0;
    std::int32_t payload = -1;  ///< index into CommandTrace::payloads, WR only
};

/// Ordered command sequence plus the timing it was generated against.
/// RD and WR address the open row from the start column to the end of the
/// row, so cols is part of the trace identity.
struct CommandTrace {
    TimingParams timing;
    std::uint32_t cols = 0;
    std::vector<Command> commands;
    std::vector<BitVec> payloads;

    void act(std::int64_t cycle, std::uint32_t row);
    void pre(std::int64_t cycle);
    void rd(std::int64_t cycle, std::uint32_t col);
    void wr(std::int64_t cycle, std::uint32_t col, BitVec data);
    void ref(std::int64_t cycle);

    /// Canonical text form: `# key = value` header, then one command per
    /// line, `<cycle> <KIND> [row|col] [hex-data]`. parse(serialize(t)) == t.
    void serialize(std::ostream& out) const;
    static CommandTrace parse(std::istream& in, const std::string& origin);

    void save(const std::string& path) const;
    static CommandTrace load(const std::string& path);
};

enum class TraceRule { TRas, TRp, OpenRow, Budget, Protocol, Address };

const char* to_string(TraceRule rule);

struct Violation {
    std::size_t index = 0;  ///< offending command position
    TraceRule rule = TraceRule::Protocol;
    std::string detail;
};

/// Checks command ordering, ACT/PRE spacing, open-row discipline, column
/// bounds, and the per-row activation budget (reset by REF). Returns every
/// violation; an empty list means the trace is executable.
std::vector<Violation> validate_trace(const CommandTrace& trace);

}  // namespace rhlab
