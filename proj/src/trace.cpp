#include "rhlab/trace.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "rhlab/errors.hpp"

namespace rhlab {

const char* to_string(CommandKind kind) {
    switch (kind) {
        case CommandKind::Act: return "ACT";
        case CommandKind::Pre: return "PRE";
        case CommandKind::Rd: return "RD";
        case CommandKind::Wr: return "WR";
        case CommandKind::Ref: return "REF";
    }
    return "?";
}

const char* to_string(TraceRule rule) {
    switch (rule) {
        case TraceRule::TRas: return "t_RAS";
        case TraceRule::TRp: return "t_RP";
        case TraceRule::OpenRow: return "open_row";
        case TraceRule::Budget: return "budget";
        case TraceRule::Protocol: return "protocol";
        case TraceRule::Address: return "address";
    }
    return "?";
}

void CommandTrace::act(std::int64_t cycle, std::uint32_t row) {
    commands.push_back({cycle, CommandKind::Act, row, -1});
}

void CommandTrace::pre(std::int64_t cycle) {
    commands.push_back({cycle, CommandKind::Pre, 0, -1});
}

void CommandTrace::rd(std::int64_t cycle, std::uint32_t col) {
    commands.push_back({cycle, CommandKind::Rd, col, -1});
}

void CommandTrace::wr(std::int64_t cycle, std::uint32_t col, BitVec data) {
    payloads.push_back(std::move(data));
    commands.push_back({cycle, CommandKind::Wr, col,
                        static_cast<std::int32_t>(payloads.size() - 1)});
}

void CommandTrace::ref(std::int64_t cycle) {
    commands.push_back({cycle, CommandKind::Ref, 0, -1});
}

namespace {

std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace

void CommandTrace::serialize(std::ostream& out) const {
    out << "# rhlab trace v1\n";
    out << "# cols = " << cols << "\n";
    out << "# t_ck = " << format_double(timing.t_ck) << "\n";
    out << "# t_ras = " << timing.t_ras << "\n";
    out << "# t_rp = " << timing.t_rp << "\n";
    out << "# t_refw = " << format_double(timing.t_refw) << "\n";
    out << "# sleep = " << timing.sleep << "\n";
    if (timing.allow_nonstandard)
        out << "# allow_nonstandard = 1\n";
    for (const Command& cmd : commands) {
        out << cmd.cycle << ' ' << to_string(cmd.kind);
        switch (cmd.kind) {
            case CommandKind::Act:
            case CommandKind::Rd:
                out << ' ' << cmd.arg;
                break;
            case CommandKind::Wr:
                out << ' ' << cmd.arg << ' ' << payloads[cmd.payload].to_hex();
                break;
            case CommandKind::Pre:
            case CommandKind::Ref:
                break;
        }
        out << '\n';
    }
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

[[noreturn]] void parse_fail(const std::string& origin, std::size_t lineno,
                             const std::string& what) {
    fail(ErrorKind::Parse, origin + ":" + std::to_string(lineno) + ": " + what);
}

std::int64_t parse_int(const std::string& origin, std::size_t lineno, const std::string& tok) {
    std::size_t pos = 0;
    std::int64_t v = 0;
    try {
        v = std::stoll(tok, &pos);
    } catch (...) {
        parse_fail(origin, lineno, "expected integer, got '" + tok + "'");
    }
    if (pos != tok.size())
        parse_fail(origin, lineno, "expected integer, got '" + tok + "'");
    return v;
}

double parse_num(const std::string& origin, std::size_t lineno, const std::string& tok) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(tok, &pos);
    } catch (...) {
        parse_fail(origin, lineno, "expected number, got '" + tok + "'");
    }
    if (pos != tok.size())
        parse_fail(origin, lineno, "expected number, got '" + tok + "'");
    return v;
}

}  // namespace

CommandTrace CommandTrace::parse(std::istream& in, const std::string& origin) {
    CommandTrace trace;
    bool have_cols = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::istringstream key_in(line.substr(1, eq - 1));
            std::string key;
            key_in >> key;
            const std::string value_raw = line.substr(eq + 1);
            std::istringstream val_in(value_raw);
            std::string value;
            val_in >> value;
            if (key == "cols") {
                trace.cols = static_cast<std::uint32_t>(parse_int(origin, lineno, value));
                have_cols = true;
            } else if (key == "t_ck") {
                trace.timing.t_ck = parse_num(origin, lineno, value);
            } else if (key == "t_ras") {
                trace.timing.t_ras = parse_int(origin, lineno, value);
            } else if (key == "t_rp") {
                trace.timing.t_rp = parse_int(origin, lineno, value);
            } else if (key == "t_refw") {
                trace.timing.t_refw = parse_num(origin, lineno, value);
            } else if (key == "sleep") {
                trace.timing.sleep = parse_int(origin, lineno, value);
            } else if (key == "allow_nonstandard") {
                trace.timing.allow_nonstandard = parse_int(origin, lineno, value) != 0;
            }
            continue;
        }
        const std::vector<std::string> tok = split_ws(line);
        if (tok.size() < 2)
            parse_fail(origin, lineno, "expected `<cycle> <KIND> ...`");
        const std::int64_t cycle = parse_int(origin, lineno, tok[0]);
        const std::string& kind = tok[1];
        if (kind == "ACT") {
            if (tok.size() != 3) parse_fail(origin, lineno, "ACT takes a row");
            trace.act(cycle, static_cast<std::uint32_t>(parse_int(origin, lineno, tok[2])));
        } else if (kind == "PRE") {
            if (tok.size() != 2) parse_fail(origin, lineno, "PRE takes no argument");
            trace.pre(cycle);
        } else if (kind == "RD") {
            if (tok.size() != 3) parse_fail(origin, lineno, "RD takes a column");
            trace.rd(cycle, static_cast<std::uint32_t>(parse_int(origin, lineno, tok[2])));
        } else if (kind == "WR") {
            if (tok.size() != 4) parse_fail(origin, lineno, "WR takes a column and hex data");
            if (!have_cols) parse_fail(origin, lineno, "WR before `# cols` header");
            const std::uint32_t col =
                static_cast<std::uint32_t>(parse_int(origin, lineno, tok[2]));
            if (col >= trace.cols) parse_fail(origin, lineno, "WR column out of range");
            trace.wr(cycle, col, BitVec::from_hex(tok[3], trace.cols - col));
        } else if (kind == "REF") {
            if (tok.size() != 2) parse_fail(origin, lineno, "REF takes no argument");
            trace.ref(cycle);
        } else {
            parse_fail(origin, lineno, "unknown command '" + kind + "'");
        }
    }
    if (!have_cols)
        fail(ErrorKind::Parse, origin + ": missing `# cols` header");
    return trace;
}

void CommandTrace::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Input, "cannot write " + path);
    serialize(out);
    if (!out)
        fail(ErrorKind::Input, "write failed: " + path);
}

CommandTrace CommandTrace::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::Input, "cannot open " + path);
    return parse(in, path);
}

namespace {

/// Per-row counters, flat for the common small row numbers.
class RowCounts {
public:
    std::int64_t increment(std::uint32_t row) {
        if (row < kFlatLimit) {
            if (row >= low_.size()) low_.resize(row + 1, 0);
            return ++low_[row];
        }
        return ++high_[row];
    }

    void clear() {
        std::fill(low_.begin(), low_.end(), 0);
        high_.clear();
    }

private:
    static constexpr std::uint32_t kFlatLimit = 1u << 20;
    std::vector<std::int64_t> low_;
    std::unordered_map<std::uint32_t, std::int64_t> high_;
};

}  // namespace

std::vector<Violation> validate_trace(const CommandTrace& trace) {
    std::vector<Violation> out;
    const std::int64_t budget = hammer_budget(trace.timing);
    bool row_open = false;
    std::int64_t last_act = 0;
    std::int64_t last_pre = std::numeric_limits<std::int64_t>::min() / 2;
    std::int64_t prev_cycle = std::numeric_limits<std::int64_t>::min();
    RowCounts act_counts;
    std::unordered_set<std::uint32_t> over_budget;

    for (std::size_t i = 0; i < trace.commands.size(); ++i) {
        const Command& cmd = trace.commands[i];
        if (cmd.cycle <= prev_cycle)
            out.push_back({i, TraceRule::Protocol, "cycle not strictly increasing"});
        prev_cycle = cmd.cycle;
        switch (cmd.kind) {
            case CommandKind::Act: {
                if (row_open)
                    out.push_back({i, TraceRule::Protocol, "ACT while a row is open"});
                if (cmd.cycle - last_pre < trace.timing.t_rp)
                    out.push_back({i, TraceRule::TRp,
                                   "PRE->ACT gap " + std::to_string(cmd.cycle - last_pre) +
                                       " < " + std::to_string(trace.timing.t_rp)});
                const std::int64_t count = act_counts.increment(cmd.arg);
                if (count > budget && over_budget.insert(cmd.arg).second)
                    out.push_back({i, TraceRule::Budget,
                                   "row " + std::to_string(cmd.arg) +
                                       " exceeds activation budget " + std::to_string(budget)});
                row_open = true;
                last_act = cmd.cycle;
                break;
            }
            case CommandKind::Pre:
                if (!row_open) {
                    out.push_back({i, TraceRule::Protocol, "PRE with no open row"});
                    break;
                }
                if (cmd.cycle - last_act < trace.timing.t_ras)
                    out.push_back({i, TraceRule::TRas,
                                   "ACT->PRE gap " + std::to_string(cmd.cycle - last_act) +
                                       " < " + std::to_string(trace.timing.t_ras)});
                row_open = false;
                last_pre = cmd.cycle;
                break;
            case CommandKind::Rd:
            case CommandKind::Wr:
                if (!row_open) {
                    out.push_back({i, TraceRule::OpenRow,
                                   std::string(to_string(cmd.kind)) + " with no open row"});
                    break;
                }
                if (cmd.arg >= trace.cols) {
                    out.push_back({i, TraceRule::Address, "column out of range"});
                    break;
                }
                if (cmd.kind == CommandKind::Wr) {
                    if (cmd.payload < 0 ||
                        static_cast<std::size_t>(cmd.payload) >= trace.payloads.size()) {
                        out.push_back({i, TraceRule::Address, "missing WR payload"});
                    } else if (trace.payloads[cmd.payload].size() != trace.cols - cmd.arg) {
                        out.push_back({i, TraceRule::Address,
                                       "WR payload does not reach end of row"});
                    }
                }
                break;
            case CommandKind::Ref:
                if (row_open)
                    out.push_back({i, TraceRule::Protocol, "REF while a row is open"});
                act_counts.clear();
                over_budget.clear();
                break;
        }
    }
    return out;
}

}  // namespace rhlab
