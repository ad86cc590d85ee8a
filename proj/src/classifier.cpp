#include "rhlab/classifier.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "rhlab/errors.hpp"

namespace rhlab {

const char* to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::FourLevel: return "FOUR_LEVEL";
        case Scheme::ThreeLevel: return "THREE_LEVEL";
        case Scheme::TwoLevel: return "TWO_LEVEL";
    }
    return "?";
}

Scheme scheme_from(const std::string& name) {
    if (name == "FOUR_LEVEL") return Scheme::FourLevel;
    if (name == "THREE_LEVEL") return Scheme::ThreeLevel;
    if (name == "TWO_LEVEL") return Scheme::TwoLevel;
    fail(ErrorKind::Parse, "unknown scheme '" + name + "'");
}

std::uint8_t SecurityLevelMap::level_at(std::uint32_t row, std::uint32_t col) const {
    if (row >= rows || col >= cols)
        fail(ErrorKind::Addressing, "cell (" + std::to_string(row) + ", " +
                                        std::to_string(col) + ") outside the level map");
    return levels[static_cast<std::size_t>(row) * cols + col];
}

void SecurityLevelMap::save_csv(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Input, "cannot write " + path);
    out << "# scheme = " << to_string(scheme) << '\n';
    out << "row,col,level\n";
    for (std::uint32_t r = 0; r < rows; ++r)
        for (std::uint32_t c = 0; c < cols; ++c) {
            const std::uint8_t level = levels[static_cast<std::size_t>(r) * cols + c];
            if (level > 1)
                out << r << ',' << c << ',' << static_cast<unsigned>(level) << '\n';
        }
    if (!out)
        fail(ErrorKind::Input, "write failed: " + path);
}

namespace {

constexpr char kBitmapMagic[4] = {'R', 'H', 'L', 'V'};
constexpr std::uint8_t kBitmapVersion = 1;

void put_u32(std::ofstream& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t take_u32(const std::string& bytes, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
        v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
    return v;
}

void check_scheme_levels(const SecurityLevelMap& map) {
    for (std::uint8_t level : map.levels) {
        const bool legal = map.scheme == Scheme::FourLevel
                               ? true
                               : map.scheme == Scheme::ThreeLevel ? level != 2
                                                                  : level == 1 || level == 4;
        if (!legal)
            fail(ErrorKind::Parse, std::string("level ") + std::to_string(level) +
                                       " not representable under scheme " +
                                       to_string(map.scheme));
    }
}

}  // namespace

void SecurityLevelMap::save_bitmap(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::Input, "cannot write " + path);
    out.write(kBitmapMagic, 4);
    out.put(static_cast<char>(kBitmapVersion));
    out.put(static_cast<char>(scheme));
    put_u32(out, rows);
    put_u32(out, cols);
    const std::size_t cells = levels.size();
    for (std::size_t i = 0; i < cells; i += 4) {
        std::uint8_t byte = 0;
        for (std::size_t j = 0; j < 4 && i + j < cells; ++j)
            byte |= static_cast<std::uint8_t>((levels[i + j] - 1) & 0x3) << (2 * j);
        out.put(static_cast<char>(byte));
    }
    if (!out)
        fail(ErrorKind::Input, "write failed: " + path);
}

SecurityLevelMap load_bitmap(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::Input, "cannot read " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < 14 || bytes.compare(0, 4, kBitmapMagic, 4) != 0)
        fail(ErrorKind::Parse, path + ": not a level bitmap");
    if (static_cast<std::uint8_t>(bytes[4]) != kBitmapVersion)
        fail(ErrorKind::Parse, path + ": unsupported bitmap version " +
                                   std::to_string(static_cast<unsigned char>(bytes[4])));
    const std::uint8_t scheme_byte = static_cast<std::uint8_t>(bytes[5]);
    if (scheme_byte > 2)
        fail(ErrorKind::Parse, path + ": unknown scheme code " + std::to_string(scheme_byte));

    SecurityLevelMap map;
    map.scheme = static_cast<Scheme>(scheme_byte);
    map.rows = take_u32(bytes, 6);
    map.cols = take_u32(bytes, 10);
    const std::size_t cells = static_cast<std::size_t>(map.rows) * map.cols;
    if (bytes.size() != 14 + (cells + 3) / 4)
        fail(ErrorKind::Parse, path + ": payload size does not match " +
                                   std::to_string(map.rows) + "x" + std::to_string(map.cols));
    map.levels.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        const std::uint8_t byte = static_cast<std::uint8_t>(bytes[14 + i / 4]);
        map.levels[i] = static_cast<std::uint8_t>(((byte >> (2 * (i % 4))) & 0x3) + 1);
    }
    check_scheme_levels(map);
    return map;
}

SecurityLevelMap classify(const std::vector<CellCoord>& flips_sg,
                          const std::vector<CellCoord>& flips_vc,
                          const std::vector<CellCoord>& flips_db, std::uint32_t rows,
                          std::uint32_t cols, double overlap_epsilon) {
    if (rows == 0 || cols == 0)
        fail(ErrorKind::Config, "level map universe must be non-empty");
    if (!(overlap_epsilon >= 0.0) || overlap_epsilon >= 1.0)
        fail(ErrorKind::Config, "overlap epsilon must lie in [0, 1)");

    const auto normalize = [&](const std::vector<CellCoord>& cells, const char* which) {
        std::vector<CellCoord> sorted = cells;
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (const CellCoord& cell : sorted)
            if (cell.row >= rows || cell.col >= cols)
                fail(ErrorKind::Addressing, std::string(which) + " flip at (" +
                                                std::to_string(cell.row) + ", " +
                                                std::to_string(cell.col) +
                                                ") lies outside the universe");
        return sorted;
    };
    const std::vector<CellCoord> sg = normalize(flips_sg, "SG");
    const std::vector<CellCoord> vc = normalize(flips_vc, "VC");
    const std::vector<CellCoord> db = normalize(flips_db, "DB");

    const bool nested = std::includes(vc.begin(), vc.end(), sg.begin(), sg.end()) &&
                        std::includes(db.begin(), db.end(), vc.begin(), vc.end());

    SecurityLevelMap map;
    map.rows = rows;
    map.cols = cols;
    map.levels.assign(static_cast<std::size_t>(rows) * cols, 1);
    const auto paint = [&](const std::vector<CellCoord>& cells, std::uint8_t level) {
        for (const CellCoord& cell : cells)
            map.levels[static_cast<std::size_t>(cell.row) * cols + cell.col] = level;
    };

    if (!nested) {
        map.scheme = Scheme::TwoLevel;
        paint(sg, 4);
        return map;
    }

    const std::size_t beyond_vc = db.size() - vc.size();  // |DB \ VC| under nesting
    if (static_cast<double>(beyond_vc) <= overlap_epsilon * static_cast<double>(db.size())) {
        map.scheme = Scheme::ThreeLevel;
        paint(db, 3);  // VC\SG plus DB\VC; SG repainted below
    } else {
        map.scheme = Scheme::FourLevel;
        paint(db, 2);
        paint(vc, 3);
    }
    paint(sg, 4);
    return map;
}

LevelCounts level_counts(const SecurityLevelMap& map) {
    LevelCounts counts;
    for (std::uint8_t level : map.levels) {
        switch (level) {
            case 1: ++counts.level1; break;
            case 2: ++counts.level2; break;
            case 3: ++counts.level3; break;
            case 4: ++counts.level4; break;
            default: fail(ErrorKind::Internal, "level map holds a value outside 1..4");
        }
    }
    return counts;
}

std::vector<CellCoord> union_flips(const ProfileResult& result, AttackModel model,
                                   std::uint64_t hc) {
    std::set<CellCoord> cells;
    for (std::uint32_t trial = 0; trial < result.trials; ++trial)
        for (const CellCoord& cell : result.record(model, hc, trial).flips)
            cells.insert(cell);
    return {cells.begin(), cells.end()};
}

void DefensePolicy::validate() const {
    if (!(scarce_level4 >= 0.0) || scarce_level4 >= 1.0)
        fail(ErrorKind::Config, "scarce_level4 must lie in [0, 1)");
    if (!(balanced_max_share > 0.0) || balanced_max_share > 1.0)
        fail(ErrorKind::Config, "balanced_max_share must lie in (0, 1]");
}

std::string recommend_defense(const LevelCounts& counts, const DefensePolicy& policy) {
    policy.validate();
    const std::uint64_t flipped = counts.flipped();
    if (flipped == 0) return "no action needed";
    if (static_cast<double>(counts.level4) < policy.scarce_level4 * static_cast<double>(flipped))
        return "double-sided-focused";
    const std::uint64_t top = std::max({counts.level2, counts.level3, counts.level4});
    if (static_cast<double>(top) <= policy.balanced_max_share * static_cast<double>(flipped))
        return "counter-based";
    return "targeted-upper-levels";
}

}  // namespace rhlab
