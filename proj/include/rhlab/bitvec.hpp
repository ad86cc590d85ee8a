#pragma once

#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

#include "rhlab/errors.hpp"

namespace rhlab {

/// Fixed-length bit vector backing row data and write payloads.
/// Bit i lives at byte i/8, position i%8 (LSB-first within a byte).
/// Hex form is canonical: byte 0 first, two lowercase digits per byte,
/// high nibble first, always 2*ceil(size/8) characters.
class BitVec {
public:
    BitVec() = default;

    explicit BitVec(std::size_t nbits, bool fill = false)
        : nbits_(nbits), bytes_((nbits + 7) / 8, fill ? 0xff : 0x00) {
        trim_tail();
    }

    static BitVec zeros(std::size_t nbits) { return BitVec(nbits, false); }
    static BitVec ones(std::size_t nbits) { return BitVec(nbits, true); }

    std::size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    bool get(std::size_t i) const {
        return (bytes_[i >> 3] >> (i & 7)) & 1u;
    }

    void set(std::size_t i, bool v) {
        const std::uint8_t mask = static_cast<std::uint8_t>(1u << (i & 7));
        if (v)
            bytes_[i >> 3] |= mask;
        else
            bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
    }

    void flip(std::size_t i) { bytes_[i >> 3] ^= static_cast<std::uint8_t>(1u << (i & 7)); }

    BitVec complement() const {
        BitVec out(nbits_);
        for (std::size_t b = 0; b < bytes_.size(); ++b)
            out.bytes_[b] = static_cast<std::uint8_t>(~bytes_[b]);
        out.trim_tail();
        return out;
    }

    /// Columns where *this and other differ. Sizes must match.
    std::vector<std::uint32_t> diff(const BitVec& other) const {
        if (other.nbits_ != nbits_)
            fail(ErrorKind::Shape, "BitVec::diff size mismatch");
        std::vector<std::uint32_t> out;
        for (std::size_t b = 0; b < bytes_.size(); ++b) {
            std::uint8_t x = bytes_[b] ^ other.bytes_[b];
            while (x) {
                const int bit = __builtin_ctz(x);
                out.push_back(static_cast<std::uint32_t>(b * 8 + bit));
                x &= static_cast<std::uint8_t>(x - 1);
            }
        }
        return out;
    }

    bool operator==(const BitVec& other) const {
        return nbits_ == other.nbits_ && bytes_ == other.bytes_;
    }
    bool operator!=(const BitVec& other) const { return !(*this == other); }

    std::string to_hex() const {
        static const char digits[] = "0123456789abcdef";
        std::string out;
        out.reserve(bytes_.size() * 2);
        for (std::uint8_t b : bytes_) {
            out.push_back(digits[b >> 4]);
            out.push_back(digits[b & 0xf]);
        }
        return out;
    }

    static BitVec from_hex(const std::string& hex, std::size_t nbits) {
        BitVec out(nbits);
        if (hex.size() != out.bytes_.size() * 2)
            fail(ErrorKind::Parse, "hex payload length " + std::to_string(hex.size()) +
                                       " does not match " + std::to_string(nbits) + " bits");
        for (std::size_t i = 0; i < out.bytes_.size(); ++i) {
            const int hi = nibble(hex[2 * i]);
            const int lo = nibble(hex[2 * i + 1]);
            if (hi < 0 || lo < 0)
                fail(ErrorKind::Parse, "invalid hex digit in payload");
            out.bytes_[i] = static_cast<std::uint8_t>((hi << 4) | lo);
        }
        // Reject non-canonical padding bits so parse∘serialize is identity.
        BitVec check = out;
        check.trim_tail();
        if (check.bytes_ != out.bytes_)
            fail(ErrorKind::Parse, "nonzero padding bits in hex payload");
        return out;
    }

    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

private:
    static int nibble(char c) {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        return -1;
    }

    void trim_tail() {
        const std::size_t used = nbits_ & 7;
        if (used != 0 && !bytes_.empty())
            bytes_.back() &= static_cast<std::uint8_t>((1u << used) - 1);
    }

    std::size_t nbits_ = 0;
    std::vector<std::uint8_t> bytes_;
};

}  // namespace rhlab
