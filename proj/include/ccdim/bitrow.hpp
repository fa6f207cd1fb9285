#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ccdim/errors.hpp"

namespace ccdim {

// Packed bit vector used for membership rows and trace patterns.
// Bits above size() are kept zero so equality and hashing can work word-wise.
class BitRow {
public:
    BitRow() = default;

    explicit BitRow(std::size_t n_bits, bool fill = false)
        : n_bits_(n_bits), words_((n_bits + 63) / 64, fill ? ~std::uint64_t{0} : 0) {
        trim();
    }

    static BitRow from_string(std::string_view bits) {
        BitRow row(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] == '1')
                row.set(i, true);
            else if (bits[i] != '0')
                throw InputError("bit string may contain only '0' and '1'");
        }
        return row;
    }

    std::size_t size() const { return n_bits_; }

    bool get(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }

    void set(std::size_t i, bool b) {
        if (b)
            words_[i >> 6] |= std::uint64_t{1} << (i & 63);
        else
            words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (std::uint64_t w : words_)
            c += std::popcount(w);
        return c;
    }

    std::string to_string() const {
        std::string s(n_bits_, '0');
        for (std::size_t i = 0; i < n_bits_; ++i)
            if (get(i))
                s[i] = '1';
        return s;
    }

    std::uint64_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL ^ n_bits_;
        for (std::uint64_t w : words_) {
            h ^= w;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    bool operator==(const BitRow& o) const = default;

    // Lexicographic on the bit string (bit 0 most significant).
    bool operator<(const BitRow& o) const {
        const std::size_t n = n_bits_ < o.n_bits_ ? n_bits_ : o.n_bits_;
        for (std::size_t i = 0; i < n; ++i) {
            const bool a = get(i), b = o.get(i);
            if (a != b)
                return b;
        }
        return n_bits_ < o.n_bits_;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    void trim() {
        if (n_bits_ & 63)
            if (!words_.empty())
                words_.back() &= (std::uint64_t{1} << (n_bits_ & 63)) - 1;
    }

    std::size_t n_bits_ = 0;
    std::vector<std::uint64_t> words_;
};

struct BitRowHash {
    std::size_t operator()(const BitRow& r) const { return static_cast<std::size_t>(r.hash()); }
};

} // namespace ccdim
