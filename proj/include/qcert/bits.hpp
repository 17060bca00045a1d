#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qcert {

class Rng;

/// Packed bit string.  Bit i lives in word i/64 at position i%64, which is
/// the same layout as LSB-first bits inside little-endian bytes; to_bytes()
/// and from_bytes() therefore round-trip the documented file encoding.
class BitString {
public:
    BitString() = default;
    explicit BitString(std::uint64_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    static BitString from_string(std::string_view s);
    static BitString from_bytes(std::span<const std::uint8_t> bytes, std::uint64_t nbits);
    static BitString random(Rng& rng, std::uint64_t nbits);

    std::uint64_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    bool bit(std::uint64_t i) const;
    void set_bit(std::uint64_t i, bool v);
    void append(bool v);

    /// Word w, or 0 if w is past the end.  Tail bits beyond size() are zero.
    std::uint64_t word(std::uint64_t w) const { return w < words_.size() ? words_[w] : 0; }
    std::uint64_t word_count() const { return words_.size(); }
    std::span<const std::uint64_t> words() const { return words_; }

    std::vector<std::uint8_t> to_bytes() const;
    std::string to_string() const;

    std::uint64_t ones() const;
    std::uint64_t fingerprint() const;  // FNV-1a over (size, payload bytes)

    BitString operator^(const BitString& other) const;
    bool operator==(const BitString& other) const;

private:
    void clear_tail();

    std::uint64_t nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

}  // namespace qcert
