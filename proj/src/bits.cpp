#include "qcert/bits.hpp"

#include <bit>
#include <stdexcept>

#include "qcert/rng.hpp"
#include "qcert/version.hpp"

namespace qcert {

BitString BitString::from_string(std::string_view s) {
    BitString out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1')
            out.set_bit(i, true);
        else if (s[i] != '0')
            throw std::invalid_argument("BitString::from_string: expected only '0'/'1'");
    }
    return out;
}

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes, std::uint64_t nbits) {
    if (bytes.size() * 8 < nbits)
        throw std::invalid_argument("BitString::from_bytes: byte buffer shorter than bit count");
    BitString out(nbits);
    for (std::uint64_t i = 0; i < nbits; i += 8) {
        const std::uint64_t b = bytes[i / 8];
        out.words_[i / 64] |= b << (i % 64);
    }
    out.clear_tail();
    return out;
}

BitString BitString::random(Rng& rng, std::uint64_t nbits) {
    BitString out(nbits);
    for (auto& w : out.words_) w = rng.next_u64();
    out.clear_tail();
    return out;
}

bool BitString::bit(std::uint64_t i) const {
    if (i >= nbits_) throw std::out_of_range("BitString::bit: index past end");
    return (words_[i / 64] >> (i % 64)) & 1u;
}

void BitString::set_bit(std::uint64_t i, bool v) {
    if (i >= nbits_) throw std::out_of_range("BitString::set_bit: index past end");
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    if (v)
        words_[i / 64] |= mask;
    else
        words_[i / 64] &= ~mask;
}

void BitString::append(bool v) {
    if (nbits_ % 64 == 0) words_.push_back(0);
    ++nbits_;
    set_bit(nbits_ - 1, v);
}

std::vector<std::uint8_t> BitString::to_bytes() const {
    std::vector<std::uint8_t> out((nbits_ + 7) / 8, 0);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(words_[i / 8] >> ((i % 8) * 8));
    return out;
}

std::string BitString::to_string() const {
    std::string s(nbits_, '0');
    for (std::uint64_t i = 0; i < nbits_; ++i)
        if (bit(i)) s[i] = '1';
    return s;
}

std::uint64_t BitString::ones() const {
    std::uint64_t c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
}

std::uint64_t BitString::fingerprint() const {
    const auto bytes = to_bytes();
    std::uint64_t h = fnv1a64(&nbits_, sizeof nbits_);
    h ^= fnv1a64(bytes.data(), bytes.size());
    return h;
}

BitString BitString::operator^(const BitString& other) const {
    if (nbits_ != other.nbits_)
        throw std::invalid_argument("BitString::operator^: length mismatch");
    BitString out(nbits_);
    for (std::size_t w = 0; w < words_.size(); ++w)
        out.words_[w] = words_[w] ^ other.words_[w];
    return out;
}

bool BitString::operator==(const BitString& other) const {
    return nbits_ == other.nbits_ && words_ == other.words_;
}

void BitString::clear_tail() {
    const std::uint64_t rem = nbits_ % 64;
    if (rem != 0 && !words_.empty())
        words_.back() &= (~std::uint64_t{0}) >> (64 - rem);
}

}  // namespace qcert
