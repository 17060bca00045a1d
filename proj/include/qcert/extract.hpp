#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "qcert/bits.hpp"
#include "qcert/protocol.hpp"
#include "qcert/simulate.hpp"

namespace qcert::extract {

/// Thrown when a certificate with b_sec <= 0 reaches the extractor: such a
/// run certifies nothing and extraction is refused.
struct CertifiesNothingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Seed of a binary Toeplitz matrix with ell rows and n columns:
/// exactly n + ell - 1 bits, T[i][j] = bits[i - j + n - 1].
struct ToeplitzSeed {
    BitString bits;
};

/// Output length floor(certified_bits - 2 * epsilon_exponent), floored at 0.
/// epsilon_exponent = 0 reproduces the certified budget verbatim.
std::uint64_t output_length(double certified_bits, int epsilon_exponent);

/// y = T x over GF(2).  Blocked carryless-multiply evaluation of the seed
/// convolution, OpenMP across output words; memory O(n + ell), the matrix is
/// never materialized.  Deterministic for any thread count.
BitString toeplitz_hash(const BitString& input, std::uint64_t ell, const ToeplitzSeed& seed);

/// Bit-by-bit reference of the same map, kept for testing the kernel.
BitString toeplitz_hash_reference(const BitString& input, std::uint64_t ell,
                                  const ToeplitzSeed& seed);

/// Z outcomes packed log2(d) bits per symbol (LSB-first); rejects d that is
/// not a power of two.
BitString serialize_outcomes(const simulate::RunRecord& run);

/// Full extraction step: consistency-check run against certificate, refuse
/// non-positive budgets, hash the serialized Z string down to
/// output_length(b_sec, epsilon_exponent) bits.
BitString extract_run(const simulate::RunRecord& run, const protocol::Certificate& cert,
                      const ToeplitzSeed& seed, int epsilon_exponent);

/// Bit-string container (16-byte magic+version header, then tool version,
/// config hash, bit length, packed payload).
void write_bits(const BitString& bits, std::ostream& os, std::uint64_t config_hash = 0);
BitString read_bits(std::istream& is);
void write_bits_file(const BitString& bits, const std::string& path,
                     std::uint64_t config_hash = 0);
BitString read_bits_file(const std::string& path);

/// Raw extractor-seed file: 8-byte little-endian bit count, then packed bits.
void write_seed_file(const BitString& bits, const std::string& path);
BitString read_seed_file(const std::string& path);

}  // namespace qcert::extract
