#pragma once

#include <cstdint>
#include <span>

namespace qcert::extract::detail {

/// Fills c[w - w_begin] with word w of the GF(2) polynomial product a*b for
/// w in [w_begin, w_begin + c.size()).  Software fallback path.
void convolve_range_soft(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                         std::span<std::uint64_t> c, std::uint64_t w_begin);

/// Same contract, PCLMULQDQ path.  Only call when pclmul_supported().
void convolve_range_pclmul(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                           std::span<std::uint64_t> c, std::uint64_t w_begin);

bool pclmul_supported();

}  // namespace qcert::extract::detail
