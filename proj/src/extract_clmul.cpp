// PCLMULQDQ kernel, isolated in its own translation unit so only this file
// is built with -mpclmul; callers gate on pclmul_supported() at runtime.

#include "extract_detail.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <wmmintrin.h>
#define QCERT_HAVE_PCLMUL_BUILD 1
#endif

namespace qcert::extract::detail {

bool pclmul_supported() {
#if defined(QCERT_HAVE_PCLMUL_BUILD)
    return __builtin_cpu_supports("pclmul");
#else
    return false;
#endif
}

#if defined(QCERT_HAVE_PCLMUL_BUILD)

void convolve_range_pclmul(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                           std::span<std::uint64_t> c, std::uint64_t w_begin) {
    const std::int64_t na = static_cast<std::int64_t>(a.size());
    const std::int64_t nb = static_cast<std::int64_t>(b.size());
    const std::int64_t wa = static_cast<std::int64_t>(w_begin);
    const std::int64_t wb = wa + static_cast<std::int64_t>(c.size());
    for (auto& w : c) w = 0;

    // Every product a_i * b_k is a 128-bit value whose low word lands in
    // c[i+k] and high word in c[i+k+1]; pairs with i+k in [wa-1, wb-1]
    // touch the owned range.
    for (std::int64_t i = 0; i < na; ++i) {
        const __m128i va = _mm_set_epi64x(0, static_cast<long long>(a[static_cast<std::size_t>(i)]));
        std::int64_t k_lo = wa - 1 - i, k_hi = wb - 1 - i;
        if (k_lo < 0) k_lo = 0;
        if (k_hi > nb - 1) k_hi = nb - 1;
        for (std::int64_t k = k_lo; k <= k_hi; ++k) {
            const __m128i vb =
                _mm_set_epi64x(0, static_cast<long long>(b[static_cast<std::size_t>(k)]));
            const __m128i p = _mm_clmulepi64_si128(va, vb, 0x00);
            const auto lo = static_cast<std::uint64_t>(_mm_cvtsi128_si64(p));
            const auto hi = static_cast<std::uint64_t>(_mm_cvtsi128_si64(_mm_srli_si128(p, 8)));
            const std::int64_t w = i + k;
            if (w >= wa && w < wb) c[static_cast<std::size_t>(w - wa)] ^= lo;
            if (w + 1 >= wa && w + 1 < wb) c[static_cast<std::size_t>(w + 1 - wa)] ^= hi;
        }
    }
}

#else

void convolve_range_pclmul(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                           std::span<std::uint64_t> c, std::uint64_t w_begin) {
    convolve_range_soft(a, b, c, w_begin);
}

#endif

}  // namespace qcert::extract::detail
