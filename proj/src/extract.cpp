#include "qcert/extract.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "extract_detail.hpp"
#include "qcert/version.hpp"

namespace qcert::extract {

namespace detail {

void convolve_range_soft(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                         std::span<std::uint64_t> c, std::uint64_t w_begin) {
    const std::int64_t na = static_cast<std::int64_t>(a.size());
    const std::int64_t nb = static_cast<std::int64_t>(b.size());
    const std::int64_t wa = static_cast<std::int64_t>(w_begin);
    const std::int64_t wb = wa + static_cast<std::int64_t>(c.size());
    for (auto& w : c) w = 0;

    // 4-bit windowed carryless multiply; the per-a table is hoisted out of
    // the inner loop.
    std::uint64_t tab_lo[16], tab_hi[16];
    for (std::int64_t i = 0; i < na; ++i) {
        const std::uint64_t av = a[static_cast<std::size_t>(i)];
        if (av == 0) continue;
        tab_lo[0] = 0;
        tab_hi[0] = 0;
        for (unsigned v = 1; v < 16; ++v) {
            const unsigned bit = v & (~v + 1);  // lowest set bit
            const unsigned rest = v ^ bit;
            int sh = bit == 1 ? 0 : bit == 2 ? 1 : bit == 4 ? 2 : 3;
            const std::uint64_t lo = av << sh;
            const std::uint64_t hi = sh == 0 ? 0 : av >> (64 - sh);
            tab_lo[v] = tab_lo[rest] ^ lo;
            tab_hi[v] = tab_hi[rest] ^ hi;
        }
        std::int64_t k_lo = wa - 1 - i, k_hi = wb - 1 - i;
        if (k_lo < 0) k_lo = 0;
        if (k_hi > nb - 1) k_hi = nb - 1;
        for (std::int64_t k = k_lo; k <= k_hi; ++k) {
            const std::uint64_t bv = b[static_cast<std::size_t>(k)];
            if (bv == 0) continue;
            std::uint64_t lo = 0, hi = 0;
            for (int nib = 0; nib < 16; ++nib) {
                const unsigned v = static_cast<unsigned>((bv >> (4 * nib)) & 0xF);
                if (v == 0) continue;
                const int sh = 4 * nib;
                lo ^= tab_lo[v] << sh;
                hi ^= tab_hi[v] << sh;
                if (sh != 0) hi ^= tab_lo[v] >> (64 - sh);
            }
            const std::int64_t w = i + k;
            if (w >= wa && w < wb) c[static_cast<std::size_t>(w - wa)] ^= lo;
            if (w + 1 >= wa && w + 1 < wb) c[static_cast<std::size_t>(w + 1 - wa)] ^= hi;
        }
    }
}

}  // namespace detail

namespace {

constexpr char kBitsMagic[8] = {'Q', 'C', 'E', 'R', 'T', 'B', 'I', 'T'};
constexpr std::uint32_t kBitsVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>(v >> (8 * i));
    os.write(b, 4);
}
void put_u64(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(v >> (8 * i));
    os.write(b, 8);
}
std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("bit container: truncated field");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}
std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("bit container: truncated field");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

using ConvolveFn = void (*)(std::span<const std::uint64_t>, std::span<const std::uint64_t>,
                            std::span<std::uint64_t>, std::uint64_t);

ConvolveFn pick_kernel() {
    return detail::pclmul_supported() ? detail::convolve_range_pclmul
                                      : detail::convolve_range_soft;
}

}  // namespace

std::uint64_t output_length(double certified_bits, int epsilon_exponent) {
    if (epsilon_exponent < 0)
        throw std::invalid_argument("output_length: epsilon_exponent >= 0 required");
    if (!std::isfinite(certified_bits))
        throw std::invalid_argument("output_length: non-finite certified bits");
    const double ell = std::floor(certified_bits - 2.0 * epsilon_exponent);
    return ell <= 0.0 ? 0 : static_cast<std::uint64_t>(ell);
}

BitString toeplitz_hash(const BitString& input, std::uint64_t ell, const ToeplitzSeed& seed) {
    const std::uint64_t n = input.size();
    if (ell > n) throw std::invalid_argument("toeplitz_hash: ell > n");
    if (ell == 0) return BitString(0);
    if (seed.bits.size() != n + ell - 1)
        throw std::invalid_argument("toeplitz_hash: seed must have n + ell - 1 bits");

    // y_j = bit (n - 1 + j) of the GF(2) product seed(z) * input(z); only the
    // words covering that window are computed.
    const std::uint64_t w0 = (n - 1) / 64;
    const std::uint64_t w1 = (n + ell - 2) / 64;
    std::vector<std::uint64_t> conv(w1 - w0 + 2, 0);

    static const ConvolveFn kernel = pick_kernel();
    const std::uint64_t total = conv.size();
    // Thread startup dwarfs the work itself below a few thousand words.
    if (total < 4096 || input.word_count() < 256) {
        kernel(input.words(), seed.bits.words(), conv, w0);
    } else {
        const int threads = omp_get_max_threads();
#pragma omp parallel num_threads(threads)
        {
            const auto tid = static_cast<std::uint64_t>(omp_get_thread_num());
            const auto nth = static_cast<std::uint64_t>(omp_get_num_threads());
            const std::uint64_t lo = total * tid / nth;
            const std::uint64_t hi = total * (tid + 1) / nth;
            if (hi > lo)
                kernel(input.words(), seed.bits.words(),
                       std::span<std::uint64_t>(conv.data() + lo, hi - lo), w0 + lo);
        }
    }

    BitString out(ell);
    const std::uint64_t base = n - 1;
    for (std::uint64_t jw = 0; jw * 64 < ell; ++jw) {
        const std::uint64_t bitpos = base + jw * 64;
        const std::uint64_t idx = bitpos / 64 - w0;
        const unsigned sh = static_cast<unsigned>(bitpos % 64);
        std::uint64_t word = conv[idx] >> sh;
        if (sh != 0) word |= conv[idx + 1] << (64 - sh);
        for (unsigned bit = 0; bit < 64 && jw * 64 + bit < ell; ++bit)
            out.set_bit(jw * 64 + bit, (word >> bit) & 1);
    }
    return out;
}

BitString toeplitz_hash_reference(const BitString& input, std::uint64_t ell,
                                  const ToeplitzSeed& seed) {
    const std::uint64_t n = input.size();
    if (ell > n) throw std::invalid_argument("toeplitz_hash_reference: ell > n");
    if (ell != 0 && seed.bits.size() != n + ell - 1)
        throw std::invalid_argument("toeplitz_hash_reference: seed must have n + ell - 1 bits");
    BitString out(ell);
    for (std::uint64_t i = 0; i < ell; ++i) {
        bool acc = false;
        for (std::uint64_t j = 0; j < n; ++j)
            acc ^= seed.bits.bit(i - j + n - 1) && input.bit(j);
        out.set_bit(i, acc);
    }
    return out;
}

BitString serialize_outcomes(const simulate::RunRecord& run) {
    const int d = run.dim;
    if (d < 2 || (d & (d - 1)) != 0)
        throw std::invalid_argument(
            "serialize_outcomes: only power-of-two d supported for bit packing");
    int bpo = 0;
    while ((1 << bpo) < d) ++bpo;
    BitString out(run.z_outcomes.size() * static_cast<std::uint64_t>(bpo));
    std::uint64_t at = 0;
    for (const std::uint8_t sym : run.z_outcomes)
        for (int b = 0; b < bpo; ++b) out.set_bit(at++, (sym >> b) & 1);
    return out;
}

BitString extract_run(const simulate::RunRecord& run, const protocol::Certificate& cert,
                      const ToeplitzSeed& seed, int epsilon_exponent) {
    if (run.schedule.m != cert.m || run.schedule.n_x != cert.n_x)
        throw std::invalid_argument("extract_run: run and certificate disagree on schedule");
    if (!(cert.b_sec > 0.0))
        throw CertifiesNothingError("extract_run: certificate grants no certified bits");

    const BitString input = serialize_outcomes(run);
    const std::uint64_t ell = output_length(cert.b_sec, epsilon_exponent);
    if (ell > input.size())
        throw std::invalid_argument("extract_run: certified budget exceeds raw bit count");
    return toeplitz_hash(input, ell, seed);
}

void write_bits(const BitString& bits, std::ostream& os, std::uint64_t config_hash) {
    os.write(kBitsMagic, 8);
    put_u32(os, kBitsVersion);
    put_u32(os, 0);
    const std::string tool(kToolVersion);
    put_u32(os, static_cast<std::uint32_t>(tool.size()));
    os.write(tool.data(), static_cast<std::streamsize>(tool.size()));
    put_u64(os, config_hash);
    put_u64(os, bits.size());
    const auto bytes = bits.to_bytes();
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
    if (!os) throw std::runtime_error("write_bits: stream failure");
}

BitString read_bits(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || !std::equal(magic, magic + 8, kBitsMagic))
        throw std::runtime_error("read_bits: bad magic");
    if (get_u32(is) != kBitsVersion) throw std::runtime_error("read_bits: unknown version");
    get_u32(is);
    const std::uint32_t tool_len = get_u32(is);
    is.ignore(tool_len);
    get_u64(is);  // config hash
    const std::uint64_t nbits = get_u64(is);
    std::vector<std::uint8_t> bytes((nbits + 7) / 8);
    is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!is) throw std::runtime_error("read_bits: truncated payload");
    return BitString::from_bytes(bytes, nbits);
}

void write_bits_file(const BitString& bits, const std::string& path, std::uint64_t config_hash) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_bits_file: cannot open " + path);
    write_bits(bits, os, config_hash);
}

BitString read_bits_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_bits_file: cannot open " + path);
    return read_bits(is);
}

void write_seed_file(const BitString& bits, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_seed_file: cannot open " + path);
    put_u64(os, bits.size());
    const auto bytes = bits.to_bytes();
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
    if (!os) throw std::runtime_error("write_seed_file: stream failure");
}

BitString read_seed_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_seed_file: cannot open " + path);
    const std::uint64_t nbits = get_u64(is);
    std::vector<std::uint8_t> bytes((nbits + 7) / 8);
    is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!is) throw std::runtime_error("read_seed_file: truncated payload");
    return BitString::from_bytes(bytes, nbits);
}

}  // namespace qcert::extract
