#include <doctest.h>

#include <cmath>

#include "qcert/extract.hpp"
#include "qcert/protocol.hpp"
#include "qcert/simulate.hpp"
#include "test_helpers.hpp"

using namespace qcert;
using namespace qcert::extract;

namespace {

ToeplitzSeed seed_from_value(std::uint64_t value, std::uint64_t len) {
    ToeplitzSeed s;
    s.bits = BitString(len);
    for (std::uint64_t b = 0; b < len; ++b) s.bits.set_bit(b, (value >> b) & 1);
    return s;
}

BitString bits_from_value(std::uint64_t value, std::uint64_t len) {
    BitString b(len);
    for (std::uint64_t i = 0; i < len; ++i) b.set_bit(i, (value >> i) & 1);
    return b;
}

}  // namespace

TEST_CASE("output length") {
    CHECK(output_length(29951536.0, 0) == 29951536);
    CHECK(output_length(100.0, 32) == 36);
    CHECK(output_length(0.0, 0) == 0);
    CHECK(output_length(-5.2, 0) == 0);
    CHECK(output_length(63.9, 32) == 0);
    CHECK_THROWS_AS(output_length(10.0, -1), std::invalid_argument);
}

TEST_CASE("unit inputs read off toeplitz matrix columns") {
    // n=3, ell=2: T[i][j] = s[i - j + 2], columns (s2, s3), (s1, s2), (s0, s1).
    const auto seed = seed_from_value(0b1011, 4);  // s0=1 s1=1 s2=0 s3=1
    const bool s[4] = {true, true, false, true};
    for (int j = 0; j < 3; ++j) {
        const auto y = toeplitz_hash(bits_from_value(1u << j, 3), 2, seed);
        CHECK(y.bit(0) == s[2 - j]);
        CHECK(y.bit(1) == s[3 - j]);
    }
}

TEST_CASE("zero input hashes to zero for any seed") {
    Rng rng(1);
    for (int rep = 0; rep < 10; ++rep) {
        ToeplitzSeed seed{BitString::random(rng, 100 + 60 - 1)};
        CHECK(toeplitz_hash(BitString(100), 60, seed).ones() == 0);
    }
}

TEST_CASE("blocked kernel matches the bit-by-bit reference") {
    Rng rng(97);
    const std::pair<std::uint64_t, std::uint64_t> shapes[] = {
        {1, 1},   {5, 3},    {64, 64},    {65, 1},    {65, 64},
        {128, 5}, {129, 65}, {1000, 333}, {4096, 2048}};
    for (const auto& [n, ell] : shapes) {
        const auto x = BitString::random(rng, n);
        ToeplitzSeed seed{BitString::random(rng, n + ell - 1)};
        const auto fast = toeplitz_hash(x, ell, seed);
        const auto ref = toeplitz_hash_reference(x, ell, seed);
        CHECK(fast == ref);
    }
}

TEST_CASE("hash is linear over GF(2)") {
    Rng rng(33);
    const std::uint64_t n = 500, ell = 200;
    for (int rep = 0; rep < 10; ++rep) {
        ToeplitzSeed seed{BitString::random(rng, n + ell - 1)};
        const auto x = BitString::random(rng, n);
        const auto y = BitString::random(rng, n);
        const auto lhs = toeplitz_hash(x ^ y, ell, seed);
        const auto rhs = toeplitz_hash(x, ell, seed) ^ toeplitz_hash(y, ell, seed);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("two-universality, literal pair enumeration at n=5 ell=3") {
    const std::uint64_t n = 5, ell = 3, slen = n + ell - 1;
    for (std::uint64_t xa = 0; xa < (1u << n); ++xa) {
        for (std::uint64_t xb = xa + 1; xb < (1u << n); ++xb) {
            std::uint64_t collisions = 0;
            for (std::uint64_t sv = 0; sv < (1u << slen); ++sv) {
                const auto seed = seed_from_value(sv, slen);
                const auto ya = toeplitz_hash(bits_from_value(xa, n), ell, seed);
                const auto yb = toeplitz_hash(bits_from_value(xb, n), ell, seed);
                if (ya == yb) ++collisions;
            }
            // collision fraction <= 2^-ell
            CHECK(collisions * (1u << ell) <= (1u << slen));
        }
    }
}

TEST_CASE("two-universality via differences up to n=10 ell=4") {
    // h(x) = h(x') iff h(x ^ x') = 0 by linearity, so scanning all nonzero
    // differences covers every input pair exactly.
    for (std::uint64_t n = 2; n <= 10; n += 2) {
        for (std::uint64_t ell = 1; ell <= std::min<std::uint64_t>(4, n); ell += 3) {
            const std::uint64_t slen = n + ell - 1;
            for (std::uint64_t z = 1; z < (1ull << n); ++z) {
                std::uint64_t zero_hits = 0;
                for (std::uint64_t sv = 0; sv < (1ull << slen); ++sv) {
                    const auto seed = seed_from_value(sv, slen);
                    if (toeplitz_hash(bits_from_value(z, n), ell, seed).ones() == 0) ++zero_hits;
                }
                CHECK(zero_hits * (1ull << ell) <= (1ull << slen));
            }
        }
    }
}

TEST_CASE("outcome serialization widths") {
    const auto model4 = simulate::ququart_experiment_model();
    Rng rng(12);
    Rng seed_rng(13);
    const auto seed_bits = BitString::random(seed_rng, protocol::seed_length(1000) * 64);
    const auto run4 = simulate::sample_run(model4, 1000, seed_bits, rng);
    CHECK(serialize_outcomes(run4).size() == 2 * run4.z_outcomes.size());

    const auto model2 = simulate::qubit_experiment_model();
    const auto run2 = simulate::sample_run(model2, 1000, seed_bits, rng);
    CHECK(serialize_outcomes(run2).size() == run2.z_outcomes.size());

    auto run3 = run2;
    run3.dim = 3;
    CHECK_THROWS_AS(serialize_outcomes(run3), std::invalid_argument);
}

TEST_CASE("extract run end to end at small scale") {
    const auto model = simulate::qubit_experiment_model();
    const std::uint64_t m = 10000;
    Rng rng(2029);
    Rng seed_rng(2030);
    const auto seed_bits = BitString::random(seed_rng, protocol::seed_length(m) * 64);
    const auto run = simulate::sample_run(model, m, seed_bits, rng);
    const auto cert = protocol::certify(m, run.x_counts, 1.0);
    REQUIRE(cert.b_sec > 0.0);

    const std::uint64_t n = run.schedule.n_z;
    const std::uint64_t ell = output_length(cert.b_sec, 0);
    Rng ext_rng(777);
    ToeplitzSeed seed{BitString::random(ext_rng, n + ell - 1)};

    const auto y1 = extract_run(run, cert, seed, 0);
    CHECK(y1.size() == ell);
    const auto y2 = extract_run(run, cert, seed, 0);
    CHECK(y1 == y2);

    // Positive security exponent shortens the output by 2 * exponent bits.
    ToeplitzSeed seed64{BitString::random(ext_rng, n + output_length(cert.b_sec, 64) - 1)};
    CHECK(extract_run(run, cert, seed64, 64).size() == ell - 128);
}

TEST_CASE("extract run refuses inconsistent or worthless inputs") {
    const auto model = simulate::qubit_experiment_model();
    Rng rng(3031);
    Rng seed_rng(3032);
    const auto seed_bits = BitString::random(seed_rng, protocol::seed_length(400) * 64);
    const auto run = simulate::sample_run(model, 400, seed_bits, rng);

    auto cert = protocol::certify(400, run.x_counts, 1.0);
    ToeplitzSeed seed{BitString::random(rng, 1)};

    auto negative = cert;
    negative.b_sec = -10.0;
    CHECK_THROWS_AS(extract_run(run, negative, seed, 0), CertifiesNothingError);

    auto mismatched = cert;
    mismatched.m = 500;
    CHECK_THROWS_AS(extract_run(run, mismatched, seed, 0), std::invalid_argument);

    // Wrong seed length.
    CHECK_THROWS_AS(extract_run(run, cert, seed, 0), std::invalid_argument);
}

TEST_CASE("bit container and raw seed files round trip") {
    testing::TempDir dir;
    Rng rng(515);
    const auto payload = BitString::random(rng, 12345);

    const auto container = dir.file("y.qcbits");
    write_bits_file(payload, container, 0xABCD);
    CHECK(read_bits_file(container) == payload);

    const auto raw = dir.file("seed.bin");
    write_seed_file(payload, raw);
    CHECK(read_seed_file(raw) == payload);

    CHECK_THROWS_AS(read_bits_file(raw), std::runtime_error);
    CHECK_THROWS_AS(read_bits_file(dir.file("missing.qcbits")), std::runtime_error);
}
