#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qcert/rng.hpp"
#include "qcert/simulate.hpp"
#include "qcert/stattests.hpp"

using namespace qcert;
using namespace qcert::stattests;

namespace {

BitString alternating(std::uint64_t n) {
    BitString b(n);
    for (std::uint64_t i = 0; i < n; i += 2) b.set_bit(i, true);
    return b;
}

BitString constant_ones(std::uint64_t n) {
    BitString b(n);
    for (std::uint64_t i = 0; i < n; ++i) b.set_bit(i, true);
    return b;
}

BitString bernoulli_stream(double p, std::uint64_t n, std::uint64_t seed) {
    Rng rng(seed);
    BitString b(n);
    for (std::uint64_t i = 0; i < n; ++i) b.set_bit(i, rng.next_double() < p);
    return b;
}

}  // namespace

TEST_CASE("monobit") {
    CHECK(monobit(alternating(10000)).p_value > 0.99);
    CHECK(monobit(constant_ones(10000)).p_value < 1e-10);
    Rng rng(1);
    CHECK(monobit(BitString::random(rng, 1000000)).p_value >= 0.001);
    CHECK_THROWS_AS(monobit(BitString(50)), std::invalid_argument);
}

TEST_CASE("runs test flags pathological alternation") {
    CHECK(runs_test(alternating(10000)).p_value < 1e-10);
    Rng rng(2);
    CHECK(runs_test(BitString::random(rng, 1000000)).p_value >= 0.001);
    // Heavy bias trips the precondition and reports p = 0.
    CHECK(runs_test(constant_ones(10000)).p_value == 0.0);
}

TEST_CASE("block frequency") {
    Rng rng(3);
    CHECK(block_frequency(BitString::random(rng, 1000000), 128).p_value >= 0.001);
    // Blocks of solid zeros and ones have extreme per-block fractions.
    BitString skewed(100000);
    for (std::uint64_t i = 0; i < 50000; ++i) skewed.set_bit(i, true);
    CHECK(block_frequency(skewed, 128).p_value < 1e-10);
    CHECK_THROWS_AS(block_frequency(BitString(1000), 128), std::invalid_argument);
    CHECK_THROWS_AS(block_frequency(BitString(100000), 4), std::invalid_argument);
}

TEST_CASE("byte chi-square") {
    Rng rng(4);
    CHECK(chi_square_bytes(BitString::random(rng, 1000000)).p_value >= 0.001);
    CHECK(chi_square_bytes(constant_ones(100000)).p_value < 1e-10);
    CHECK_THROWS_AS(chi_square_bytes(BitString(8000)), std::invalid_argument);
}

TEST_CASE("battery on a healthy stream") {
    Rng rng(4);
    const auto result = battery(BitString::random(rng, 1000000));
    CHECK(result.reports.size() == 4);
    CHECK(result.summary == Verdict::Pass);
    for (const auto& r : result.reports) {
        CHECK(r.pass_at_1pct);
        CHECK(r.pass_at_01pct);
    }
}

TEST_CASE("battery rejects a biased stream") {
    const auto result = battery(bernoulli_stream(0.45, 1000000, 6));
    CHECK(result.summary == Verdict::Fail);
    CHECK_THROWS_AS(battery(BitString(100000)), std::invalid_argument);
}

TEST_CASE("battery is deterministic") {
    Rng a(7), b(7);
    const auto ra = battery(BitString::random(a, 1000000));
    const auto rb = battery(BitString::random(b, 1000000));
    for (std::size_t i = 0; i < ra.reports.size(); ++i) {
        CHECK(ra.reports[i].statistic == rb.reports[i].statistic);
        CHECK(ra.reports[i].p_value == rb.reports[i].p_value);
    }
}

TEST_CASE("raw generation-basis output looks good classically but is detectably biased") {
    // The generation basis of the bench qubit model is near-uniform
    // (0.5020 / 0.4980) yet the 0.4% bias is plainly visible to the
    // frequency test at a few million bits; a clean battery pass on raw
    // output was never evidence of security, and at this length the raw
    // string does not even pass classically.
    const auto raw = bernoulli_stream(0.4980, 4000000, 1);
    const auto result = battery(raw);
    CHECK(result.reports[0].p_value < 0.001);      // monobit sees the bias
    CHECK(result.reports[3].pass_at_01pct);        // bytes still look fine
    CHECK(result.summary == Verdict::Fail);
}

TEST_CASE("csv report format") {
    Rng rng(8);
    const auto result = battery(BitString::random(rng, 1000000));
    const auto csv = reports_csv(result.reports);
    CHECK(csv.rfind("test,statistic,p_value,verdict01,verdict001\n", 0) == 0);
    std::istringstream is(csv);
    std::string line;
    int lines = 0;
    while (std::getline(is, line)) ++lines;
    CHECK(lines == 5);
}

TEST_CASE("p-values are uniform across independent streams") {
    // Meta-check mirroring a chi-square-of-p-values evaluation: 500 pinned
    // streams per test, Kolmogorov-Smirnov against Uniform(0,1).
    const std::uint64_t stream_bits = 1 << 17;
    Rng rng(424243);
    std::vector<double> p_mono, p_runs, p_block, p_bytes;
    for (int s = 0; s < 500; ++s) {
        Rng stream = rng.derive(static_cast<std::uint64_t>(s));
        const auto bits = BitString::random(stream, stream_bits);
        p_mono.push_back(monobit(bits).p_value);
        p_runs.push_back(runs_test(bits).p_value);
        p_block.push_back(block_frequency(bits, 128).p_value);
        p_bytes.push_back(chi_square_bytes(bits).p_value);
    }
    CHECK(ks_uniform_pvalue(p_mono) > 0.001);
    CHECK(ks_uniform_pvalue(p_runs) > 0.001);
    CHECK(ks_uniform_pvalue(p_block) > 0.001);
    CHECK(ks_uniform_pvalue(p_bytes) > 0.001);
}
