#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qcert/bits.hpp"

namespace qcert::stattests {

/// One test outcome.  Verdicts follow the usual two-level convention:
/// pass_at_1pct means p >= 0.01, pass_at_01pct means p >= 0.001.
struct TestReport {
    std::string name;
    double statistic = 0.0;
    double p_value = 0.0;
    bool pass_at_1pct = false;
    bool pass_at_01pct = false;
};

enum class Verdict { Pass, Warn, Fail };

struct BatteryResult {
    std::vector<TestReport> reports;
    Verdict summary = Verdict::Pass;
};

/// Frequency test: two-sided p-value of the normalized bit sum.  n >= 100.
TestReport monobit(const BitString& bits);

/// Total-runs test (conditioned on the observed ones fraction).  n >= 100.
TestReport runs_test(const BitString& bits);

/// Chi-square of per-block ones fractions; block_len >= 8, at least 10 blocks.
TestReport block_frequency(const BitString& bits, std::uint64_t block_len);

/// Chi-square over the 256 byte values; needs >= 1280 full bytes so every
/// bin expects >= 5 hits.
TestReport chi_square_bytes(const BitString& bits);

/// Runs the four tests above (block length 128).  Requires >= 1e6 bits.
/// Summary: Fail if any p < 0.001, Warn if any p < 0.01, else Pass.
BatteryResult battery(const BitString& bits);

/// CSV rows `test,statistic,p_value,verdict01,verdict001` with header.
std::string reports_csv(std::span<const TestReport> reports);

/// Upper regularized incomplete gamma Q(a, x) (chi-square tail helper).
double gamma_q(double a, double x);

/// Kolmogorov-Smirnov p-value of a sample against Uniform(0,1).
double ks_uniform_pvalue(std::vector<double> sample);

}  // namespace qcert::stattests
