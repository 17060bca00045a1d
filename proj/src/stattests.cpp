#include "qcert/stattests.hpp"

#include <gsl/gsl_sf_gamma.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qcert::stattests {

namespace {

TestReport make_report(std::string name, double statistic, double p) {
    p = std::clamp(p, 0.0, 1.0);
    return TestReport{std::move(name), statistic, p, p >= 0.01, p >= 0.001};
}

}  // namespace

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_q: invalid arguments");
    return gsl_sf_gamma_inc_Q(a, x);
}

TestReport monobit(const BitString& bits) {
    const std::uint64_t n = bits.size();
    if (n < 100) throw std::invalid_argument("monobit: need at least 100 bits");
    const double ones = static_cast<double>(bits.ones());
    const double s = 2.0 * ones - static_cast<double>(n);  // sum of +-1
    const double s_obs = std::abs(s) / std::sqrt(static_cast<double>(n));
    const double p = std::erfc(s_obs / std::sqrt(2.0));
    return make_report("monobit", s_obs, p);
}

TestReport runs_test(const BitString& bits) {
    const std::uint64_t n = bits.size();
    if (n < 100) throw std::invalid_argument("runs_test: need at least 100 bits");
    const double pi = static_cast<double>(bits.ones()) / static_cast<double>(n);
    // Prerequisite of the asymptotic formula; grossly biased strings fail
    // outright rather than produce a meaningless statistic.
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(static_cast<double>(n)))
        return make_report("runs", 0.0, 0.0);
    std::uint64_t v = 1;
    for (std::uint64_t i = 1; i < n; ++i)
        if (bits.bit(i) != bits.bit(i - 1)) ++v;
    const double nn = static_cast<double>(n);
    const double num = std::abs(static_cast<double>(v) - 2.0 * nn * pi * (1.0 - pi));
    const double den = 2.0 * std::sqrt(2.0 * nn) * pi * (1.0 - pi);
    const double p = std::erfc(num / den);
    return make_report("runs", static_cast<double>(v), p);
}

TestReport block_frequency(const BitString& bits, std::uint64_t block_len) {
    if (block_len < 8) throw std::invalid_argument("block_frequency: block_len >= 8");
    const std::uint64_t blocks = bits.size() / block_len;
    if (blocks < 10) throw std::invalid_argument("block_frequency: need at least 10 blocks");
    double chi2 = 0.0;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        std::uint64_t ones = 0;
        for (std::uint64_t i = 0; i < block_len; ++i)
            ones += bits.bit(b * block_len + i);
        const double frac = static_cast<double>(ones) / static_cast<double>(block_len);
        chi2 += (frac - 0.5) * (frac - 0.5);
    }
    chi2 *= 4.0 * static_cast<double>(block_len);
    const double p = gamma_q(static_cast<double>(blocks) / 2.0, chi2 / 2.0);
    return make_report("block_frequency", chi2, p);
}

TestReport chi_square_bytes(const BitString& bits) {
    const std::uint64_t n_bytes = bits.size() / 8;
    if (n_bytes < 1280)
        throw std::invalid_argument("chi_square_bytes: need at least 1280 full bytes");
    std::array<std::uint64_t, 256> hist{};
    const auto bytes = bits.to_bytes();
    for (std::uint64_t i = 0; i < n_bytes; ++i) ++hist[bytes[i]];
    const double expected = static_cast<double>(n_bytes) / 256.0;
    double chi2 = 0.0;
    for (const auto h : hist) {
        const double d = static_cast<double>(h) - expected;
        chi2 += d * d / expected;
    }
    const double p = gamma_q(255.0 / 2.0, chi2 / 2.0);
    return make_report("chi_square_bytes", chi2, p);
}

BatteryResult battery(const BitString& bits) {
    if (bits.size() < 1'000'000)
        throw std::invalid_argument("battery: need at least 1e6 bits");
    BatteryResult out;
    out.reports.push_back(monobit(bits));
    out.reports.push_back(runs_test(bits));
    out.reports.push_back(block_frequency(bits, 128));
    out.reports.push_back(chi_square_bytes(bits));
    out.summary = Verdict::Pass;
    for (const auto& r : out.reports) {
        if (!r.pass_at_01pct) {
            out.summary = Verdict::Fail;
            break;
        }
        if (!r.pass_at_1pct) out.summary = Verdict::Warn;
    }
    return out;
}

std::string reports_csv(std::span<const TestReport> reports) {
    std::ostringstream os;
    os << "test,statistic,p_value,verdict01,verdict001\n";
    os.precision(9);
    for (const auto& r : reports)
        os << r.name << ',' << r.statistic << ',' << r.p_value << ','
           << (r.pass_at_1pct ? "pass" : "fail") << ',' << (r.pass_at_01pct ? "pass" : "fail")
           << '\n';
    return os.str();
}

double ks_uniform_pvalue(std::vector<double> sample) {
    if (sample.empty()) throw std::invalid_argument("ks_uniform_pvalue: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, std::abs(sample[i] - lo), std::abs(hi - sample[i])});
    }
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double q = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        q += 2.0 * sign * term;
        sign = -sign;
        if (term < 1e-16) break;
    }
    return std::clamp(q, 0.0, 1.0);
}

}  // namespace qcert::stattests
