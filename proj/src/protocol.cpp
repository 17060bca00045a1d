#include "qcert/protocol.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace qcert::protocol {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321;

std::uint64_t ceil_sqrt(std::uint64_t m) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(m)));
    while (r > 0 && static_cast<unsigned __int128>(r) * r > m) --r;
    while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= m) ++r;
    return r * r == m ? r : r + 1;
}

std::uint64_t ceil_log2(const mpz_class& v) {
    if (v <= 1) return 0;
    const std::size_t bits = mpz_sizeinbase(v.get_mpz_t(), 2);
    const bool power_of_two = mpz_popcount(v.get_mpz_t()) == 1;
    return power_of_two ? bits - 1 : bits;
}

// C(n-1, j)   = C(n, j) * (n - j) / n   (skip a candidate element)
// C(n-1, j-1) = C(n, j) * j / n         (take a candidate element)
void binom_step_skip(mpz_class& c, std::uint64_t n, std::uint64_t j) {
    mpz_mul_ui(c.get_mpz_t(), c.get_mpz_t(), n - j);
    mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), n);
}

void binom_step_take(mpz_class& c, std::uint64_t n, std::uint64_t j) {
    mpz_mul_ui(c.get_mpz_t(), c.get_mpz_t(), j);
    mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), n);
}

// MSB-first read of len bits starting at offset.
mpz_class block_value(const BitString& bits, std::uint64_t offset, std::uint64_t len) {
    mpz_class v = 0;
    for (std::uint64_t i = 0; i < len; ++i) {
        mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), 1);
        if (bits.bit(offset + i)) mpz_setbit(v.get_mpz_t(), 0);
    }
    return v;
}

double log_multinomial_pmf(std::span<const std::uint64_t> counts, std::span<const double> p) {
    std::uint64_t n = 0;
    for (auto c : counts) n += c;
    double lp = std::lgamma(static_cast<double>(n) + 1.0);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double c = static_cast<double>(counts[i]);
        lp -= std::lgamma(c + 1.0);
        if (counts[i] > 0) {
            if (p[i] <= 0.0) return -std::numeric_limits<double>::infinity();
            lp += c * std::log(p[i]);
        }
    }
    return lp;
}

// Iterates all compositions of n into d nonnegative parts, lexicographically.
bool next_composition(std::vector<std::uint64_t>& v, std::uint64_t n) {
    const std::size_t d = v.size();
    if (d == 1) return false;
    // Move one unit from the tail bucket leftward, standard odometer.
    if (v[d - 1] == n) return false;
    for (std::size_t i = d - 1; i-- > 0;) {
        if (v[i] > 0) {
            --v[i];
            std::uint64_t tail = v[d - 1] + 1;
            v[d - 1] = 0;
            v[i + 1] = tail;
            return true;
        }
    }
    return false;
}

}  // namespace

std::pair<std::uint64_t, std::uint64_t> schedule_sizes(std::uint64_t m) {
    if (m < 2) throw std::invalid_argument("schedule_sizes: m >= 2 required");
    const std::uint64_t n_x = ceil_sqrt(m);
    return {n_x, m - n_x};
}

mpz_class binomial(std::uint64_t m, std::uint64_t k) {
    if (k > m) return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), m, k);
    return r;
}

namespace {

std::uint64_t seed_length_uncached(std::uint64_t m) {
    const std::uint64_t k = ceil_sqrt(m);
    if (m <= 1'000'000) return ceil_log2(binomial(m, k));

    // log2 C(m,k) by log-gamma, with a conservative error interval.
    const double l1 = std::lgamma(static_cast<double>(m) + 1.0);
    const double l2 = std::lgamma(static_cast<double>(k) + 1.0);
    const double l3 = std::lgamma(static_cast<double>(m - k) + 1.0);
    const double L = (l1 - l2 - l3) / kLn2;
    const double eps = 1e-13 * (std::abs(l1) + std::abs(l2) + std::abs(l3)) / kLn2 + 1e-9;
    const double lo = std::ceil(L - eps), hi = std::ceil(L + eps);
    if (lo == hi) return static_cast<std::uint64_t>(lo);
    return ceil_log2(binomial(m, k));  // ambiguous ceiling: settle exactly
}

}  // namespace

std::uint64_t seed_length(std::uint64_t m) {
    if (m < 2) throw std::invalid_argument("seed_length: m >= 2 required");
    // certify() sits in Monte Carlo inner loops that revisit the same m.
    static std::mutex mu;
    static std::unordered_map<std::uint64_t, std::uint64_t> cache;
    {
        std::scoped_lock lock(mu);
        if (const auto it = cache.find(m); it != cache.end()) return it->second;
    }
    const std::uint64_t t = seed_length_uncached(m);
    std::scoped_lock lock(mu);
    cache.emplace(m, t);
    return t;
}

std::vector<std::uint64_t> unrank_combination(const mpz_class& index, std::uint64_t m,
                                              std::uint64_t k) {
    if (k > m) throw std::invalid_argument("unrank_combination: k > m");
    if (index < 0 || index >= binomial(m, k))
        throw std::out_of_range("unrank_combination: index outside [0, C(m,k))");
    std::vector<std::uint64_t> out;
    out.reserve(k);
    if (k == 0) return out;

    mpz_class rem = index;
    std::uint64_t x = 0, r = k;
    mpz_class c = binomial(m - 1, k - 1);  // combinations that include x
    while (r > 0) {
        const std::uint64_t n = m - x - 1, j = r - 1;
        if (rem < c) {
            out.push_back(x);
            --r;
            ++x;
            if (r == 0) break;
            binom_step_take(c, n, j);
        } else {
            rem -= c;
            ++x;
            binom_step_skip(c, n, j);
        }
    }
    return out;
}

mpz_class rank_combination(std::span<const std::uint64_t> positions, std::uint64_t m,
                           std::uint64_t k) {
    if (positions.size() != k)
        throw std::invalid_argument("rank_combination: position count != k");
    if (k > m) throw std::invalid_argument("rank_combination: k > m");
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (positions[i] >= m || (i > 0 && positions[i] <= positions[i - 1]))
            throw std::invalid_argument("rank_combination: positions not strictly increasing in [0,m)");
    }
    mpz_class idx = 0;
    if (k == 0) return idx;

    std::uint64_t x = 0, r = k;
    mpz_class c = binomial(m - 1, k - 1);
    for (const std::uint64_t s : positions) {
        while (x < s) {
            const std::uint64_t n = m - x - 1, j = r - 1;
            idx += c;
            binom_step_skip(c, n, j);
            ++x;
        }
        const std::uint64_t n = m - x - 1, j = r - 1;
        --r;
        ++x;
        if (r == 0) break;
        binom_step_take(c, n, j);
    }
    return idx;
}

ScheduleDraw seed_to_schedule(const BitString& seed_bits, std::uint64_t m) {
    const auto [n_x, n_z] = schedule_sizes(m);
    const std::uint64_t t = seed_length(m);
    if (seed_bits.size() < t)
        throw std::invalid_argument("seed_to_schedule: seed shorter than t(m)");
    const mpz_class total = binomial(m, n_x);

    std::uint64_t offset = 0;
    while (offset + t <= seed_bits.size()) {
        const mpz_class v = block_value(seed_bits, offset, t);
        offset += t;
        if (v < total) {
            Schedule s;
            s.m = m;
            s.n_x = n_x;
            s.n_z = n_z;
            s.x_positions = unrank_combination(v, m, n_x);
            return ScheduleDraw{std::move(s), offset};
        }
    }
    throw std::runtime_error("seed_to_schedule: seed exhausted before acceptance");
}

Certificate certify(std::uint64_t m, const entropy::CountsVector& counts, double q) {
    const auto [n_x, n_z] = schedule_sizes(m);
    if (counts.total() != n_x)
        throw std::invalid_argument("certify: count total does not match ceil(sqrt(m))");
    if (!(q > 0.0)) throw std::invalid_argument("certify: q must be positive");

    Certificate cert;
    cert.m = m;
    cert.n_x = n_x;
    cert.q = q;
    cert.h_half_estimate = entropy::bayesian_h_half(counts);
    cert.min_entropy_bound = q - cert.h_half_estimate;
    cert.seed_cost_bits = seed_length(m);
    cert.b_sec = static_cast<double>(n_z) * cert.min_entropy_bound -
                 static_cast<double>(cert.seed_cost_bits);
    cert.rate = cert.b_sec / static_cast<double>(m);
    return cert;
}

double single_shot_rate_qubit(std::uint64_t n_1, std::uint64_t m) {
    const auto [n_x, n_z] = schedule_sizes(m);
    if (n_1 > n_x) throw std::invalid_argument("single_shot_rate_qubit: n_1 > n_x");
    const double nx = static_cast<double>(n_x);
    const double n1 = static_cast<double>(n_1);
    const double n0 = nx - n1;

    const double norm = 2.0 * (std::lgamma(nx + 2.0) - std::lgamma(nx + 2.5)) / kLn2;
    const double g0 = std::exp(std::lgamma(n0 + 1.5) - std::lgamma(n0 + 1.0));
    const double g1 = std::exp(std::lgamma(n1 + 1.5) - std::lgamma(n1 + 1.0));
    const double inner = 1.0 - norm - 2.0 * std::log2(g0 + g1);

    const double b = static_cast<double>(n_z) * inner - static_cast<double>(seed_length(m));
    return b / static_cast<double>(m);
}

std::vector<double> error_distribution(std::uint64_t n_x, const entropy::ProbVector& p) {
    if (p.dim() != 2) throw std::invalid_argument("error_distribution: d = 2 only");
    std::vector<double> pi(n_x + 1);
    for (std::uint64_t n1 = 0; n1 <= n_x; ++n1) {
        const std::uint64_t counts[2] = {n_x - n1, n1};
        pi[n1] = std::exp(log_multinomial_pmf(counts, p.values()));
    }
    return pi;
}

RateStats expected_rate_exact(std::uint64_t m, const entropy::ProbVector& p, double q) {
    const auto [n_x, n_z] = schedule_sizes(m);
    const std::size_t d = p.dim();
    const mpz_class budget = binomial(n_x + d - 1, d - 1);
    if (budget > 1'000'000)
        throw std::domain_error(
            "expected_rate_exact: composition count over budget; use the Monte Carlo mode");

    std::vector<std::uint64_t> counts(d, 0);
    counts[0] = n_x;
    double mean = 0.0, moment2 = 0.0;
    do {
        const double w = std::exp(log_multinomial_pmf(counts, p.values()));
        if (w == 0.0) continue;
        const double r = certify(m, entropy::CountsVector(counts), q).rate;
        mean += w * r;
        moment2 += w * r * r;
    } while (next_composition(counts, n_x));

    return RateStats{mean, std::sqrt(std::max(moment2 - mean * mean, 0.0))};
}

RateStats expected_rate_montecarlo(std::uint64_t m, const entropy::ProbVector& p, double q,
                                   std::uint64_t reps, const Rng& rng, int workers) {
    if (reps == 0) throw std::invalid_argument("expected_rate_montecarlo: reps >= 1");
    const std::uint64_t n_x = schedule_sizes(m).first;
    std::vector<double> rates(reps);
    const int threads = workers > 0 ? workers : omp_get_max_threads();

#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::int64_t rep = 0; rep < static_cast<std::int64_t>(reps); ++rep) {
        Rng stream = rng.derive(static_cast<std::uint64_t>(rep));
        const auto counts = random::multinomial(stream, p.values(), n_x);
        rates[static_cast<std::size_t>(rep)] =
            certify(m, entropy::CountsVector(counts), q).rate;
    }

    // Sequential reduction in rep order: identical result for any worker count.
    double mean = 0.0;
    for (double r : rates) mean += r;
    mean /= static_cast<double>(reps);
    double var = 0.0;
    for (double r : rates) var += (r - mean) * (r - mean);
    var /= static_cast<double>(reps);
    return RateStats{mean, std::sqrt(var)};
}

double asymptotic_rate(const entropy::ProbVector& p, double q) {
    return q - entropy::max_entropy_half(p);
}

std::uint64_t min_m_positive(const entropy::ProbVector& p, double q) {
    if (!(asymptotic_rate(p, q) > 0.0))
        throw std::domain_error("min_m_positive: asymptotic rate is not positive");
    for (std::uint64_t m = 2; m <= 1'000'000; ++m) {
        if (expected_rate_exact(m, p, q).mean > 0.0) return m;
    }
    throw std::runtime_error("min_m_positive: no positive expected rate below m = 1e6");
}

std::string certificate_to_text(const Certificate& cert) {
    std::ostringstream os;
    os.precision(17);
    os << "format = qcert-certificate/v1\n";
    os << "m = " << cert.m << "\n";
    os << "n_x = " << cert.n_x << "\n";
    os << "q = " << cert.q << "\n";
    os << "h_half_estimate = " << cert.h_half_estimate << "\n";
    os << "min_entropy_bound = " << cert.min_entropy_bound << "\n";
    os << "seed_cost_bits = " << cert.seed_cost_bits << "\n";
    os << "b_sec = " << cert.b_sec << "\n";
    os << "rate = " << cert.rate << "\n";
    return os.str();
}

Certificate certificate_from_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("certificate_from_text: malformed line: " + line);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto need = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end())
            throw std::runtime_error(std::string("certificate_from_text: missing field ") + key);
        return it->second;
    };
    if (need("format") != "qcert-certificate/v1")
        throw std::runtime_error("certificate_from_text: unknown format tag");

    Certificate cert;
    cert.m = std::stoull(need("m"));
    cert.n_x = std::stoull(need("n_x"));
    cert.q = std::stod(need("q"));
    cert.h_half_estimate = std::stod(need("h_half_estimate"));
    cert.min_entropy_bound = std::stod(need("min_entropy_bound"));
    cert.seed_cost_bits = std::stoull(need("seed_cost_bits"));
    cert.b_sec = std::stod(need("b_sec"));
    cert.rate = std::stod(need("rate"));

    // Redundant fields must cohere with the arithmetic they came from.
    if (std::abs(cert.min_entropy_bound - (cert.q - cert.h_half_estimate)) > 1e-9 ||
        std::abs(cert.rate * static_cast<double>(cert.m) - cert.b_sec) > 1e-6)
        throw std::runtime_error("certificate_from_text: inconsistent certificate fields");
    return cert;
}

}  // namespace qcert::protocol
