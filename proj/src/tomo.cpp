#include "qcert/tomo.hpp"

#include <omp.h>

#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace qcert::tomo {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321;

std::uint64_t ceil_sqrt_half(std::uint64_t m) {
    // ceil(sqrt(m)/2) without floating point: ceil(ceil_sqrt... careful,
    // ceil(sqrt(m)/2) = ceil(isqrt-ish); do it on doubles then fix up.
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(m)));
    while (r > 0 && static_cast<unsigned __int128>(r) * r > m) --r;
    while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= m) ++r;
    // sqrt(m) in [r, r+1); ceil(sqrt(m)/2):
    if (r * r == m) return (r + 1) / 2;          // sqrt exact
    return r / 2 + 1;                            // fractional sqrt: ceil(x/2) with x in (r, r+1)
}

double binomial_log_pmf(std::uint64_t n, std::uint64_t k, double p) {
    const double nn = static_cast<double>(n), kk = static_cast<double>(k);
    double lp = std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0);
    if (k > 0) {
        if (p <= 0.0) return -std::numeric_limits<double>::infinity();
        lp += kk * std::log(p);
    }
    if (k < n) {
        if (p >= 1.0) return -std::numeric_limits<double>::infinity();
        lp += (nn - kk) * std::log1p(-p);
    }
    return lp;
}

std::uint64_t binomial_draw(Rng& rng, std::uint64_t n, double p) {
    std::uint64_t k = 0;
    for (std::uint64_t t = 0; t < n; ++t)
        if (rng.next_double() < p) ++k;
    return k;
}

}  // namespace

double fiorentino_bound(double r_x, double r_y) {
    const double s = r_x * r_x + r_y * r_y;
    if (s > 1.0 + 1e-12) throw std::invalid_argument("fiorentino_bound: r_x^2 + r_y^2 > 1");
    return 1.0 - std::log2(1.0 + std::sqrt(std::max(1.0 - s, 0.0)));
}

double up_bound_rx(double r_x) {
    if (std::abs(r_x) > 1.0 + 1e-12) throw std::invalid_argument("up_bound_rx: |r_x| > 1");
    const double s = std::min(r_x * r_x, 1.0);
    return 1.0 - std::log2(1.0 + std::sqrt(1.0 - s));
}

double estimate_r(std::uint64_t n_0, std::uint64_t n_1) {
    return (static_cast<double>(n_0) - static_cast<double>(n_1)) /
           (static_cast<double>(n_0 + n_1) + 2.0);
}

namespace {

std::uint64_t ceil_log2_exact(std::uint64_t m, std::uint64_t k) {
    const mpz_class c = protocol::binomial(m, k);
    const std::size_t bits = mpz_sizeinbase(c.get_mpz_t(), 2);
    return mpz_popcount(c.get_mpz_t()) == 1 ? bits - 1 : bits;
}

std::uint64_t tomo_seed_length_uncached(std::uint64_t m) {
    const std::uint64_t k = 2 * ceil_sqrt_half(m);
    if (m <= 1'000'000) return 2 * ceil_log2_exact(m, k);
    const double l1 = std::lgamma(static_cast<double>(m) + 1.0);
    const double l2 = std::lgamma(static_cast<double>(k) + 1.0);
    const double l3 = std::lgamma(static_cast<double>(m - k) + 1.0);
    const double L = (l1 - l2 - l3) / kLn2;
    const double eps = 1e-13 * (std::abs(l1) + std::abs(l2) + std::abs(l3)) / kLn2 + 1e-9;
    const double lo = std::ceil(L - eps), hi = std::ceil(L + eps);
    if (lo == hi) return 2 * static_cast<std::uint64_t>(lo);
    return 2 * ceil_log2_exact(m, k);
}

}  // namespace

std::uint64_t tomo_seed_length(std::uint64_t m) {
    if (m < 4) throw std::invalid_argument("tomo_seed_length: m >= 4 required");
    static std::mutex mu;
    static std::unordered_map<std::uint64_t, std::uint64_t> cache;
    {
        std::scoped_lock lock(mu);
        if (const auto it = cache.find(m); it != cache.end()) return it->second;
    }
    const std::uint64_t t = tomo_seed_length_uncached(m);
    std::scoped_lock lock(mu);
    cache.emplace(m, t);
    return t;
}

TomoSchedule tomo_schedule(std::uint64_t m) {
    if (m < 4) throw std::invalid_argument("tomo_schedule: m >= 4 required");
    TomoSchedule s;
    s.m = m;
    s.n_x = ceil_sqrt_half(m);
    s.n_y = s.n_x;
    s.n_z = m - 2 * s.n_x;
    s.t_bits = tomo_seed_length(m);
    return s;
}

double tomo_rate(std::uint64_t m, const TomoCounts& counts) {
    const TomoSchedule sched = tomo_schedule(m);
    if (counts.n0x + counts.n1x != sched.n_x || counts.n0y + counts.n1y != sched.n_y)
        throw std::invalid_argument("tomo_rate: counts inconsistent with the schedule");
    double rx = estimate_r(counts.n0x, counts.n1x);
    double ry = estimate_r(counts.n0y, counts.n1y);
    const double s = rx * rx + ry * ry;
    if (s > 1.0) {
        const double f = (1.0 - 1e-12) / std::sqrt(s);
        rx *= f;
        ry *= f;
    }
    const double bound = fiorentino_bound(rx, ry);
    return (static_cast<double>(sched.n_z) * bound - static_cast<double>(sched.t_bits)) /
           static_cast<double>(m);
}

std::vector<CompareRow> compare_sweep(const quantum::BlochVector& source,
                                      std::span<const std::uint64_t> m_grid, std::uint64_t reps,
                                      const Rng& rng, int workers) {
    if (source.norm2() > 1.0 + 1e-12)
        throw std::invalid_argument("compare_sweep: invalid Bloch vector");
    if (reps == 0) throw std::invalid_argument("compare_sweep: reps >= 1");

    const double p1x = 0.5 * (1.0 - source.x);  // control-X error probability
    const double p1y = 0.5 * (1.0 - source.y);
    const int threads = workers > 0 ? workers : omp_get_max_threads();

    std::vector<CompareRow> rows(m_grid.size());
    for (std::size_t gi = 0; gi < m_grid.size(); ++gi) {
        const std::uint64_t m = m_grid[gi];
        const std::uint64_t n_x = protocol::schedule_sizes(m).first;
        const TomoSchedule ts = tomo_schedule(m);
        std::vector<double> up(reps), tomo(reps);

#pragma omp parallel for schedule(static) num_threads(threads)
        for (std::int64_t rep = 0; rep < static_cast<std::int64_t>(reps); ++rep) {
            Rng stream = rng.derive((static_cast<std::uint64_t>(gi) << 32) ^
                                    static_cast<std::uint64_t>(rep));
            const std::uint64_t n1 = binomial_draw(stream, n_x, p1x);
            up[static_cast<std::size_t>(rep)] =
                protocol::certify(m, entropy::CountsVector({n_x - n1, n1}), 1.0).rate;

            const std::uint64_t n1x = binomial_draw(stream, ts.n_x, p1x);
            const std::uint64_t n1y = binomial_draw(stream, ts.n_y, p1y);
            tomo[static_cast<std::size_t>(rep)] =
                tomo_rate(m, TomoCounts{ts.n_x - n1x, n1x, ts.n_y - n1y, n1y});
        }

        auto stats = [&](const std::vector<double>& v) {
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double var = 0.0;
            for (double x : v) var += (x - mean) * (x - mean);
            return std::pair<double, double>(mean, std::sqrt(var / static_cast<double>(v.size())));
        };
        const auto [um, us] = stats(up);
        const auto [tm, tsd] = stats(tomo);
        rows[gi] = CompareRow{m, um, us, tm, tsd};
    }
    return rows;
}

protocol::RateStats tomo_expected_rate_exact(std::uint64_t m, const quantum::BlochVector& source) {
    const TomoSchedule sched = tomo_schedule(m);
    if ((sched.n_x + 1) * (sched.n_y + 1) > 1'000'000)
        throw std::domain_error("tomo_expected_rate_exact: enumeration over budget");
    const double p1x = 0.5 * (1.0 - source.x);
    const double p1y = 0.5 * (1.0 - source.y);

    double mean = 0.0, moment2 = 0.0;
    for (std::uint64_t n1x = 0; n1x <= sched.n_x; ++n1x) {
        const double wx = std::exp(binomial_log_pmf(sched.n_x, n1x, p1x));
        if (wx == 0.0) continue;
        for (std::uint64_t n1y = 0; n1y <= sched.n_y; ++n1y) {
            const double w = wx * std::exp(binomial_log_pmf(sched.n_y, n1y, p1y));
            if (w == 0.0) continue;
            const double r =
                tomo_rate(m, TomoCounts{sched.n_x - n1x, n1x, sched.n_y - n1y, n1y});
            mean += w * r;
            moment2 += w * r * r;
        }
    }
    return protocol::RateStats{mean, std::sqrt(std::max(moment2 - mean * mean, 0.0))};
}

std::string compare_csv(std::span<const CompareRow> rows) {
    std::ostringstream os;
    os << "m,up_mean,up_std,tomo_mean,tomo_std\n";
    os.precision(9);
    for (const auto& r : rows)
        os << r.m << ',' << r.up_mean << ',' << r.up_std << ',' << r.tomo_mean << ','
           << r.tomo_std << '\n';
    return os.str();
}

}  // namespace qcert::tomo
