#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qcert/bits.hpp"
#include "qcert/entropy.hpp"
#include "qcert/rng.hpp"

namespace qcert::protocol {

/// Measurement plan for one run of m slots: n_x = ceil(sqrt(m)) control
/// slots at the (strictly increasing) x_positions, the rest generation.
struct Schedule {
    std::uint64_t m = 0;
    std::uint64_t n_x = 0;
    std::uint64_t n_z = 0;
    std::vector<std::uint64_t> x_positions;
};

/// Outcome of certifying one run.  min_entropy_bound = q - h_half_estimate
/// may be negative; b_sec and rate then go negative too, meaning the run
/// certifies nothing.  Values are reported as-is, never clamped.
struct Certificate {
    std::uint64_t m = 0;
    std::uint64_t n_x = 0;
    double q = 0.0;
    double h_half_estimate = 0.0;
    double min_entropy_bound = 0.0;
    std::uint64_t seed_cost_bits = 0;
    double b_sec = 0.0;  // (m - n_x) * min_entropy_bound - seed_cost_bits
    double rate = 0.0;   // b_sec / m
};

struct ScheduleDraw {
    Schedule schedule;
    std::uint64_t bits_consumed = 0;
};

struct RateStats {
    double mean = 0.0;
    double stddev = 0.0;
};

/// (n_x, n_z) = (ceil(sqrt(m)), m - n_x); m >= 2.
std::pair<std::uint64_t, std::uint64_t> schedule_sizes(std::uint64_t m);

/// Exact binomial coefficient.
mpz_class binomial(std::uint64_t m, std::uint64_t k);

/// Seed budget t(m) = ceil(log2 C(m, ceil(sqrt(m)))) in bits.  Exact big
/// integers up to m = 1e6; above that a log-gamma evaluation with an error
/// interval, falling back to exact arithmetic when the ceiling is ambiguous.
std::uint64_t seed_length(std::uint64_t m);

/// Combinatorial number system: bijection between [0, C(m,k)) and the
/// k-subsets of {0..m-1} in lexicographic order.
std::vector<std::uint64_t> unrank_combination(const mpz_class& index, std::uint64_t m,
                                              std::uint64_t k);
mpz_class rank_combination(std::span<const std::uint64_t> positions, std::uint64_t m,
                           std::uint64_t k);

/// Consumes t(m)-bit blocks from the seed (first bit = most significant),
/// rejection-sampling until a block value falls below C(m, n_x); the
/// accepted value is unranked into the schedule.  Reports the exact number
/// of seed bits consumed so the expansion ledger stays honest.
ScheduleDraw seed_to_schedule(const BitString& seed_bits, std::uint64_t m);

/// The certification step: Bayesian max-entropy estimate from control
/// counts, bound q - H, and the net certified bits after the seed cost.
Certificate certify(std::uint64_t m, const entropy::CountsVector& counts, double q);

/// Closed-form d=2 rate at n_1 control errors; agrees with
/// certify(m, {n_x - n_1, n_1}, 1).rate to machine precision by a second
/// algebraic route.
double single_shot_rate_qubit(std::uint64_t n_1, std::uint64_t m);

/// Pi(n_1) = C(n_x, n_1) p0^{n_x-n_1} p1^{n_1} over n_1 = 0..n_x.
std::vector<double> error_distribution(std::uint64_t n_x, const entropy::ProbVector& p);

/// Mean/stddev of the certified rate when control counts are multinomial.
/// Exact mode enumerates every composition and refuses when the composition
/// count C(n_x + d - 1, d - 1) exceeds 1e6.
RateStats expected_rate_exact(std::uint64_t m, const entropy::ProbVector& p, double q);

/// Monte Carlo flavor: one derived stream per repetition, so results do not
/// depend on the worker count; workers <= 0 means use all threads.
RateStats expected_rate_montecarlo(std::uint64_t m, const entropy::ProbVector& p, double q,
                                   std::uint64_t reps, const Rng& rng, int workers = 0);

/// q - H_{1/2}(p): the m -> infinity rate.
double asymptotic_rate(const entropy::ProbVector& p, double q);

/// Smallest m whose exact expected rate is positive.
std::uint64_t min_m_positive(const entropy::ProbVector& p, double q);

/// Plain-text key-value serialization (one field per line).
std::string certificate_to_text(const Certificate& cert);
Certificate certificate_from_text(const std::string& text);

}  // namespace qcert::protocol
