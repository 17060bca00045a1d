#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qcert/protocol.hpp"
#include "qcert/quantum.hpp"
#include "qcert/rng.hpp"

namespace qcert::tomo {

// Frame convention for this module: the generation basis is computational
// (Z, probabilities (1 +- r_z)/2) and the two control bases are X and Y.
// For the bench qubit source the large Bloch component therefore sits on the
// X axis (r_x ~ 0.9946) and the generation axis is nearly unbiased
// (r_z ~ 0.004).

/// Measurement plan of the tomographic protocol: n_x = n_y = ceil(sqrt(m)/2)
/// control slots per transverse basis, the rest generation.
struct TomoSchedule {
    std::uint64_t m = 0;
    std::uint64_t n_x = 0;  // X-basis control slots
    std::uint64_t n_y = 0;  // Y-basis control slots
    std::uint64_t n_z = 0;  // generation slots, m - 2 ceil(sqrt(m)/2)
    std::uint64_t t_bits = 0;
};

struct TomoCounts {
    std::uint64_t n0x = 0, n1x = 0;
    std::uint64_t n0y = 0, n1y = 0;
};

/// Min-entropy bound from the reconstructed transverse Bloch components:
/// 1 - log2(1 + sqrt(1 - r_x^2 - r_y^2)).
double fiorentino_bound(double r_x, double r_y);

/// Single-control-basis bound 1 - log2(1 + sqrt(1 - r_x^2)); coincides with
/// 1 - H_{1/2}((1 +- r_x)/2) and with fiorentino_bound at r_y = 0.
double up_bound_rx(double r_x);

/// Bayesian point estimate (n_0 - n_1) / (n_0 + n_1 + 2); always in (-1, 1).
double estimate_r(std::uint64_t n_0, std::uint64_t n_1);

/// Seed budget t*(m) = 2 ceil(log2 C(m, 2 ceil(sqrt(m)/2))); m >= 4.
std::uint64_t tomo_seed_length(std::uint64_t m);

TomoSchedule tomo_schedule(std::uint64_t m);

/// [n_z * fiorentino_bound(r^_x, r^_y) - t*(m)] / m.  Estimates landing
/// outside the unit disk (sampling noise) are radially rescaled to norm
/// 1 - 1e-12 before the bound is evaluated.
double tomo_rate(std::uint64_t m, const TomoCounts& counts);

struct CompareRow {
    std::uint64_t m = 0;
    double up_mean = 0.0, up_std = 0.0;
    double tomo_mean = 0.0, tomo_std = 0.0;
};

/// Simulates both protocols on one d=2 source across the m grid; one derived
/// stream per (m, repetition), so the table is reproducible for any worker
/// count.
std::vector<CompareRow> compare_sweep(const quantum::BlochVector& source,
                                      std::span<const std::uint64_t> m_grid, std::uint64_t reps,
                                      const Rng& rng, int workers = 0);

/// Exact mean/std of the tomographic rate under binomial control counts;
/// enumeration requires (n_x + 1) * (n_y + 1) <= 1e6.
protocol::RateStats tomo_expected_rate_exact(std::uint64_t m, const quantum::BlochVector& source);

/// CSV with header `m,up_mean,up_std,tomo_mean,tomo_std`, 9 significant digits.
std::string compare_csv(std::span<const CompareRow> rows);

}  // namespace qcert::tomo
