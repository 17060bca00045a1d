#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qcert::entropy {

/// Discrete distribution over d >= 1 outcomes.  Entries in [0,1], sum within
/// 1e-12 of one.
class ProbVector {
public:
    explicit ProbVector(std::vector<double> p);

    std::size_t dim() const { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    std::span<const double> values() const { return p_; }

private:
    std::vector<double> p_;
};

/// Outcome tallies over d >= 2 bins.
class CountsVector {
public:
    explicit CountsVector(std::vector<std::uint64_t> n);

    std::size_t dim() const { return n_.size(); }
    std::uint64_t operator[](std::size_t i) const { return n_[i]; }
    std::uint64_t total() const { return total_; }
    std::span<const std::uint64_t> values() const { return n_; }

private:
    std::vector<std::uint64_t> n_;
    std::uint64_t total_ = 0;
};

/// Renyi entropy of order alpha (alpha > 0, alpha != 1), in bits.
double renyi(double alpha, const ProbVector& p);

/// H_{1/2}(p) = 2 log2 sum_x sqrt(p_x); equals renyi(1/2, p).
double max_entropy_half(const ProbVector& p);

/// H_inf(p) = -log2 max_x p_x.
double classical_min_entropy(const ProbVector& p);

/// Bayesian estimate of H_{1/2} from counts, uniform prior; valid for a
/// total of zero (pure prior).  Evaluated entirely in log-gamma domain.
double bayesian_h_half(const CountsVector& counts);

/// Plug-in estimate 2 log2 sum_x sqrt(n_x / n); requires at least one count.
double frequentist_h_half(const CountsVector& counts);

/// Independent numeric route to H_{1/2}: minimizes sum_x p_x / sigma_x over
/// the probability simplex (the dual program behind the max-entropy) by
/// pairwise coordinate descent and returns log2 of the minimum.  d <= 8.
double min_entropy_pure_oracle(const ProbVector& p);

}  // namespace qcert::entropy
