#include "qcert/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qcert::entropy {

namespace {
constexpr double kLn2 = 0.6931471805599453094172321;
}

ProbVector::ProbVector(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) throw std::invalid_argument("ProbVector: empty");
    double sum = 0.0;
    for (double v : p_) {
        if (!(v >= 0.0 && v <= 1.0 + 1e-12))
            throw std::invalid_argument("ProbVector: entry outside [0,1]");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("ProbVector: entries do not sum to 1");
}

CountsVector::CountsVector(std::vector<std::uint64_t> n) : n_(std::move(n)) {
    if (n_.size() < 2) throw std::invalid_argument("CountsVector: need at least 2 bins");
    for (std::uint64_t v : n_) total_ += v;
}

double renyi(double alpha, const ProbVector& p) {
    if (!(alpha > 0.0) || alpha == 1.0)
        throw std::domain_error("renyi: order must be positive and != 1");
    double s = 0.0;
    for (double v : p.values())
        if (v > 0.0) s += std::pow(v, alpha);
    return std::log2(s) / (1.0 - alpha);
}

double max_entropy_half(const ProbVector& p) {
    double s = 0.0;
    for (double v : p.values()) s += std::sqrt(v);
    return 2.0 * std::log2(s);
}

double classical_min_entropy(const ProbVector& p) {
    const double pmax = *std::max_element(p.values().begin(), p.values().end());
    return -std::log2(pmax);
}

double bayesian_h_half(const CountsVector& counts) {
    const double n = static_cast<double>(counts.total());
    const double d = static_cast<double>(counts.dim());
    // Gamma(n+d)/Gamma(n+d+1/2) * sum_x Gamma(n_x+3/2)/Gamma(n_x+1),
    // as exp of log-gamma differences so that n ~ 1e8 stays finite.
    double sum = 0.0;
    for (std::uint64_t nx : counts.values()) {
        const double x = static_cast<double>(nx);
        sum += std::exp(std::lgamma(x + 1.5) - std::lgamma(x + 1.0));
    }
    const double logratio = std::lgamma(n + d) - std::lgamma(n + d + 0.5);
    return 2.0 * (logratio + std::log(sum)) / kLn2;
}

double frequentist_h_half(const CountsVector& counts) {
    if (counts.total() == 0)
        throw std::domain_error("frequentist_h_half: undefined for zero total");
    const double n = static_cast<double>(counts.total());
    double s = 0.0;
    for (std::uint64_t nx : counts.values())
        s += std::sqrt(static_cast<double>(nx) / n);
    return 2.0 * std::log2(s);
}

double min_entropy_pure_oracle(const ProbVector& p) {
    if (p.dim() > 8)
        throw std::invalid_argument("min_entropy_pure_oracle: d <= 8 only");

    // Support restriction: zero-probability coordinates get zero weight.
    std::vector<double> ps;
    for (double v : p.values())
        if (v > 0.0) ps.push_back(v);
    const std::size_t d = ps.size();
    if (d == 1) return 0.0;

    auto objective = [&](const std::vector<double>& sigma) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += ps[i] / sigma[i];
        return s;
    };

    std::vector<double> sigma(d, 1.0 / static_cast<double>(d));
    double obj = objective(sigma);
    for (int sweep = 0; sweep < 1000; ++sweep) {
        // Exact pairwise update: mass s over (i,j) splits as sqrt(p_i) : sqrt(p_j).
        for (std::size_t i = 0; i + 1 < d; ++i) {
            for (std::size_t j = i + 1; j < d; ++j) {
                const double s = sigma[i] + sigma[j];
                const double ri = std::sqrt(ps[i]), rj = std::sqrt(ps[j]);
                sigma[i] = s * ri / (ri + rj);
                sigma[j] = s - sigma[i];
            }
        }
        const double next = objective(sigma);
        if (std::abs(obj - next) < 1e-10) {
            obj = next;
            break;
        }
        obj = next;
    }

    // Closed-form restart candidate sigma_x proportional to sqrt(p_x); keep
    // whichever objective is lower.
    {
        double norm = 0.0;
        for (double v : ps) norm += std::sqrt(v);
        std::vector<double> cand(d);
        for (std::size_t i = 0; i < d; ++i) cand[i] = std::sqrt(ps[i]) / norm;
        obj = std::min(obj, objective(cand));
    }
    return std::log2(obj);
}

}  // namespace qcert::entropy
