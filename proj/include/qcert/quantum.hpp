#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qcert/entropy.hpp"

namespace qcert {
class Rng;
}

namespace qcert::quantum {

using Matrix = Eigen::MatrixXcd;

/// d x d Hermitian, unit-trace, positive-semidefinite state.
/// Tolerances: hermiticity/trace 1e-12, smallest eigenvalue >= -1e-10.
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix m);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Matrix& matrix() const { return mat_; }

private:
    Matrix mat_;
};

/// d-outcome measurement: PSD elements summing to the identity (1e-10).
class Povm {
public:
    explicit Povm(std::vector<Matrix> elements);

    int dim() const { return static_cast<int>(elements_[0].rows()); }
    int outcomes() const { return static_cast<int>(elements_.size()); }
    const Matrix& element(int i) const { return elements_[static_cast<std::size_t>(i)]; }
    const std::vector<Matrix>& elements() const { return elements_; }

private:
    std::vector<Matrix> elements_;
};

/// Qubit state in the Pauli frame: rho = (I + r . sigma) / 2, |r| <= 1.
struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm2() const { return x * x + y * y + z * z; }
};

/// Classical register correlated with a quantum side system:
/// a list of (P_z, rho_E^z) with normalized side states.
struct CqOutcome {
    double prob;
    DensityMatrix state;
};

class CqState {
public:
    explicit CqState(std::vector<CqOutcome> outcomes);

    std::size_t size() const { return outcomes_.size(); }
    const CqOutcome& outcome(std::size_t i) const { return outcomes_[i]; }

    /// Classical marginal sum_z P_z |z><z|, as a density matrix.
    DensityMatrix register_marginal() const;

private:
    std::vector<CqOutcome> outcomes_;
};

/// Rank-1 projectors onto the standard basis |z><z|, z = 0..d-1.
Povm computational_basis_povm(int d);

/// Rank-1 projectors onto |x> = d^{-1/2} sum_z exp(2 pi i x z / d) |z>.
/// Mutually unbiased with the computational basis: |<x|z>|^2 = 1/d.
Povm fourier_basis_povm(int d);

/// Born rule p_x = Tr[N_x rho]; clamped to [0,1] and renormalized.
entropy::ProbVector born_probabilities(const DensityMatrix& rho, const Povm& povm);

struct Overlap {
    double c;  // max_{z,x} || sqrt(M_z) sqrt(N_x) ||_inf^2
    double q;  // log2(1/c)
};

/// Measurement incompatibility between two POVMs on the same space.
Overlap overlap_c(const Povm& a, const Povm& b);

BlochVector density_to_bloch(const DensityMatrix& rho);  // d = 2 only
DensityMatrix bloch_to_density(const BlochVector& r);

/// Tr[rho^2], in [1/d, 1].
double purity(const DensityMatrix& rho);

/// Largest |r_y| compatible with a physical qubit given (r_z, r_x).
double bloch_y_bound(double r_z, double r_x);

/// Optimal binary-discrimination guessing probability
/// 1/2 (1 + || P_0 rho_0 - P_1 rho_1 ||_1); equals 2^{-Hmin(Z|E)}.
double helstrom_guess(const CqState& state);

/// cq-state of measuring half of (|00> + |11>)/sqrt(2) in the standard
/// basis: outcomes (1/2, |0><0|), (1/2, |1><1|).
CqState entangled_example();

// Shared linear-algebra helpers (eigendecomposition based; d <= 16 scale).
Matrix hermitian_sqrt(const Matrix& m);
double trace_norm(const Matrix& m);
double min_eigenvalue(const Matrix& m);

// Random states for property tests and sweeps.
DensityMatrix random_density(int d, Rng& rng);   // Ginibre ensemble
BlochVector random_bloch(Rng& rng);              // uniform in the unit ball

}  // namespace qcert::quantum
