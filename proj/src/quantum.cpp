#include "qcert/quantum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qcert/rng.hpp"

namespace qcert::quantum {

namespace {

void check_square(const Matrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() < 1)
        throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
}

double hermiticity_defect(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

DensityMatrix::DensityMatrix(Matrix m) : mat_(std::move(m)) {
    check_square(mat_, "DensityMatrix");
    if (hermiticity_defect(mat_) > 1e-12)
        throw std::invalid_argument("DensityMatrix: not Hermitian");
    if (std::abs(mat_.trace().real() - 1.0) > 1e-12 || std::abs(mat_.trace().imag()) > 1e-12)
        throw std::invalid_argument("DensityMatrix: trace != 1");
    if (min_eigenvalue(mat_) < -1e-10)
        throw std::invalid_argument("DensityMatrix: negative eigenvalue");
}

Povm::Povm(std::vector<Matrix> elements) : elements_(std::move(elements)) {
    if (elements_.empty()) throw std::invalid_argument("Povm: no elements");
    const auto rows = elements_[0].rows();
    Matrix sum = Matrix::Zero(rows, rows);
    for (const auto& e : elements_) {
        check_square(e, "Povm");
        if (e.rows() != rows) throw std::invalid_argument("Povm: mixed dimensions");
        if (hermiticity_defect(e) > 1e-10)
            throw std::invalid_argument("Povm: element not Hermitian");
        if (min_eigenvalue(e) < -1e-10)
            throw std::invalid_argument("Povm: element not PSD");
        sum += e;
    }
    if ((sum - Matrix::Identity(rows, rows)).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("Povm: elements do not sum to identity");
}

CqState::CqState(std::vector<CqOutcome> outcomes) : outcomes_(std::move(outcomes)) {
    if (outcomes_.empty()) throw std::invalid_argument("CqState: no outcomes");
    double total = 0.0;
    const int d = outcomes_[0].state.dim();
    for (const auto& o : outcomes_) {
        if (o.prob < -1e-15 || o.prob > 1.0 + 1e-12)
            throw std::invalid_argument("CqState: probability outside [0,1]");
        if (o.state.dim() != d)
            throw std::invalid_argument("CqState: side states of unequal dimension");
        total += o.prob;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("CqState: probabilities do not sum to 1");
}

DensityMatrix CqState::register_marginal() const {
    const auto n = outcomes_.size();
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t z = 0; z < n; ++z)
        m(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(z)) = outcomes_[z].prob;
    return DensityMatrix(m);
}

Povm computational_basis_povm(int d) {
    if (d < 2) throw std::invalid_argument("computational_basis_povm: d >= 2 required");
    std::vector<Matrix> els;
    els.reserve(static_cast<std::size_t>(d));
    for (int z = 0; z < d; ++z) {
        Matrix e = Matrix::Zero(d, d);
        e(z, z) = 1.0;
        els.push_back(std::move(e));
    }
    return Povm(std::move(els));
}

Povm fourier_basis_povm(int d) {
    if (d < 2) throw std::invalid_argument("fourier_basis_povm: d >= 2 required");
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    std::vector<Matrix> els;
    els.reserve(static_cast<std::size_t>(d));
    for (int x = 0; x < d; ++x) {
        Eigen::VectorXcd v(d);
        for (int z = 0; z < d; ++z) {
            const double phase = 2.0 * std::numbers::pi * x * z / d;
            v(z) = std::polar(norm, phase);
        }
        els.push_back(v * v.adjoint());
    }
    return Povm(std::move(els));
}

entropy::ProbVector born_probabilities(const DensityMatrix& rho, const Povm& povm) {
    if (rho.dim() != povm.dim())
        throw std::invalid_argument("born_probabilities: dimension mismatch");
    std::vector<double> p;
    p.reserve(static_cast<std::size_t>(povm.outcomes()));
    for (const auto& e : povm.elements()) {
        const std::complex<double> tr = (e * rho.matrix()).trace();
        if (std::abs(tr.imag()) > 1e-10)
            throw std::runtime_error("born_probabilities: non-real probability");
        p.push_back(std::clamp(tr.real(), 0.0, 1.0));
    }
    double sum = 0.0;
    for (double v : p) sum += v;
    if (sum <= 0.0) throw std::runtime_error("born_probabilities: vanishing distribution");
    for (double& v : p) v /= sum;
    return entropy::ProbVector(std::move(p));
}

Overlap overlap_c(const Povm& a, const Povm& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("overlap_c: dimension mismatch");
    double c = 0.0;
    for (const auto& ma : a.elements()) {
        const Matrix sa = hermitian_sqrt(ma);
        for (const auto& mb : b.elements()) {
            const Matrix prod = sa * hermitian_sqrt(mb);
            Eigen::JacobiSVD<Matrix> svd(prod);
            const double smax = svd.singularValues()(0);
            c = std::max(c, smax * smax);
        }
    }
    return Overlap{c, -std::log2(c)};
}

BlochVector density_to_bloch(const DensityMatrix& rho) {
    if (rho.dim() != 2) throw std::invalid_argument("density_to_bloch: d = 2 only");
    const auto& m = rho.matrix();
    BlochVector r;
    r.x = 2.0 * m(0, 1).real();
    r.y = -2.0 * m(0, 1).imag();
    r.z = (m(0, 0) - m(1, 1)).real();
    return r;
}

DensityMatrix bloch_to_density(const BlochVector& r) {
    if (r.norm2() > 1.0 + 1e-12)
        throw std::invalid_argument("bloch_to_density: |r| > 1");
    Matrix m(2, 2);
    m(0, 0) = 0.5 * (1.0 + r.z);
    m(1, 1) = 0.5 * (1.0 - r.z);
    m(0, 1) = 0.5 * std::complex<double>(r.x, -r.y);
    m(1, 0) = 0.5 * std::complex<double>(r.x, r.y);
    return DensityMatrix(std::move(m));
}

double purity(const DensityMatrix& rho) {
    return (rho.matrix() * rho.matrix()).trace().real();
}

double bloch_y_bound(double r_z, double r_x) {
    const double s = r_z * r_z + r_x * r_x;
    if (s > 1.0 + 1e-12)
        throw std::invalid_argument("bloch_y_bound: r_z^2 + r_x^2 > 1");
    return std::sqrt(std::max(1.0 - s, 0.0));
}

double helstrom_guess(const CqState& state) {
    if (state.size() != 2)
        throw std::invalid_argument("helstrom_guess: binary discrimination only");
    const auto& a = state.outcome(0);
    const auto& b = state.outcome(1);
    const Matrix diff = a.prob * a.state.matrix() - b.prob * b.state.matrix();
    return 0.5 * (1.0 + trace_norm(diff));
}

CqState entangled_example() {
    Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    std::vector<CqOutcome> outs;
    outs.push_back({0.5, DensityMatrix(p0)});
    outs.push_back({0.5, DensityMatrix(p1)});
    return CqState(std::move(outs));
}

Matrix hermitian_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hermitian_sqrt: eigendecomposition failed");
    Eigen::VectorXd vals = es.eigenvalues();
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        if (vals(i) < -1e-10) throw std::invalid_argument("hermitian_sqrt: not PSD");
        vals(i) = std::sqrt(std::max(vals(i), 0.0));  // clamp tiny negatives
    }
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

double trace_norm(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("trace_norm: eigendecomposition failed");
    return es.eigenvalues().cwiseAbs().sum();
}

double min_eigenvalue(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("min_eigenvalue: eigendecomposition failed");
    return es.eigenvalues().minCoeff();
}

DensityMatrix random_density(int d, Rng& rng) {
    Matrix g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            g(i, j) = std::complex<double>(rng.next_gauss(), rng.next_gauss());
    Matrix m = g * g.adjoint();
    m /= m.trace().real();
    m = 0.5 * (m + Matrix(m.adjoint()));  // kill rounding asymmetry
    return DensityMatrix(std::move(m));
}

BlochVector random_bloch(Rng& rng) {
    for (;;) {
        BlochVector r{2.0 * rng.next_double() - 1.0, 2.0 * rng.next_double() - 1.0,
                      2.0 * rng.next_double() - 1.0};
        if (r.norm2() <= 1.0) return r;
    }
}

}  // namespace qcert::quantum
