#include "nlsred/spectral_basis.hpp"

#include <cmath>
#include <mutex>
#include <string>

#include <fftw3.h>

namespace nlsred {

namespace {

// FFTW planning is not thread-safe; execution on new arrays is.
std::mutex g_plan_mutex;

// Laguerre polynomials L_0..L_n at s (no envelope).
void laguerre_pair(int n, double s, double& ln, double& lnm1) {
  double prev = 1.0, cur = 1.0 - s;
  if (n == 0) {
    ln = 1.0;
    lnm1 = 0.0;
    return;
  }
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 - s) * cur - k * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  ln = cur;
  lnm1 = prev;
}

// Laguerre functions l_k(s) = L_k(s) e^{-s/2}, k = 0..count-1.
Eigen::VectorXd laguerre_functions(int count, double s) {
  Eigen::VectorXd out(count);
  const double envelope = std::exp(-0.5 * s);
  if (count > 0) out[0] = envelope;
  if (count > 1) out[1] = (1.0 - s) * envelope;
  for (int k = 1; k + 1 < count; ++k)
    out[k + 1] = ((2.0 * k + 1.0 - s) * out[k] - k * out[k - 1]) / (k + 1.0);
  return out;
}

// Gauss-Laguerre nodes s_q and envelope-scaled weights W_q e^{s_q}.
void gauss_laguerre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& scaled_weights) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    jacobi(i, i) = 2.0 * i + 1.0;
    if (i + 1 < n) jacobi(i, i + 1) = jacobi(i + 1, i) = i + 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
  nodes = solver.eigenvalues();
  scaled_weights.resize(n);
  for (int q = 0; q < n; ++q) {
    double s = nodes[q];
    for (int it = 0; it < 8; ++it) {
      double ln, lnm1;
      laguerre_pair(n, s, ln, lnm1);
      const double deriv = n * (ln - lnm1) / s;
      const double step = ln / deriv;
      s -= step;
      if (std::abs(step) <= 1e-16 * s) break;
    }
    nodes[q] = s;
    // Christoffel numbers, a sum of squares and better conditioned than the
    // derivative formula at the outer nodes.
    scaled_weights[q] = 1.0 / laguerre_functions(n, s).squaredNorm();
  }
}

}  // namespace

TransverseBasis::TransverseBasis(int mode_count, int quad_size) : mode_count_(mode_count) {
  if (mode_count < 1) throw Error(ErrorKind::InvalidArgument, "transverse mode count must be >= 1");
  if (quad_size < 2 * mode_count)
    throw Error(ErrorKind::Underresolved,
                "quadrature underresolved: quad_size " + std::to_string(quad_size) +
                    " < 2 * mode_count " + std::to_string(2 * mode_count));

  Eigen::VectorXd s, scaled;
  gauss_laguerre(quad_size, s, scaled);

  eigenvalues_.resize(mode_count);
  gaps_.resize(mode_count);
  for (int k = 0; k < mode_count; ++k) {
    eigenvalues_[k] = 4.0 * k + 2.0;
    gaps_[k] = 4.0 * k;
  }

  nodes_ = s.array().sqrt();
  // ∫_{R²} f dy = π ∫_0^∞ f ds for radial f.
  weights_ = kPi * scaled;
  modes_.resize(quad_size, mode_count);
  const double norm = 1.0 / std::sqrt(kPi);
  for (int q = 0; q < quad_size; ++q) modes_.row(q) = norm * laguerre_functions(mode_count, s[q]);
  projector_ = (weights_.asDiagonal() * modes_).transpose();

  const double defect = orthonormality_defect();
  if (!(defect < 1e-12))
    throw Error(ErrorKind::Underresolved,
                "quadrature underresolved: orthonormality defect " + std::to_string(defect));
}

double TransverseBasis::orthonormality_defect() const {
  const Eigen::MatrixXd gram = projector_ * modes_;
  return (gram - Eigen::MatrixXd::Identity(mode_count_, mode_count_)).cwiseAbs().maxCoeff();
}

Eigen::VectorXd TransverseBasis::evaluate(double r) const {
  return laguerre_functions(mode_count_, r * r) / std::sqrt(kPi);
}

std::shared_ptr<const TransverseBasis> build_transverse_basis(int mode_count, int quad_size) {
  return std::make_shared<const TransverseBasis>(mode_count, quad_size);
}

AxialGrid::AxialGrid(double half_length, int point_count)
    : half_length_(half_length), point_count_(point_count) {
  if (!(half_length > 0.0)) throw Error(ErrorKind::InvalidArgument, "axial half length must be positive");
  if (point_count < 8 || point_count % 2 != 0)
    throw Error(ErrorKind::InvalidArgument,
                "axial point count must be even and >= 8, got " + std::to_string(point_count));
  spacing_ = 2.0 * half_length / point_count;
  nodes_.resize(point_count);
  wavenumbers_.resize(point_count);
  alternating_.resize(point_count);
  for (int j = 0; j < point_count; ++j) {
    nodes_[j] = -half_length + j * spacing_;
    const int signed_index = j < point_count / 2 ? j : j - point_count;
    wavenumbers_[j] = kPi * signed_index / half_length;
    alternating_[j] = (j % 2 == 0) ? 1.0 : -1.0;
  }

  std::lock_guard lock(g_plan_mutex);
  std::vector<cdouble> scratch(point_count);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  forward_plan_ = fftw_plan_dft_1d(point_count, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  inverse_plan_ = fftw_plan_dft_1d(point_count, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

AxialGrid::~AxialGrid() {
  std::lock_guard lock(g_plan_mutex);
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void AxialGrid::forward(cdouble* data, int rows) const {
  const double scale = std::sqrt(spacing_ / point_count_);
  for (int r = 0; r < rows; ++r) {
    cdouble* line = data + static_cast<std::ptrdiff_t>(r) * point_count_;
    auto* buf = reinterpret_cast<fftw_complex*>(line);
    fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), buf, buf);
    for (int n = 0; n < point_count_; ++n) line[n] *= scale * alternating_[n];
  }
}

void AxialGrid::inverse(cdouble* data, int rows) const {
  const double scale = 1.0 / std::sqrt(2.0 * half_length_);
  for (int r = 0; r < rows; ++r) {
    cdouble* line = data + static_cast<std::ptrdiff_t>(r) * point_count_;
    for (int n = 0; n < point_count_; ++n) line[n] *= scale * alternating_[n];
    auto* buf = reinterpret_cast<fftw_complex*>(line);
    fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), buf, buf);
  }
}

Eigen::VectorXcd AxialGrid::forward(const Eigen::VectorXcd& values) const {
  if (values.size() != point_count_) throw Error(ErrorKind::ShapeMismatch, "axial line length mismatch");
  Eigen::VectorXcd out = values;
  forward(out.data(), 1);
  return out;
}

Eigen::VectorXcd AxialGrid::inverse(const Eigen::VectorXcd& coeffs) const {
  if (coeffs.size() != point_count_) throw Error(ErrorKind::ShapeMismatch, "axial line length mismatch");
  Eigen::VectorXcd out = coeffs;
  inverse(out.data(), 1);
  return out;
}

std::shared_ptr<const AxialGrid> build_axial_grid(double half_length, int point_count) {
  return std::make_shared<const AxialGrid>(half_length, point_count);
}

}  // namespace nlsred
