#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "doctest.h"
#include "nlsred/fields.hpp"
#include "nlsred/spectral_basis.hpp"

using namespace nlsred;

namespace {

// Radial -Δ + r² on a cell-centred finite-volume grid, symmetrised with the
// r-weights. Independent of the Laguerre construction.
Eigen::VectorXd radial_fd_eigenvalues(double h, double radius) {
  const int m = static_cast<int>(radius / h);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const double r = (i + 0.5) * h;
    const double r_minus = i * h;
    const double r_plus = (i + 1) * h;
    a(i, i) = (r_minus + r_plus) / (r * h * h) + r * r;
    if (i + 1 < m) {
      const double off = -r_plus / (h * h) / std::sqrt(r * (r + h));
      a(i, i + 1) = a(i + 1, i) = off;
    }
  }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST_CASE("transverse eigenvalues and ground mode") {
  auto one = build_transverse_basis(1, 2);
  CHECK(one->eigenvalues()[0] == 2.0);
  CHECK(one->evaluate(0.0)[0] == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-15));

  auto basis = build_transverse_basis(6, 12);
  for (int k = 1; k < 6; ++k) {
    CHECK(basis->eigenvalues()[k] > basis->eigenvalues()[k - 1]);
    CHECK(basis->eigenvalues()[k] - 2.0 >= 4.0);
  }
  for (int q = 0; q < basis->quad_size(); ++q) {
    const double r = basis->nodes()[q];
    CHECK(std::abs(basis->mode_values()(q, 0) - std::exp(-0.5 * r * r) / std::sqrt(kPi)) < 1e-12);
  }
}

TEST_CASE("radial eigenvalues agree with a finite-difference oracle") {
  const Eigen::VectorXd fd = radial_fd_eigenvalues(0.01, 8.0);
  auto basis = build_transverse_basis(2, 4);
  CHECK(std::abs(fd[0] - basis->eigenvalues()[0]) < 1e-3);
  CHECK(std::abs(fd[1] - basis->eigenvalues()[1]) < 1e-3);
  CHECK(basis->eigenvalues()[1] == 6.0);
}

TEST_CASE("discrete orthonormality") {
  for (int k : {1, 4, 12, 20}) {
    auto basis = build_transverse_basis(k, 2 * k);
    CHECK(basis->orthonormality_defect() < 1e-12);
  }
}

TEST_CASE("underresolved quadrature is rejected") {
  CHECK_THROWS_AS(build_transverse_basis(8, 15), Error);
  try {
    build_transverse_basis(8, 10);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Underresolved);
    CHECK(std::string(e.what()).find("quadrature underresolved") != std::string::npos);
  }
}

// The e^{-s} rule integrates the bilinear products exactly; quartic products
// carry an e^{-2s} envelope and converge geometrically in quad_size. The
// default discretisation (16 modes, 32 nodes) is well inside 1e-9.
TEST_CASE("quartic products match adaptive radial integration") {
  boost::math::quadrature::exp_sinh<double> integrator;
  for (auto [modes, quad] : {std::pair{16, 32}, std::pair{8, 32}, std::pair{20, 40}, std::pair{24, 48}}) {
    auto basis = build_transverse_basis(modes, quad);
    const auto& phi = basis->mode_values();
    double worst = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = a; b < 4; ++b)
        for (int c = b; c < 4; ++c)
          for (int d = c; d < 4; ++d) {
            double discrete = 0.0;
            for (int q = 0; q < basis->quad_size(); ++q)
              discrete += basis->weights()[q] * phi(q, a) * phi(q, b) * phi(q, c) * phi(q, d);
            auto integrand = [&](double r) {
              const Eigen::VectorXd v = basis->evaluate(r);
              return 2.0 * kPi * r * v[a] * v[b] * v[c] * v[d];
            };
            const double reference = integrator.integrate(integrand, 1e-14);
            worst = std::max(worst, std::abs(discrete - reference));
          }
    INFO("modes=" << modes << " quad=" << quad << " worst=" << worst);
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("axial grid layout") {
  auto grid = build_axial_grid(16.0, 256);
  CHECK(grid->spacing() == 0.125);
  CHECK(grid->wavenumbers().cwiseAbs().maxCoeff() == doctest::Approx(kPi / 0.125).epsilon(1e-15));
  CHECK(build_axial_grid(1.0, 8)->nodes()[0] == -1.0);
  CHECK_THROWS_AS(build_axial_grid(1.0, 9), Error);
  CHECK_THROWS_AS(build_axial_grid(1.0, 6), Error);
  CHECK_THROWS_AS(build_axial_grid(0.0, 16), Error);
}

TEST_CASE("axial transforms: round trip, Parseval, derivative") {
  auto grid = build_axial_grid(5.0, 64);
  Rng rng(7);
  Eigen::VectorXcd values(64);
  for (auto& v : values) v = {rng.normal(), rng.normal()};
  const Eigen::VectorXcd coeffs = grid->forward(values);
  CHECK((grid->inverse(coeffs) - values).norm() / values.norm() < 1e-12);
  const double grid_norm = grid->spacing() * values.squaredNorm();
  CHECK(std::abs(coeffs.squaredNorm() - grid_norm) / grid_norm < 1e-12);

  const double xi1 = grid->wavenumbers()[1];
  Eigen::VectorXcd wave(64);
  for (int j = 0; j < 64; ++j) wave[j] = std::polar(1.0, xi1 * grid->nodes()[j]);
  const Eigen::VectorXcd dwave = derivative(Field1D::from_values(grid, wave)).values();
  CHECK((dwave - cdouble(0.0, xi1) * wave).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("3D transforms") {
  auto basis = build_transverse_basis(5, 10);
  auto grid = build_axial_grid(4.0, 32);

  SpectralField3D zero(basis, grid);
  CHECK(to_physical(zero).cwiseAbs().maxCoeff() == 0.0);

  SpectralField3D single(basis, grid);
  single.coeffs()(0, 0) = 1.0;
  const CMatrix values = to_physical(single);
  const double axial = 1.0 / std::sqrt(2.0 * grid->half_length());
  for (int q = 0; q < basis->quad_size(); ++q)
    for (int j = 0; j < grid->point_count(); ++j)
      CHECK(std::abs(values(q, j) - basis->mode_values()(q, 0) * axial) < 1e-14);

  Rng rng(11);
  SpectralField3D random(basis, grid);
  for (int k = 0; k < 5; ++k)
    for (int n = 0; n < 32; ++n) random.coeffs()(k, n) = {rng.normal(), rng.normal()};
  const SpectralField3D back = to_spectral(basis, grid, to_physical(random));
  CHECK((back.coeffs() - random.coeffs()).norm() / random.coeffs().norm() < 1e-11);

  CHECK_THROWS_AS(to_spectral(basis, grid, CMatrix::Zero(3, 32)), Error);
}
