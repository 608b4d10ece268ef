#include "dwpt/linalg.hpp"

#include <cmath>
#include <complex>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/IterativeSolvers>

#include "dwpt/error.hpp"

namespace dwpt {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                       std::span<const double> sup, std::span<double> rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n);
  double beta = diag[0];
  if (beta == 0.0) fail(ErrorCode::internal, "tridiagonal solve: zero pivot");
  rhs[0] /= beta;
  for (std::size_t i = 1; i < n; ++i) {
    c[i - 1] = sup[i - 1] / beta;
    beta = diag[i] - sub[i] * c[i - 1];
    if (beta == 0.0) fail(ErrorCode::internal, "tridiagonal solve: zero pivot");
    rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / beta;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

void solve_cyclic_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                              std::span<const double> sup, std::span<double> rhs) {
  const std::size_t n = diag.size();
  const double alpha = sup[n - 1];  // A(n-1, 0)
  const double beta = sub[0];       // A(0, n-1)
  const double gamma = -diag[0];
  std::vector<double> d(diag.begin(), diag.end());
  d[0] -= gamma;
  d[n - 1] -= alpha * beta / gamma;

  std::vector<double> x(rhs.begin(), rhs.end());
  solve_tridiagonal(sub, d, sup, x);
  std::vector<double> z(n, 0.0);
  z[0] = gamma;
  z[n - 1] = alpha;
  solve_tridiagonal(sub, d, sup, z);

  const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = x[i] - fact * z[i];
}

namespace {

// Off-diagonal stencil entries of -Delta_h, with their (row, col) pattern.
template <class Emit>
void for_each_laplacian_entry(const Grid& g, Emit&& emit) {
  const std::size_t n = g.n();
  const double ih2 = 1.0 / (g.h() * g.h());
  switch (g.kind()) {
    case GridKind::interval:
      for (std::size_t i = 1; i + 1 < n; ++i) {
        emit(i, i, 2.0 * ih2);
        if (i > 1) emit(i, i - 1, -ih2);
        if (i + 2 < n) emit(i, i + 1, -ih2);
      }
      break;
    case GridKind::circle:
      for (std::size_t i = 0; i < n; ++i) {
        emit(i, i, 2.0 * ih2);
        emit(i, i == 0 ? n - 1 : i - 1, -ih2);
        emit(i, i + 1 == n ? 0 : i + 1, -ih2);
      }
      break;
    case GridKind::torus: {
      const std::size_t n2 = g.n2();
      const double jh2 = 1.0 / (g.h2() * g.h2());
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t il = (i == 0 ? n - 1 : i - 1), ir = (i + 1 == n ? 0 : i + 1);
        for (std::size_t j = 0; j < n2; ++j) {
          const std::size_t k = i * n2 + j;
          const std::size_t jl = j == 0 ? n2 - 1 : j - 1, jr = j + 1 == n2 ? 0 : j + 1;
          emit(k, k, 2.0 * ih2 + 2.0 * jh2);
          emit(k, il * n2 + j, -ih2);
          emit(k, ir * n2 + j, -ih2);
          emit(k, i * n2 + jl, -jh2);
          emit(k, i * n2 + jr, -jh2);
        }
      }
      break;
    }
  }
}

}  // namespace

struct ImplicitDiffusion::Impl {
  Grid grid;
  double tau;
  std::vector<double> sub, diag, sup;  // 1-D, and the off-diagonals along the torus fiber
  // Torus: the operator separates, so each Fourier mode in y is a cyclic
  // tridiagonal system along the fiber with its own diagonal.
  std::vector<std::vector<double>> mode_diag;
  mutable Eigen::FFT<double> fft;

  Impl(const Grid& g, double t) : grid(g), tau(t) {}
};

ImplicitDiffusion::ImplicitDiffusion(const Grid& g, double tau) : impl_(std::make_unique<Impl>(g, tau)) {
  if (!(tau > 0.0)) fail(ErrorCode::invalid_argument, "implicit diffusion needs tau > 0");
  const std::size_t n = g.n();
  const double r = tau / (g.h() * g.h());
  switch (g.kind()) {
    case GridKind::interval:
      impl_->sub.assign(n, -r);
      impl_->sup.assign(n, -r);
      impl_->diag.assign(n, 1.0 + 2.0 * r);
      impl_->diag.front() = impl_->diag.back() = 1.0;
      impl_->sup.front() = 0.0;
      impl_->sub.back() = 0.0;
      break;
    case GridKind::circle:
      impl_->sub.assign(n, -r);
      impl_->sup.assign(n, -r);
      impl_->diag.assign(n, 1.0 + 2.0 * r);
      break;
    case GridKind::torus: {
      const std::size_t n2 = g.n2();
      const double r2 = tau / (g.h2() * g.h2());
      impl_->sub.assign(n, -r);
      impl_->sup.assign(n, -r);
      impl_->mode_diag.resize(n2);
      for (std::size_t k = 0; k < n2; ++k) {
        const double lambda = 2.0 * r2 * (1.0 - std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(n2)));
        impl_->mode_diag[k].assign(n, 1.0 + 2.0 * r + lambda);
      }
      break;
    }
  }
}

ImplicitDiffusion::~ImplicitDiffusion() = default;
ImplicitDiffusion::ImplicitDiffusion(ImplicitDiffusion&&) noexcept = default;
ImplicitDiffusion& ImplicitDiffusion::operator=(ImplicitDiffusion&&) noexcept = default;

void ImplicitDiffusion::solve(std::span<double> rhs) const {
  switch (impl_->grid.kind()) {
    case GridKind::interval:
      solve_tridiagonal(impl_->sub, impl_->diag, impl_->sup, rhs);
      break;
    case GridKind::circle:
      solve_cyclic_tridiagonal(impl_->sub, impl_->diag, impl_->sup, rhs);
      break;
    case GridKind::torus: {
      const std::size_t n = impl_->grid.n(), n2 = impl_->grid.n2();
      std::vector<std::vector<std::complex<double>>> spectra(n);
      std::vector<double> row(n2);
      for (std::size_t i = 0; i < n; ++i) {
        std::copy_n(rhs.begin() + static_cast<std::ptrdiff_t>(i * n2), n2, row.begin());
        impl_->fft.fwd(spectra[i], row);
      }
      std::vector<double> re(n), im(n);
      for (std::size_t k = 0; k < n2; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
          re[i] = spectra[i][k].real();
          im[i] = spectra[i][k].imag();
        }
        solve_cyclic_tridiagonal(impl_->sub, impl_->mode_diag[k], impl_->sup, re);
        solve_cyclic_tridiagonal(impl_->sub, impl_->mode_diag[k], impl_->sup, im);
        for (std::size_t i = 0; i < n; ++i) spectra[i][k] = {re[i], im[i]};
      }
      for (std::size_t i = 0; i < n; ++i) {
        impl_->fft.inv(row, spectra[i]);
        std::copy(row.begin(), row.end(), rhs.begin() + static_cast<std::ptrdiff_t>(i * n2));
      }
      break;
    }
  }
}

std::vector<double> solve_jacobian(const Field& u, const Potential& p, std::span<const double> rhs,
                                   const std::vector<std::vector<double>>& border,
                                   LinearSolveInfo& info, double iterative_tol, int max_iterations) {
  const Grid& g = u.grid;
  const std::size_t n = g.size();
  const std::size_t m = border.size();
  const double eps = u.epsilon, ieps = 1.0 / eps;

  std::vector<Triplet> trips;
  trips.reserve(5 * n + 2 * m * n);
  for_each_laplacian_entry(g, [&](std::size_t i, std::size_t j, double v) {
    trips.emplace_back(static_cast<int>(i), static_cast<int>(j), eps * v);
  });
  for (std::size_t k = 0; k < n; ++k) {
    const bool boundary = g.kind() == GridKind::interval && (k == 0 || k + 1 == n);
    trips.emplace_back(static_cast<int>(k), static_cast<int>(k), boundary ? 1.0 : ieps * p.d2(u.values[k]));
  }
  for (std::size_t b = 0; b < m; ++b) {
    const int col = static_cast<int>(n + b);
    for (std::size_t k = 0; k < n; ++k) {
      const double v = border[b][k];
      if (v == 0.0) continue;
      trips.emplace_back(static_cast<int>(k), col, v);
      trips.emplace_back(col, static_cast<int>(k), v);
    }
  }
  const int dim = static_cast<int>(n + m);
  SpMat a(dim, dim);
  a.setFromTriplets(trips.begin(), trips.end());
  a.makeCompressed();

  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
  for (std::size_t k = 0; k < n; ++k) b[static_cast<int>(k)] = rhs[k];

  Eigen::VectorXd x;
  if (g.kind() == GridKind::torus) {
    Eigen::MINRES<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> solver;
    solver.setTolerance(iterative_tol);
    solver.setMaxIterations(max_iterations);
    solver.compute(a);
    x = solver.solve(b);
    info.iterations = static_cast<int>(solver.iterations());
    info.ok = solver.info() == Eigen::Success;
    if (!info.ok) info.message = "MINRES did not reach the requested tolerance";
  } else {
    Eigen::SparseLU<SpMat> solver;
    solver.compute(a);
    if (solver.info() != Eigen::Success) {
      info.ok = false;
      info.message = "sparse LU factorisation failed: " + solver.lastErrorMessage();
      return {};
    }
    x = solver.solve(b);
    info.iterations = 1;
    info.ok = solver.info() == Eigen::Success;
  }
  const double bn = b.norm();
  info.relative_residual = bn > 0.0 ? (a * x - b).norm() / bn : (a * x - b).norm();
  if (!x.allFinite()) {
    info.ok = false;
    info.message = "non-finite linear solve";
  }
  return {x.data(), x.data() + n};
}

}  // namespace dwpt
