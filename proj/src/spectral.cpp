#include "graphssl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "graphssl/error.hpp"

namespace graphssl {

namespace {

Spectrum dense_eigendecompose(const Laplacian& laplacian, Index k) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(laplacian.dense());
  if (solver.info() != Eigen::Success) throw NumericalError("dense symmetric eigensolver failed");
  Matrix vectors = solver.eigenvectors().leftCols(k);
  apply_sign_convention(vectors);
  return Spectrum(solver.eigenvalues().head(k), std::move(vectors));
}

// Orthogonalizes the columns of `block` against `basis` and each other (two passes of
// classical Gram-Schmidt). Columns that collapse are replaced by fresh random directions.
Matrix orthonormal_extension(const Matrix& basis, Matrix block, Rng& rng, double scale) {
  const Index n = block.rows();
  for (Index c = 0; c < block.cols(); ++c) {
    for (int attempt = 0;; ++attempt) {
      Eigen::Ref<Vector> col = block.col(c);
      const double before = col.norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (basis.cols() > 0) col -= basis * (basis.transpose() * col);
        if (c > 0) col -= block.leftCols(c) * (block.leftCols(c).transpose() * col);
      }
      const double after = col.norm();
      if (after > 1e-10 * std::max(before, scale) && after > 0.0) {
        col /= after;
        break;
      }
      if (attempt > 8) throw NumericalError("Lanczos basis extension failed to find a new direction");
      col = standard_normal(n, rng);
    }
  }
  return block;
}

Spectrum lanczos_eigendecompose(const Laplacian& laplacian, Index k, const EigenOptions& options) {
  const Index n = laplacian.size();
  const SparseMatrix& a = laplacian.matrix();
  const Index p = std::clamp<Index>(options.block_size, 1, n);
  // Gershgorin bound on the spectral radius.
  const double norm_bound = 2.0 * laplacian.degree().maxCoeff();
  const double scale = std::max(1.0, norm_bound);

  Rng rng(options.seed);
  Matrix basis(n, 0);
  Matrix image(n, 0);  // L * basis
  Matrix block = orthonormal_extension(basis, Matrix::NullaryExpr(n, p, [&] {
                                         return std::normal_distribution<double>()(rng);
                                       }),
                                       rng, scale);

  Index check_at = std::min(n, std::max<Index>(2 * k + 32, 4 * p));
  double worst_residual = 0.0;
  while (true) {
    const Index cols = std::min<Index>(block.cols(), n - basis.cols());
    block.conservativeResize(Eigen::NoChange, cols);
    const Matrix block_image = a * block;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + cols);
    basis.rightCols(cols) = block;
    image.conservativeResize(Eigen::NoChange, image.cols() + cols);
    image.rightCols(cols) = block_image;

    const bool full = basis.cols() >= n;
    if (basis.cols() >= check_at || full) {
      // Rayleigh-Ritz on the whole Krylov basis with explicit residuals.
      Matrix projected = basis.transpose() * image;
      projected = 0.5 * (projected + projected.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Matrix> ritz(projected);
      if (ritz.info() != Eigen::Success) throw NumericalError("Lanczos projected eigensolve failed");
      const Matrix y = ritz.eigenvectors().leftCols(k);
      const Vector theta = ritz.eigenvalues().head(k);
      Matrix vectors = basis * y;
      const Matrix residual = image * y - vectors * theta.asDiagonal();
      worst_residual = 0.0;
      bool converged = true;
      for (Index i = 0; i < k; ++i) {
        const double r = residual.col(i).norm();
        worst_residual = std::max(worst_residual, r / std::max(1.0, std::abs(theta[i])));
        if (r > options.tolerance * scale) converged = false;
      }
      if (converged || full) {
        if (!converged) {
          std::ostringstream msg;
          msg << "Lanczos did not converge: worst relative residual " << worst_residual;
          throw NumericalError(msg.str());
        }
        apply_sign_convention(vectors);
        return Spectrum(theta, std::move(vectors));
      }
      check_at = std::min(n, 2 * basis.cols());
    }
    block = orthonormal_extension(basis, block_image.leftCols(std::min(cols, n - basis.cols())), rng, scale);
  }
}

}  // namespace

Spectrum::Spectrum(Vector eigenvalues, Matrix eigenvectors)
    : eigenvalues_(std::move(eigenvalues)), eigenvectors_(std::move(eigenvectors)) {
  if (eigenvalues_.size() != eigenvectors_.cols()) {
    throw InvalidArgument("eigenvalue count does not match eigenvector columns");
  }
  for (Index i = 1; i < eigenvalues_.size(); ++i) {
    if (eigenvalues_[i] < eigenvalues_[i - 1]) throw InvalidArgument("eigenvalues must be ascending");
  }
}

Index default_truncation(Index n) { return std::min<Index>(n, 256); }

void apply_sign_convention(Matrix& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index r = 0; r < vectors.rows(); ++r) {
      const double v = std::abs(vectors(r, c));
      if (v > best_abs) {
        best_abs = v;
        best = r;
      }
    }
    if (vectors(best, c) < 0.0) vectors.col(c) *= -1.0;
  }
}

Spectrum eigendecompose(const Laplacian& laplacian, Index k, const EigenOptions& options) {
  const Index n = laplacian.size();
  if (k < 1 || k > n) {
    throw InvalidArgument("requested " + std::to_string(k) + " eigenpairs of a " + std::to_string(n) +
                          "-node Laplacian");
  }
  bool dense = false;
  switch (options.solver) {
    case EigenSolver::automatic: dense = n <= options.dense_threshold; break;
    case EigenSolver::dense: dense = true; break;
    case EigenSolver::lanczos: dense = false; break;
  }
  return dense ? dense_eigendecompose(laplacian, k) : lanczos_eigendecompose(laplacian, k, options);
}

Vector spectral_convergence_report(const Spectrum& spectrum, std::span<const double> reference) {
  const Index m = static_cast<Index>(reference.size());
  if (m > spectrum.count()) {
    throw InvalidArgument("reference has " + std::to_string(m) + " values but the spectrum only " +
                          std::to_string(spectrum.count()));
  }
  Vector errors(m);
  for (Index i = 0; i < m; ++i) {
    const double ref = reference[static_cast<std::size_t>(i)];
    errors[i] = std::abs(spectrum.eigenvalues()[i] - ref) / std::max(ref, 1.0);
  }
  return errors;
}

}  // namespace graphssl
