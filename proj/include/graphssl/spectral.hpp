#pragma once

#include <cstdint>
#include <span>

#include "graphssl/graph.hpp"

namespace graphssl {

/// First k eigenpairs of a graph Laplacian, eigenvalues ascending.
///
/// Eigenvectors are orthonormal in R^N and follow a fixed sign convention: the entry
/// of largest magnitude is positive, ties resolved by the lowest index.
class Spectrum {
 public:
  Spectrum(Vector eigenvalues, Matrix eigenvectors);

  Index size() const { return eigenvectors_.rows(); }   // N
  Index count() const { return eigenvalues_.size(); }   // k
  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }

 private:
  Vector eigenvalues_;
  Matrix eigenvectors_;
};

enum class EigenSolver { automatic, dense, lanczos };

struct EigenOptions {
  EigenSolver solver = EigenSolver::automatic;
  Index dense_threshold = 512;  // automatic: dense at or below this size
  int block_size = 4;
  double tolerance = 1e-10;     // residual tolerance relative to max(1, ||L||)
  std::uint64_t seed = 0x5eedf00dULL;
};

/// min(N, 256).
Index default_truncation(Index n);

Spectrum eigendecompose(const Laplacian& laplacian, Index k, const EigenOptions& options = {});

/// |lambda_i - ref_i| / max(ref_i, 1) for each reference value.
Vector spectral_convergence_report(const Spectrum& spectrum, std::span<const double> reference);

/// Flips columns so that each one's largest-magnitude entry is positive.
void apply_sign_convention(Matrix& vectors);

}  // namespace graphssl
