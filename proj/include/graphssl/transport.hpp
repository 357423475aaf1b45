#pragma once

#include <vector>

#include "graphssl/types.hpp"

namespace graphssl {

/// Minimum-cost perfect matching on a square cost matrix (shortest augmenting paths with
/// potentials). Returns the total cost; `assignment[i]` receives the column matched to row i.
double solve_assignment(const Matrix& cost, std::vector<Index>* assignment = nullptr);

/// Exact discrete optimal transport min <P, C> over couplings with marginals a (rows) and
/// b (columns), solved by the primal network simplex method. Marginals must be nonnegative
/// and have equal totals (relative tolerance 1e-12). `plan` receives the optimal coupling.
double solve_transport(const Vector& a, const Vector& b, const Matrix& cost, Matrix* plan = nullptr);

/// Same for integer marginals (exact arithmetic on the flows).
double solve_transport(const std::vector<long long>& a, const std::vector<long long>& b, const Matrix& cost,
                       Matrix* plan = nullptr);

}  // namespace graphssl
