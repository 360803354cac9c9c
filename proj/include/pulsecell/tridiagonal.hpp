#pragma once

#include "pulsecell/errors.hpp"
#include "pulsecell/types.hpp"

namespace pulsecell {

/// One tridiagonal line system. All four bands have the same length n;
/// lower[0] and upper[n-1] are outside the matrix and must be zero.
struct TridiagonalSystem {
  Vector lower, diag, upper, rhs;

  Index size() const { return diag.size(); }
  void validate() const {
    const Index n = diag.size();
    if (n < 1 || lower.size() != n || upper.size() != n || rhs.size() != n)
      throw ConfigError("tridiagonal system: bands must be equal-length, n >= 1");
    if (lower[0] != 0.0 || upper[n - 1] != 0.0)
      throw ConfigError("tridiagonal system: lower[0] and upper[n-1] must be 0");
  }
};

/// Forward elimination + back substitution, O(n). `work` holds the modified
/// upper band; `x` may alias `rhs`. Throws Error on a zero pivot.
template <typename Scalar>
void thomas_solve_inplace(const Scalar* lower, const Scalar* diag, const Scalar* upper,
                          const Scalar* rhs, Scalar* x, Scalar* work, Index n) {
  Scalar piv = diag[0];
  if (piv == Scalar(0)) throw Error("thomas_solve: zero pivot at row 0");
  Scalar inv = Scalar(1) / piv;
  work[0] = upper[0] * inv;
  x[0] = rhs[0] * inv;
  for (Index k = 1; k < n; ++k) {
    piv = diag[k] - lower[k] * work[k - 1];
    if (piv == Scalar(0))
      throw Error("thomas_solve: zero pivot at row " + std::to_string(k));
    inv = Scalar(1) / piv;
    work[k] = upper[k] * inv;
    x[k] = (rhs[k] - lower[k] * x[k - 1]) * inv;
  }
  for (Index k = n - 2; k >= 0; --k) x[k] -= work[k] * x[k + 1];
}

Vector thomas_solve(const TridiagonalSystem& sys);

}  // namespace pulsecell
