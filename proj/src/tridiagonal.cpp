#include "pulsecell/tridiagonal.hpp"

namespace pulsecell {

Vector thomas_solve(const TridiagonalSystem& sys) {
  sys.validate();
  const Index n = sys.size();
  Vector x(n), work(n);
  thomas_solve_inplace(sys.lower.data(), sys.diag.data(), sys.upper.data(),
                       sys.rhs.data(), x.data(), work.data(), n);
  return x;
}

}  // namespace pulsecell
