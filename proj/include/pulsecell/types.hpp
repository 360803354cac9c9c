#pragma once

#include <Eigen/Dense>

namespace pulsecell {

using Real = double;
using Index = Eigen::Index;

// Temperature field storage: column j holds one radial line (contiguous),
// so radial sweeps run over contiguous memory.
using Array2 = Eigen::ArrayXXd;
using Vector = Eigen::VectorXd;
using BoolArray2 = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace pulsecell
