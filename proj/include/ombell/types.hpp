#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace ombell {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using SpMat = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline constexpr cplx I{0.0, 1.0};

}  // namespace ombell
