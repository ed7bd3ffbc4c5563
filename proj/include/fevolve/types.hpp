#pragma once

#include <array>
#include <complex>
#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace fevolve {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Physical coordinate; components beyond the grid dimension are zero.
using Point = std::array<double, 3>;

using ScalarField = std::function<double(const Point&)>;
using ComplexField = std::function<Complex(const Point&)>;

}  // namespace fevolve
