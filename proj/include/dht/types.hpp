#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace dht {

using Real = double;
using Complex = std::complex<Real>;
using Index = Eigen::Index;

using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;

using IndexList = std::vector<Index>;

}  // namespace dht
