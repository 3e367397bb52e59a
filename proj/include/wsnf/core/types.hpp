#ifndef WSNF_CORE_TYPES_HPP
#define WSNF_CORE_TYPES_HPP

#include <Eigen/Dense>

#include <cstdint>

namespace wsnf {

using Index = Eigen::Index;

/// Row-major dense matrix. Every tensor in the library is one of these;
/// scalars are 1x1 and per-sample vectors are n x 1.
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using RowVectorXd = RowVector<double>;

/// Binary labeling-function match matrix, one byte per cell.
using MatchMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace wsnf

#endif  // WSNF_CORE_TYPES_HPP
