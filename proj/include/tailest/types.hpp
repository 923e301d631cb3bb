#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace tailest {

/** Scalar type used throughout the library. */
using scalar_t = double;

/** Dense column vector. */
using vector_t = Eigen::Matrix<scalar_t, Eigen::Dynamic, 1>;

/** Dense coefficient-wise array, used for sample storage. */
using array_t = Eigen::Array<scalar_t, Eigen::Dynamic, 1>;

/** Dense matrix. */
using matrix_t = Eigen::Matrix<scalar_t, Eigen::Dynamic, Eigen::Dynamic>;

using index_t = Eigen::Index;
using seed_t = std::uint64_t;
using count_t = std::int64_t;

}  // namespace tailest
