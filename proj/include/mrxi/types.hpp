#pragma once

#include <Eigen/Core>

namespace mrxi {

/// Dense row-major matrix; forward operators are stored this way.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Worker count from MRXI_THREADS (default 1).
unsigned thread_count();

}  // namespace mrxi
