#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace pruneclust {

using Index = Eigen::Index;

/// n observations x p features, one observation per row.
template <typename Scalar>
using DataMatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using DataMatrix = DataMatrixT<double>;

// Error taxonomy. Everything derives from Error so callers (the CLI in
// particular) can separate data problems from programming errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct StructuralError : Error {
  using Error::Error;
};
struct EmptyInputError : ValidationError {
  using ValidationError::ValidationError;
};
struct DegenerateDispersionError : Error {
  using Error::Error;
};

/// Throws ValidationError naming the first non-finite cell, or
/// EmptyInputError when there are no rows or no columns.
template <typename Derived>
void validate_data(const Eigen::MatrixBase<Derived>& data) {
  if (data.rows() < 1 || data.cols() < 1) {
    throw EmptyInputError("data matrix is empty (" + std::to_string(data.rows()) + " x " +
                          std::to_string(data.cols()) + ")");
  }
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.cols(); ++j) {
      if (!std::isfinite(static_cast<double>(data(i, j)))) {
        throw ValidationError("non-finite value at row " + std::to_string(i) + ", column " +
                              std::to_string(j));
      }
    }
  }
}

}  // namespace pruneclust
