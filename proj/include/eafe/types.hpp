#ifndef EAFE_TYPES_HPP
#define EAFE_TYPES_HPP

#include <Eigen/Core>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace eafe {

using Real = double;
using Index = std::int32_t;

// Small geometric objects. Dimension is 2 or 3 at runtime, so these are
// dynamic-size with fixed capacity; no heap traffic in element kernels.
using Point = Eigen::Matrix<Real, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using Vector = Point;
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

// Per-element quantities: dim x (dim+1) gradients, (dim+1) x (dim+1) matrices.
using GradMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 4>;
using LocalMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 4, 4>;

using VectorX = Eigen::VectorXd;
using MatrixX = Eigen::MatrixXd;
using Triplet = Eigen::Triplet<Real>;
// Compressed sparse row storage; duplicate triplets are summed on compression
// and column indices are strictly increasing within each row.
using CompressedMatrix = Eigen::SparseMatrix<Real, Eigen::RowMajor, Index>;

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Text input could not be parsed; carries the byte offset (expressions) or
/// line number (mesh/config files) of the first offending location.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t where)
      : Error(what), where_(where) {}
  std::size_t where() const { return where_; }

private:
  std::size_t where_;
};

class MeshError : public Error {
public:
  using Error::Error;
};

class DegenerateElementError : public MeshError {
public:
  using MeshError::MeshError;
};

class CoefficientError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace eafe

#endif
