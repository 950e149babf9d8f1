#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace kimura {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// A point z = (x, y) in \bar S_{n,m} is stored as one vector of length n+m,
// x-coordinates first.
using Point = Eigen::VectorXd;

struct ContractError : std::runtime_error {
  explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct MalformedOperatorError : std::runtime_error {
  explicit MalformedOperatorError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace kimura
