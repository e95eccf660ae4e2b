#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>

namespace sepmem {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated an operation's precondition (bad argument, bad config).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data could not be read, parsed or written.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not produce a result (singular system, degenerate geometry).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace sepmem
