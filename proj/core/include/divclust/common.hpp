#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace divclust {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// V x N presence indicator. Row-major so that the per-view row is contiguous.
using PresenceMask =
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed on-disk input.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Operand dimensions disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A domain invariant does not hold (e.g. an instance observed in no view).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Invalid hyper-parameters or generator settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The request cannot be satisfied (e.g. more clusters than points).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A quantity is undefined for the given input (e.g. a single cluster).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int epoch) : Error(what), epoch_(epoch) {}
  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

/// SplitMix64 finalizer; derives independent stream seeds from a base seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace divclust
