#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "divclust/common.hpp"

namespace divclust {

/// Named float64 tensors, written as a single binary file.
///
/// Layout (little-endian):
///   8 bytes   magic "DVCLARC1"
///   u64       entry count
///   per entry, in key order:
///     u32     name length, then the name bytes (UTF-8, no terminator)
///     u64     rows, u64 cols
///     rows*cols float64 payload, row-major
///
/// Values are copied bit-for-bit, so save followed by load is exact.
class TensorArchive {
 public:
  void put(const std::string& name, Matrix value);
  void put_vector(const std::string& name, const Vector& value);

  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }
  /// Throws ParseError naming the missing key.
  const Matrix& get(const std::string& name) const;
  Vector get_vector(const std::string& name) const;

  const std::map<std::string, Matrix>& entries() const noexcept { return tensors_; }
  std::size_t size() const noexcept { return tensors_.size(); }

  void save(const std::filesystem::path& path) const;
  static TensorArchive load(const std::filesystem::path& path);

  bool operator==(const TensorArchive&) const;

 private:
  std::map<std::string, Matrix> tensors_;
};

}  // namespace divclust
