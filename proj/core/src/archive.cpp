#include "divclust/archive.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "text_io.hpp"

namespace divclust {

static_assert(std::endian::native == std::endian::little,
              "archive I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'D', 'V', 'C', 'L', 'A', 'R', 'C', '1'};

template <typename T>
void put_raw(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  Reader(const std::string& data, std::string label) : data_(data), label_(std::move(label)) {}

  template <typename T>
  T read() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  std::string read_bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const noexcept { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw ParseError(label_ + ": truncated archive");
  }

  const std::string& data_;
  std::string label_;
  std::size_t pos_ = 0;
};

}  // namespace

void TensorArchive::put(const std::string& name, Matrix value) {
  tensors_[name] = std::move(value);
}

void TensorArchive::put_vector(const std::string& name, const Vector& value) {
  tensors_[name] = value;
}

const Matrix& TensorArchive::get(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) throw ParseError("archive has no tensor '" + name + "'");
  return it->second;
}

Vector TensorArchive::get_vector(const std::string& name) const {
  const Matrix& m = get(name);
  if (m.cols() != 1) throw ShapeError("tensor '" + name + "' is not a column vector");
  return m.col(0);
}

void TensorArchive::save(const std::filesystem::path& path) const {
  std::string out(kMagic, sizeof kMagic);
  put_raw<std::uint64_t>(out, tensors_.size());
  for (const auto& [name, m] : tensors_) {
    put_raw<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    put_raw<std::uint64_t>(out, static_cast<std::uint64_t>(m.rows()));
    put_raw<std::uint64_t>(out, static_cast<std::uint64_t>(m.cols()));
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < m.cols(); ++c) put_raw<double>(out, m(r, c));
  }
  detail::write_text_atomic(path, out);
}

TensorArchive TensorArchive::load(const std::filesystem::path& path) {
  const std::string data = detail::read_text(path);
  Reader in(data, path.string());
  if (in.read_bytes(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) {
    throw ParseError(path.string() + ": not a tensor archive");
  }
  TensorArchive archive;
  const auto count = in.read<std::uint64_t>();
  for (std::uint64_t e = 0; e < count; ++e) {
    const auto len = in.read<std::uint32_t>();
    std::string name = in.read_bytes(len);
    const auto rows = in.read<std::uint64_t>();
    const auto cols = in.read<std::uint64_t>();
    if (rows > (1ULL << 32) || cols > (1ULL << 32)) {
      throw ParseError(path.string() + ": implausible shape for '" + name + "'");
    }
    Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < m.cols(); ++c) m(r, c) = in.read<double>();
    archive.tensors_.emplace(std::move(name), std::move(m));
  }
  if (!in.done()) throw ParseError(path.string() + ": trailing bytes after last tensor");
  return archive;
}

bool TensorArchive::operator==(const TensorArchive& other) const {
  if (tensors_.size() != other.tensors_.size()) return false;
  auto a = tensors_.begin();
  auto b = other.tensors_.begin();
  for (; a != tensors_.end(); ++a, ++b) {
    if (a->first != b->first) return false;
    if (a->second.rows() != b->second.rows() || a->second.cols() != b->second.cols()) return false;
    // Bitwise comparison: distinguishes -0.0 from 0.0 and compares NaN payloads.
    if (std::memcmp(a->second.data(), b->second.data(),
                    sizeof(double) * static_cast<std::size_t>(a->second.size())) != 0)
      return false;
  }
  return true;
}

}  // namespace divclust
