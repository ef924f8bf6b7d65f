#pragma once

// Internal helpers for the plain-text formats (CSV matrices, atomic writes).

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "divclust/common.hpp"

namespace divclust::detail {

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Writes to a sibling temporary and renames, so readers never see a torn file.
inline void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

/// Shortest decimal that round-trips to the same double.
inline void append_number(std::string& out, double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  out.append(buf, end);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Parses a comma-separated numeric matrix. `label` names the source in errors.
inline Matrix parse_csv_matrix(const std::string& text, const std::string& label) {
  std::vector<std::vector<double>> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string_view line = trim(std::string_view(text).substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t field = 0;
    while (true) {
      auto comma = line.find(',');
      std::string_view tok = trim(line.substr(0, comma));
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
      if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError(label + " row " + std::to_string(rows.size()) + " (line " +
                         std::to_string(line_no) + ") field " + std::to_string(field) +
                         ": not a number: '" + std::string(tok) + "'");
      }
      row.push_back(value);
      ++field;
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(label + " row " + std::to_string(rows.size()) + " has " +
                       std::to_string(row.size()) + " fields, expected " +
                       std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  const auto n_rows = static_cast<Index>(rows.size());
  const auto n_cols = rows.empty() ? Index{0} : static_cast<Index>(rows.front().size());
  Matrix m(n_rows, n_cols);
  for (Index r = 0; r < n_rows; ++r)
    for (Index c = 0; c < n_cols; ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return m;
}

template <typename Derived>
std::string format_csv_matrix(const Eigen::MatrixBase<Derived>& m) {
  std::string out;
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out.push_back(',');
      append_number(out, static_cast<double>(m(r, c)));
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace divclust::detail
