// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace bhd {

/// Shortest round-trip formatting with 17 significant digits.
std::string format_double(double v);

/// Comma-separated writer: header row, '.' decimal, 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  CsvWriter& field(double v);
  CsvWriter& field(std::int64_t v);
  CsvWriter& field(int v) { return field(static_cast<std::int64_t>(v)); }
  CsvWriter& field(std::string_view v);
  void end_row();

  void row(std::initializer_list<double> values);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  void sep();

  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
};

}  // namespace bhd
