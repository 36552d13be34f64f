// SPDX-License-Identifier: Apache-2.0
#include "bhdimer/core/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace bhd {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (res.ec != std::errc()) throw std::runtime_error("float formatting failed");
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary), columns_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  for (const auto& h : header) field(std::string_view(h));
  end_row();
}

void CsvWriter::sep() {
  if (in_row_++ > 0) out_.put(',');
}

CsvWriter& CsvWriter::field(double v) {
  sep();
  out_ << format_double(v);
  return *this;
}

CsvWriter& CsvWriter::field(std::int64_t v) {
  sep();
  out_ << v;
  return *this;
}

CsvWriter& CsvWriter::field(std::string_view v) {
  sep();
  out_ << v;
  return *this;
}

void CsvWriter::end_row() {
  if (in_row_ != columns_)
    throw std::logic_error("csv row has " + std::to_string(in_row_) + " fields, expected " +
                           std::to_string(columns_));
  out_.put('\n');
  in_row_ = 0;
  if (!out_) throw std::runtime_error("write to " + path_.string() + " failed");
}

void CsvWriter::row(std::initializer_list<double> values) {
  for (double v : values) field(v);
  end_row();
}

}  // namespace bhd
