#include "safe_explore/csv.hpp"

#include <array>
#include <charconv>

#include "safe_explore/error.hpp"

namespace safe_explore {

std::string format_number(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header)
    : out_(out), columns_(header.size()) {
  bool first = true;
  for (auto h : header) {
    if (!first) out_ << ',';
    out_ << h;
    first = false;
  }
  out_ << '\n';
}

CsvWriter::Row::~Row() {
  // pad short rows so every line has the header's width
  while (n_ < w_.columns_) cell({});
  w_.out_ << '\n';
}

void CsvWriter::Row::cell(std::string_view text) {
  if (n_ > 0) w_.out_ << ',';
  w_.out_ << text;
  ++n_;
}

CsvWriter::Row& CsvWriter::Row::operator<<(double x) {
  cell(format_number(x));
  return *this;
}
CsvWriter::Row& CsvWriter::Row::operator<<(XReal x) {
  cell(x.to_string());
  return *this;
}
CsvWriter::Row& CsvWriter::Row::operator<<(bool b) {
  cell(b ? "1" : "0");
  return *this;
}
CsvWriter::Row& CsvWriter::Row::operator<<(std::int64_t x) {
  cell(std::to_string(x));
  return *this;
}
CsvWriter::Row& CsvWriter::Row::operator<<(std::uint64_t x) {
  cell(std::to_string(x));
  return *this;
}
CsvWriter::Row& CsvWriter::Row::operator<<(std::string_view s) {
  cell(s);
  return *this;
}

}  // namespace safe_explore
