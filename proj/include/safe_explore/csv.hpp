#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "safe_explore/xreal.hpp"

namespace safe_explore {

/// Shortest round-trip decimal for a double; platform-independent.
std::string format_number(double x);

/// Minimal CSV emitter: fixed header, one row per call, no quoting (fields never contain commas).
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header);

  class Row {
   public:
    explicit Row(CsvWriter& w) : w_(w) {}
    Row(const Row&) = delete;
    ~Row();
    Row& operator<<(double x);
    Row& operator<<(XReal x);
    Row& operator<<(bool b);
    Row& operator<<(std::int64_t x);
    Row& operator<<(std::uint64_t x);
    Row& operator<<(int x) { return *this << static_cast<std::int64_t>(x); }
    Row& operator<<(unsigned long long x) { return *this << static_cast<std::uint64_t>(x); }
    Row& operator<<(long long x) { return *this << static_cast<std::int64_t>(x); }
    Row& operator<<(std::string_view s);
    Row& operator<<(const char* s) { return *this << std::string_view(s); }
    template <class T>
    Row& operator<<(const std::optional<T>& x) {
      if (x) return *this << *x;
      return *this << std::string_view();
    }

   private:
    void cell(std::string_view text);
    CsvWriter& w_;
    std::size_t n_ = 0;
  };

  Row row() { return Row(*this); }
  std::size_t columns() const { return columns_; }

 private:
  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace safe_explore
