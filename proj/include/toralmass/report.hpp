#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "toralmass/common.hpp"

namespace toral {

// Shortest text with 17 significant digits; round-trips through strtod.
std::string format_real(double x);

// Streaming JSON writer.  Fields appear exactly in emission order and reals
// go through format_real, so identical inputs give identical bytes.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view k);
  JsonWriter& value(double v);
  JsonWriter& value(i64 v);
  JsonWriter& value(u64 v);
  JsonWriter& value(int v);
  JsonWriter& value(bool v);
  JsonWriter& value(std::string_view v);
  JsonWriter& value(const char* v);
  JsonWriter& null();
  // Convenience: key + value.
  template <typename T>
  JsonWriter& field(std::string_view k, T v) {
    key(k);
    return value(v);
  }
  std::string str() const;

 private:
  void pre_value();
  void newline_indent();
  std::string out_;
  std::vector<char> stack_;   // 'o' or 'a'
  std::vector<bool> first_;
  bool key_pending_ = false;
};

// CSV writer with RFC-4180 quoting (fields holding separators, quotes or
// line breaks are quoted, embedded quotes doubled); rows end in CRLF.
class CsvWriter {
 public:
  CsvWriter& field(std::string_view v);
  CsvWriter& field(double v);
  CsvWriter& field(i64 v);
  CsvWriter& field(u64 v);
  CsvWriter& field(int v);
  CsvWriter& endrow();
  const std::string& str() const { return out_; }

 private:
  std::string out_;
  bool row_open_ = false;
};

// FNV-1a 64-bit content checksum, rendered as "fnv1a64:<16 hex digits>".
u64 fnv1a64(std::string_view bytes);
std::string checksum_label(std::string_view bytes);

void write_text_file(const std::string& path, std::string_view body);

}  // namespace toral
