#pragma once

#include <charconv>
#include <initializer_list>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace memoryflow::csv {

/// Shortest round-trip decimal form, independent of the locale.
inline std::string format(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  if (res.ec != std::errc()) return "nan";
  return std::string(buf, res.ptr);
}

inline std::string format(int v) { return std::to_string(v); }
inline std::string format(long v) { return std::to_string(v); }
inline std::string format(std::string_view v) { return std::string(v); }
inline std::string format(const char* v) { return std::string(v); }

class Writer {
 public:
  explicit Writer(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      if (!first) out_ += ',';
      out_ += h;
      first = false;
    }
    out_ += '\n';
    columns_ = header.size();
  }
  explicit Writer(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ += ',';
      out_ += header[i];
    }
    out_ += '\n';
    columns_ = header.size();
  }

  template <class... Ts>
  void row(const Ts&... values) {
    static_assert(sizeof...(Ts) > 0);
    bool first = true;
    ((out_ += (first ? "" : ","), out_ += format(values), first = false), ...);
    out_ += '\n';
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ += ',';
      out_ += cells[i];
    }
    out_ += '\n';
  }

  [[nodiscard]] std::size_t columns() const { return columns_; }
  [[nodiscard]] const std::string& str() const { return out_; }

 private:
  std::string out_;
  std::size_t columns_ = 0;
};

}  // namespace memoryflow::csv
