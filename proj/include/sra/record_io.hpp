// Line-oriented text records of intervals or timestamps.
//
// Format: UTF-8 text, LF or CRLF line endings, one decimal value per line,
// lines starting with '#' are comments and blank lines are skipped. Values are
// converted to seconds by shifting the decimal exponent of the literal, so unit
// conversion is exact in decimal and a written record reads back bit-exact.
#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "sra/error.hpp"
#include "sra/ranked.hpp"

namespace sra {

enum class TimeUnit { s, ms, us, ns };
enum class RecordKind { Intervals, Timestamps };

struct RecordFormat {
  RecordKind kind = RecordKind::Intervals;
  TimeUnit unit = TimeUnit::s;
};

/// Power of ten taking a value in `unit` to seconds.
constexpr int decimal_exponent(TimeUnit unit) noexcept {
  switch (unit) {
    case TimeUnit::s: return 0;
    case TimeUnit::ms: return -3;
    case TimeUnit::us: return -6;
    case TimeUnit::ns: return -9;
  }
  return 0;
}

constexpr std::string_view unit_name(TimeUnit unit) noexcept {
  switch (unit) {
    case TimeUnit::s: return "s";
    case TimeUnit::ms: return "ms";
    case TimeUnit::us: return "us";
    case TimeUnit::ns: return "ns";
  }
  return "s";
}

inline TimeUnit parse_unit(std::string_view text) {
  if (text == "s") return TimeUnit::s;
  if (text == "ms") return TimeUnit::ms;
  if (text == "us") return TimeUnit::us;
  if (text == "ns") return TimeUnit::ns;
  throw Error(Errc::InvalidArgument, "unknown unit '" + std::string(text) + "'");
}

inline RecordKind parse_record_kind(std::string_view text) {
  if (text == "intervals") return RecordKind::Intervals;
  if (text == "timestamps") return RecordKind::Timestamps;
  throw Error(Errc::InvalidArgument, "unknown record format '" + std::string(text) + "'");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline bool parse_double(std::string_view text, double& out) {
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

/// Parses a decimal literal and multiplies it by 10^shift with one rounding.
inline bool parse_scaled(std::string_view token, int shift, double& out) {
  if (shift == 0) return parse_double(token, out);
  std::string_view mantissa = token;
  long long exponent = 0;
  if (const auto e = token.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = token.substr(0, e);
    auto exp_text = token.substr(e + 1);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    const auto [ptr, ec] =
        std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    if (ec != std::errc{} || ptr != exp_text.data() + exp_text.size()) return false;
  }
  double probe = 0.0;
  if (!parse_double(mantissa, probe)) return false;
  if (!std::isfinite(probe)) {
    if (mantissa.size() != token.size()) return false;
    out = probe;
    return true;
  }
  const std::string shifted = std::string(mantissa) + "e" + std::to_string(exponent + shift);
  return parse_double(shifted, out);
}

/// Shortest round-trip decimal of `x` multiplied by 10^shift, rendered in
/// fixed notation for moderate exponents.
inline std::string format_scaled(double x, int shift) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific);
  std::string_view sci(buf, static_cast<std::size_t>(res.ptr - buf));

  std::string sign;
  if (!sci.empty() && sci.front() == '-') {
    sign = "-";
    sci.remove_prefix(1);
  }
  const auto e = sci.find('e');
  std::string digits;
  for (char c : sci.substr(0, e)) {
    if (c != '.') digits.push_back(c);
  }
  int exponent = 0;
  auto exp_text = sci.substr(e + 1);
  if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
  std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
  if (digits == "0") return sign + "0";
  exponent -= shift;

  const int n_digits = static_cast<int>(digits.size());
  std::string out = sign;
  if (exponent >= 16 || exponent < -5) {
    out += digits.substr(0, 1);
    if (n_digits > 1) out += "." + digits.substr(1);
    out += "e" + std::to_string(exponent);
  } else if (exponent >= 0) {
    if (n_digits <= exponent + 1) {
      out += digits + std::string(static_cast<std::size_t>(exponent + 1 - n_digits), '0');
    } else {
      const auto point = static_cast<std::size_t>(exponent + 1);
      out += digits.substr(0, point) + "." + digits.substr(point);
    }
  } else {
    out += "0." + std::string(static_cast<std::size_t>(-exponent - 1), '0') + digits;
  }
  return out;
}

}  // namespace detail

/// Parses a record from a stream. `position()` of any error is the 1-based line.
inline IntervalSample parse_record(std::istream& in, RecordFormat format,
                                   const std::string& source = {}) {
  const int shift = decimal_exponent(format.unit);
  std::vector<double> values;
  std::vector<std::size_t> lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto token = detail::trim(line);
    if (token.empty() || token.front() == '#') continue;
    double v = 0.0;
    if (!detail::parse_scaled(token, shift, v)) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + " is not a number",
                  line_no);
    }
    values.push_back(v);
    lines.push_back(line_no);
  }
  if (in.bad()) throw Error(Errc::IoError, "read failure on " + source);

  if (format.kind == RecordKind::Intervals) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i]) || values[i] <= 0.0) {
        throw Error(Errc::InvalidInterval,
                    "line " + std::to_string(lines[i]) + " is not a positive finite interval",
                    lines[i]);
      }
    }
    return IntervalSample(std::move(values), source);
  }

  std::vector<double> intervals;
  intervals.reserve(values.empty() ? 0 : values.size() - 1);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(Errc::ParseError, "line " + std::to_string(lines[i]) + " is not finite",
                  lines[i]);
    }
    if (i == 0) continue;
    if (!(values[i] > values[i - 1])) {
      throw Error(Errc::NonMonotonicTimestamps,
                  "timestamp on line " + std::to_string(lines[i]) + " does not increase",
                  lines[i]);
    }
    const double dt = values[i] - values[i - 1];
    if (!std::isfinite(dt)) {
      throw Error(Errc::InvalidInterval,
                  "interval ending on line " + std::to_string(lines[i]) + " overflows", lines[i]);
    }
    intervals.push_back(dt);
  }
  return IntervalSample(std::move(intervals), source);
}

inline IntervalSample read_record(const std::string& path, RecordFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path + "'");
  return parse_record(in, format, path);
}

/// One value per line in `unit`, preceded by a '#' header line.
inline void write_record(const IntervalSample& sample, std::ostream& out, TimeUnit unit) {
  const int shift = decimal_exponent(unit);
  out << "# sra-kit intervals unit=" << unit_name(unit) << " n=" << sample.size() << '\n';
  for (double v : sample.values()) out << detail::format_scaled(v, shift) << '\n';
}

inline void write_record(const IntervalSample& sample, const std::string& path,
                         TimeUnit unit = TimeUnit::s) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
  write_record(sample, out, unit);
  out.flush();
  if (!out) throw Error(Errc::IoError, "write failure on '" + path + "'");
}

}  // namespace sra
