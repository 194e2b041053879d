#include "nnverify/fxp.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace nnverify {

FxpFormat::FxpFormat(int int_bits, int frac_bits)
    : int_bits_(int_bits), frac_bits_(frac_bits) {
  if (int_bits < 1 || frac_bits < 0 || int_bits + frac_bits > 64)
    throw Error(ErrorCode::invalid_argument,
                "invalid fixed-point format <" + std::to_string(int_bits) +
                    "," + std::to_string(frac_bits) + ">");
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view s, std::string_view whole) {
  s = trim(s);
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw Error(ErrorCode::invalid_argument,
                "malformed format string '" + std::string(whole) + "'");
  return value;
}

} // namespace

FxpFormat FxpFormat::parse(std::string_view text) {
  std::string_view s = trim(text);
  if (!s.empty() && s.front() == '<') {
    if (s.back() != '>')
      throw Error(ErrorCode::invalid_argument,
                  "malformed format string '" + std::string(text) + "'");
    s = s.substr(1, s.size() - 2);
  }
  const auto comma = s.find(',');
  if (comma == std::string_view::npos)
    throw Error(ErrorCode::invalid_argument,
                "malformed format string '" + std::string(text) + "'");
  return FxpFormat(parse_int(s.substr(0, comma), text),
                   parse_int(s.substr(comma + 1), text));
}

std::int64_t FxpFormat::raw_min() const noexcept {
  if (width() == 64)
    return std::numeric_limits<std::int64_t>::min();
  return -(std::int64_t{1} << (width() - 1));
}

std::int64_t FxpFormat::raw_max() const noexcept {
  if (width() == 64)
    return std::numeric_limits<std::int64_t>::max();
  return (std::int64_t{1} << (width() - 1)) - 1;
}

double FxpFormat::resolution() const noexcept {
  return std::ldexp(1.0, -frac_bits_);
}

long double FxpFormat::min_real() const noexcept {
  return std::ldexp(static_cast<long double>(raw_min()), -frac_bits_);
}

long double FxpFormat::max_real() const noexcept {
  return std::ldexp(static_cast<long double>(raw_max()), -frac_bits_);
}

std::string FxpFormat::to_string() const {
  return "<" + std::to_string(int_bits_) + "," + std::to_string(frac_bits_) +
         ">";
}

std::string to_string(Rounding r) {
  return r == Rounding::nearest_even ? "nearest_even" : "toward_zero";
}

Rounding parse_rounding(std::string_view text) {
  if (text == "nearest" || text == "nearest_even")
    return Rounding::nearest_even;
  if (text == "truncate" || text == "toward_zero")
    return Rounding::toward_zero;
  throw Error(ErrorCode::invalid_argument,
              "unknown rounding mode '" + std::string(text) + "'");
}

std::int64_t FxpArith::div(std::int64_t a, std::int64_t b) const {
  if (b == 0)
    throw Error(ErrorCode::division_by_zero, "fixed-point division by zero");
  const wide_int n = static_cast<wide_int>(a) * (wide_int{1} << frac_);
  const wide_int d = b;
  wide_int q = n / d; // truncates toward zero
  const wide_int r = n % d;
  if (r != 0) {
    const wide_int twice_r = r < 0 ? -2 * r : 2 * r;
    const wide_int abs_d = d < 0 ? -d : d;
    if (twice_r > abs_d || (twice_r == abs_d && (q & 1) != 0))
      q += ((n < 0) != (d < 0)) ? -1 : 1;
  }
  return saturate(q);
}

std::int64_t FxpArith::from_real(double x, Rounding mode) const {
  if (std::isnan(x))
    throw Error(ErrorCode::invalid_argument, "cannot quantize NaN");
  if (std::isinf(x))
    throw Error(ErrorCode::invalid_argument, "cannot quantize infinity");
  // x * 2^F is exact in long double; its integer part fits 64 bits once the
  // value is known to lie inside the (padded) range.
  const long double scaled = std::ldexp(static_cast<long double>(x), frac_);
  if (scaled >= static_cast<long double>(hi_) + 1.0L)
    return hi_;
  if (scaled <= static_cast<long double>(lo_) - 1.0L)
    return lo_;
  long double r = 0;
  if (mode == Rounding::toward_zero) {
    r = std::trunc(scaled);
  } else {
    const long double fl = std::floor(scaled);
    const long double frac = scaled - fl;
    r = fl;
    if (frac > 0.5L || (frac == 0.5L && std::fmod(fl, 2.0L) != 0))
      r = fl + 1;
  }
  return saturate(static_cast<wide_int>(r));
}

long double FxpArith::to_real(std::int64_t raw) const noexcept {
  return std::ldexp(static_cast<long double>(raw), -frac_);
}

FxpValue FxpValue::from_raw(std::int64_t raw, FxpFormat fmt) {
  if (raw < fmt.raw_min() || raw > fmt.raw_max())
    throw Error(ErrorCode::invalid_argument,
                "raw value " + std::to_string(raw) + " outside " +
                    fmt.to_string());
  return FxpValue(raw, fmt);
}

double FxpValue::to_double() const noexcept {
  return std::ldexp(static_cast<double>(raw_), -fmt_.frac_bits());
}

long double FxpValue::to_long_double() const noexcept {
  return std::ldexp(static_cast<long double>(raw_), -fmt_.frac_bits());
}

FxpValue from_real(double x, FxpFormat fmt, Rounding mode) {
  return FxpValue::from_raw(FxpArith(fmt).from_real(x, mode), fmt);
}

double to_real(FxpValue v) noexcept { return v.to_double(); }

long double to_real_exact(FxpValue v) noexcept { return v.to_long_double(); }

namespace {

FxpArith common(FxpValue a, FxpValue b, const char *op) {
  if (a.format() != b.format())
    throw Error(ErrorCode::format_mismatch,
                std::string(op) + ": operands in " + a.format().to_string() +
                    " and " + b.format().to_string());
  return FxpArith(a.format());
}

} // namespace

FxpValue fxp_add(FxpValue a, FxpValue b) {
  const auto ar = common(a, b, "fxp_add");
  return FxpValue::from_raw(ar.add(a.raw(), b.raw()), a.format());
}

FxpValue fxp_sub(FxpValue a, FxpValue b) {
  const auto ar = common(a, b, "fxp_sub");
  return FxpValue::from_raw(ar.sub(a.raw(), b.raw()), a.format());
}

FxpValue fxp_mul(FxpValue a, FxpValue b) {
  const auto ar = common(a, b, "fxp_mul");
  return FxpValue::from_raw(ar.mul(a.raw(), b.raw()), a.format());
}

FxpValue fxp_div(FxpValue a, FxpValue b) {
  const auto ar = common(a, b, "fxp_div");
  return FxpValue::from_raw(ar.div(a.raw(), b.raw()), a.format());
}

} // namespace nnverify
