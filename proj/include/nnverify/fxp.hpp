#pragma once

// Fixed-point arithmetic in the <I,F> format: I integer bits (sign included,
// two's complement) and F fractional bits, value = raw / 2^F.
//
// Overflow saturates to the format bounds. Products and quotients round to
// nearest, ties to even. Sums and differences are exact before saturation.

#include <cstdint>
#include <string>
#include <string_view>

#include "nnverify/error.hpp"

namespace nnverify {

using wide_int = __int128;

class FxpFormat {
public:
  /// Throws Error(invalid_argument) unless 1 <= I, 0 <= F and I + F <= 64.
  FxpFormat(int int_bits, int frac_bits);

  /// Accepts "<I,F>", "I,F" and the same with blanks around the numbers.
  static FxpFormat parse(std::string_view text);

  int int_bits() const noexcept { return int_bits_; }
  int frac_bits() const noexcept { return frac_bits_; }
  int width() const noexcept { return int_bits_ + frac_bits_; }

  std::int64_t raw_min() const noexcept;
  std::int64_t raw_max() const noexcept;

  /// Resolution c_m = 2^-F.
  double resolution() const noexcept;
  long double min_real() const noexcept;
  long double max_real() const noexcept;

  std::string to_string() const;

  friend bool operator==(const FxpFormat &, const FxpFormat &) = default;

private:
  int int_bits_;
  int frac_bits_;
};

enum class Rounding {
  nearest_even,
  /// Truncation toward zero, the behaviour of a C float-to-integer cast.
  toward_zero,
};

std::string to_string(Rounding r);
Rounding parse_rounding(std::string_view text);

/// Raw-level arithmetic bound to one format. Every FxpValue operation and the
/// operational-model kernels go through this type.
class FxpArith {
public:
  explicit FxpArith(FxpFormat fmt) noexcept
      : fmt_(fmt), lo_(fmt.raw_min()), hi_(fmt.raw_max()),
        frac_(fmt.frac_bits()) {}

  FxpFormat format() const noexcept { return fmt_; }
  std::int64_t raw_min() const noexcept { return lo_; }
  std::int64_t raw_max() const noexcept { return hi_; }

  std::int64_t saturate(wide_int v) const noexcept {
    if (v < lo_)
      return lo_;
    if (v > hi_)
      return hi_;
    return static_cast<std::int64_t>(v);
  }

  std::int64_t add(std::int64_t a, std::int64_t b) const noexcept {
    return saturate(static_cast<wide_int>(a) + b);
  }

  std::int64_t sub(std::int64_t a, std::int64_t b) const noexcept {
    return saturate(static_cast<wide_int>(a) - b);
  }

  std::int64_t mul(std::int64_t a, std::int64_t b) const noexcept {
    return saturate(mul_wide(a, b));
  }

  /// The rounded product before saturation.
  wide_int mul_wide(std::int64_t a, std::int64_t b) const noexcept {
    return shift_round(static_cast<wide_int>(a) * b);
  }

  /// Throws Error(division_by_zero) when b == 0.
  std::int64_t div(std::int64_t a, std::int64_t b) const;

  /// Nearest representable raw for x; NaN and infinities throw.
  std::int64_t from_real(double x, Rounding mode = Rounding::nearest_even) const;

  /// Exact value of a raw (long double carries a 64-bit significand).
  long double to_real(std::int64_t raw) const noexcept;

private:
  // (v / 2^F) rounded to nearest, ties to even.
  wide_int shift_round(wide_int v) const noexcept {
    if (frac_ == 0)
      return v;
    const wide_int one = 1;
    const wide_int mask = (one << frac_) - 1;
    const wide_int half = one << (frac_ - 1);
    wide_int q = v >> frac_; // arithmetic shift: floor
    const wide_int rem = v & mask;
    if (rem > half || (rem == half && (q & 1) != 0))
      ++q;
    return q;
  }

  FxpFormat fmt_;
  std::int64_t lo_;
  std::int64_t hi_;
  int frac_;
};

/// A quantized number: raw integer plus its format. Immutable.
class FxpValue {
public:
  /// Throws Error(invalid_argument) when raw lies outside the format range.
  static FxpValue from_raw(std::int64_t raw, FxpFormat fmt);

  std::int64_t raw() const noexcept { return raw_; }
  FxpFormat format() const noexcept { return fmt_; }

  double to_double() const noexcept;
  long double to_long_double() const noexcept;

  friend bool operator==(const FxpValue &, const FxpValue &) = default;

private:
  FxpValue(std::int64_t raw, FxpFormat fmt) : raw_(raw), fmt_(fmt) {}

  std::int64_t raw_;
  FxpFormat fmt_;
};

FxpValue from_real(double x, FxpFormat fmt,
                   Rounding mode = Rounding::nearest_even);

/// raw / 2^F. Exact whenever the raw fits a double significand (always for
/// F <= 52 with |raw| < 2^53); use to_real_exact otherwise.
double to_real(FxpValue v) noexcept;
long double to_real_exact(FxpValue v) noexcept;

// Mixed formats throw Error(format_mismatch).
FxpValue fxp_add(FxpValue a, FxpValue b);
FxpValue fxp_sub(FxpValue a, FxpValue b);
FxpValue fxp_mul(FxpValue a, FxpValue b);
FxpValue fxp_div(FxpValue a, FxpValue b);

} // namespace nnverify
