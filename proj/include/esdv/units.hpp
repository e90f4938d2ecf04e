#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "esdv/errors.hpp"

namespace esdv::units {

/// Base dimensions. The order is also the canonical serialization order.
enum class Base : std::size_t {
  currency, // RMB
  volume,   // m3
  mass,     // t
  area,     // ha
  length,   // mm
  energy,   // kJ
  count,    // person, visitor
  time,     // year
  sound,    // dB
};
inline constexpr std::size_t base_count = 9;

/// Dimension vector over the base units plus a decimal scale factor.
///
/// Two dimensions are compatible iff all exponents agree; the scale only
/// matters when a magnitude is converted to base units.
struct UnitDim {
  std::array<std::int8_t, base_count> exponents{};
  double scale = 1.0;

  static UnitDim dimensionless() { return {}; }
  static UnitDim of(Base b, int exponent = 1);

  std::int8_t exponent(Base b) const {
    return exponents[static_cast<std::size_t>(b)];
  }
  bool is_dimensionless() const;
  bool compatible(const UnitDim &other) const {
    return exponents == other.exponents;
  }
  bool operator==(const UnitDim &) const = default;
};

UnitDim operator*(const UnitDim &a, const UnitDim &b);
UnitDim operator/(const UnitDim &a, const UnitDim &b);

/// Parses `prefix? base (('*'|'/') base)*` with optional `^n` exponents.
///
/// Bases: RMB m3 t kg ha mm kJ kWh person visitor year dB one %.
/// Prefixes: k, million, billion (space separated, or glued for `k`).
/// Throws ParseError naming the offending token and byte offset.
UnitDim parse_unit(std::string_view text);

/// Canonical form: bases in Base order, `*` and `/`, no whitespace,
/// dimensionless as `one`. Throws std::invalid_argument for scales that have
/// no canonical spelling.
std::string format_unit(const UnitDim &u);

/// Scale-insensitive rendering used in diagnostics.
std::string format_dimension(const UnitDim &u);

/// A finite magnitude with a unit. Constructed quantities are normalized to
/// scale 1, so `1.82 billion RMB/year` stores 1.82e9 with scale 1.
class Quantity {
public:
  Quantity() = default;
  Quantity(double magnitude, UnitDim unit);

  double magnitude() const noexcept { return m_magnitude; }
  const UnitDim &unit() const noexcept { return m_unit; }

  bool operator==(const Quantity &) const = default;

private:
  double m_magnitude = 0.0;
  UnitDim m_unit{};
};

/// Shorthand: `qty(6, "RMB/m3")`.
Quantity qty(double magnitude, std::string_view unit);

Quantity qty_mul(const Quantity &a, const Quantity &b);
/// Throws ArithmeticError when the divisor is zero.
Quantity qty_div(const Quantity &a, const Quantity &b);
/// Throws DimensionError when dimensions differ.
Quantity qty_add(const Quantity &a, const Quantity &b);
Quantity qty_sub(const Quantity &a, const Quantity &b);
Quantity qty_scale(const Quantity &a, double factor);

inline Quantity operator*(const Quantity &a, const Quantity &b) {
  return qty_mul(a, b);
}
inline Quantity operator/(const Quantity &a, const Quantity &b) {
  return qty_div(a, b);
}
inline Quantity operator+(const Quantity &a, const Quantity &b) {
  return qty_add(a, b);
}
inline Quantity operator-(const Quantity &a, const Quantity &b) {
  return qty_sub(a, b);
}

/// ha x mm -> m3, exactly area * depth * 10.
/// Throws DimensionError unless the inputs are exactly area and length.
Quantity convert_area_depth_to_volume(const Quantity &area,
                                      const Quantity &depth);

/// Throws DimensionError(slot, ...) when `q` does not have dimension `dim`.
void require_dim(const Quantity &q, const UnitDim &dim, std::string_view slot);

enum class Method { statistic, local_study, transfer, constant };

std::string_view to_string(Method m);
/// Throws std::invalid_argument for unknown tokens.
Method method_from_string(std::string_view token);

struct Provenance {
  std::string source;
  int year = 0;
  Method method = Method::statistic;

  bool operator==(const Provenance &) const = default;
};

/// Closed interval in the parameter's unit.
struct Interval {
  double low = 0.0;
  double high = 0.0;

  bool operator==(const Interval &) const = default;
};

/// A named input value. Invariant: low <= magnitude <= high when an
/// uncertainty interval is present (both normalized to scale 1).
class Parameter {
public:
  Parameter() = default;
  Parameter(std::string id, Quantity quantity, Provenance provenance,
            std::optional<Interval> uncertainty = std::nullopt);

  const std::string &id() const noexcept { return m_id; }
  const Quantity &quantity() const noexcept { return m_quantity; }
  const Provenance &provenance() const noexcept { return m_provenance; }
  const std::optional<Interval> &uncertainty() const noexcept {
    return m_uncertainty;
  }

  /// Copy with a new magnitude in the same unit. The interval is carried
  /// over unchanged and not re-checked (used for perturbation and sampling).
  Parameter with_magnitude(double magnitude) const;

  bool operator==(const Parameter &) const = default;

private:
  std::string m_id;
  Quantity m_quantity;
  Provenance m_provenance;
  std::optional<Interval> m_uncertainty;
};

} // namespace esdv::units
