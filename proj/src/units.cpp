#include "esdv/units.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace esdv::units {

namespace {

constexpr std::array<std::string_view, base_count> canonical_names = {
    "RMB", "m3", "t", "ha", "mm", "kJ", "person", "year", "dB"};

std::optional<UnitDim> lookup_base(std::string_view name) {
  auto with_scale = [](UnitDim u, double s) {
    u.scale = s;
    return u;
  };
  for (std::size_t i = 0; i < base_count; ++i)
    if (name == canonical_names[i])
      return UnitDim::of(static_cast<Base>(i));
  if (name == "kg")
    return with_scale(UnitDim::of(Base::mass), 1e-3);
  if (name == "kWh")
    return with_scale(UnitDim::of(Base::energy), 3600.0);
  if (name == "visitor")
    return UnitDim::of(Base::count);
  if (name == "one")
    return UnitDim::dimensionless();
  if (name == "%")
    return with_scale(UnitDim::dimensionless(), 1e-2);
  return std::nullopt;
}

std::optional<double> lookup_prefix(std::string_view name) {
  if (name == "k")
    return 1e3;
  if (name == "million")
    return 1e6;
  if (name == "billion")
    return 1e9;
  return std::nullopt;
}

UnitDim power(const UnitDim &u, int n) {
  UnitDim out;
  for (std::size_t i = 0; i < base_count; ++i)
    out.exponents[i] = static_cast<std::int8_t>(u.exponents[i] * n);
  out.scale = std::pow(u.scale, n);
  return out;
}

class UnitParser {
public:
  explicit UnitParser(std::string_view text) : m_text(text) {}

  UnitDim parse() {
    skip_ws();
    if (at_end())
      fail("", "empty unit expression");

    double prefix = 1.0;
    std::size_t start = m_pos;
    std::string_view word = read_word();
    if (auto p = lookup_prefix(word)) {
      skip_ws();
      if (at_end() || m_text[m_pos] == '*' || m_text[m_pos] == '/')
        fail(std::string(word), "prefix '" + std::string(word) +
                                    "' must be followed by a base unit");
      prefix = *p;
      start = m_pos;
      word = read_word();
    }
    UnitDim result = factor(word, start);
    result.scale *= prefix;

    for (;;) {
      skip_ws();
      if (at_end())
        break;
      char op = m_text[m_pos];
      if (op != '*' && op != '/')
        fail(std::string(1, op), "expected '*' or '/'");
      ++m_pos;
      skip_ws();
      std::size_t fstart = m_pos;
      UnitDim rhs = factor(read_word(), fstart);
      result = op == '*' ? result * rhs : result / rhs;
    }
    return result;
  }

private:
  bool at_end() const { return m_pos >= m_text.size(); }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(m_text[m_pos])))
      ++m_pos;
  }

  [[noreturn]] void fail(std::string token, const std::string &msg) const {
    fail_at(std::move(token), m_pos, msg);
  }
  [[noreturn]] void fail_at(std::string token, std::size_t offset,
                            const std::string &msg) const {
    throw ParseError(token, offset,
                     "unit '" + std::string(m_text) + "': " + msg +
                         " at byte " + std::to_string(offset));
  }

  std::string_view read_word() {
    std::size_t start = m_pos;
    if (!at_end() && m_text[m_pos] == '%') {
      ++m_pos;
      return m_text.substr(start, 1);
    }
    if (at_end() || !std::isalpha(static_cast<unsigned char>(m_text[m_pos]))) {
      std::string tok = at_end() ? "" : std::string(1, m_text[m_pos]);
      fail(tok, "expected a unit name");
    }
    while (!at_end() && std::isalnum(static_cast<unsigned char>(m_text[m_pos])))
      ++m_pos;
    return m_text.substr(start, m_pos - start);
  }

  UnitDim factor(std::string_view word, std::size_t start) {
    std::optional<UnitDim> base = lookup_base(word);
    if (!base && word.size() > 1 && word.front() == 'k') {
      base = lookup_base(word.substr(1));
      if (base)
        base->scale *= 1e3;
    }
    if (!base)
      fail_at(std::string(word), start,
              "unknown unit '" + std::string(word) + "'");
    if (!at_end() && m_text[m_pos] == '^') {
      ++m_pos;
      std::size_t nstart = m_pos;
      int n = 0;
      const char *first = m_text.data() + m_pos;
      const char *last = m_text.data() + m_text.size();
      auto [ptr, ec] = std::from_chars(first, last, n);
      if (ec != std::errc() || n == 0) {
        std::size_t len = ptr == first ? (m_pos < m_text.size() ? 1 : 0)
                                       : static_cast<std::size_t>(ptr - first);
        fail_at(std::string(m_text.substr(nstart, len)), nstart,
                "malformed exponent");
      }
      m_pos += static_cast<std::size_t>(ptr - first);
      return power(*base, n);
    }
    return *base;
  }

  std::string_view m_text;
  std::size_t m_pos = 0;
};

double apply_scale(double magnitude, double scale) {
  if (scale == 1.0)
    return magnitude;
  if (scale < 1.0) {
    // Dividing by an exact integer reciprocal keeps 44 % == 0.44 exactly.
    double inv = 1.0 / scale;
    if (inv == std::round(inv))
      return magnitude / inv;
  }
  return magnitude * scale;
}

std::string render(const UnitDim &u) {
  std::string num, den;
  for (std::size_t i = 0; i < base_count; ++i) {
    int e = u.exponents[i];
    if (e == 0)
      continue;
    std::string term(canonical_names[i]);
    if (std::abs(e) != 1)
      term += "^" + std::to_string(std::abs(e));
    if (e > 0)
      num += (num.empty() ? "" : "*") + term;
    else
      den += "/" + term;
  }
  if (num.empty())
    num = "one";
  return num + den;
}

} // namespace

UnitDim UnitDim::of(Base b, int exponent) {
  UnitDim u;
  u.exponents[static_cast<std::size_t>(b)] = static_cast<std::int8_t>(exponent);
  return u;
}

bool UnitDim::is_dimensionless() const {
  for (auto e : exponents)
    if (e != 0)
      return false;
  return true;
}

UnitDim operator*(const UnitDim &a, const UnitDim &b) {
  UnitDim out;
  for (std::size_t i = 0; i < base_count; ++i)
    out.exponents[i] =
        static_cast<std::int8_t>(a.exponents[i] + b.exponents[i]);
  out.scale = a.scale * b.scale;
  return out;
}

UnitDim operator/(const UnitDim &a, const UnitDim &b) {
  UnitDim out;
  for (std::size_t i = 0; i < base_count; ++i)
    out.exponents[i] =
        static_cast<std::int8_t>(a.exponents[i] - b.exponents[i]);
  out.scale = a.scale / b.scale;
  return out;
}

UnitDim parse_unit(std::string_view text) { return UnitParser(text).parse(); }

std::string format_unit(const UnitDim &u) {
  if (u.scale == 1.0)
    return render(u);
  if (u.scale == 1e-2 && u.is_dimensionless())
    return "%";
  if (u.scale == 1e3)
    return "k " + render(u);
  if (u.scale == 1e6)
    return "million " + render(u);
  if (u.scale == 1e9)
    return "billion " + render(u);
  throw std::invalid_argument("unit scale has no canonical spelling");
}

std::string format_dimension(const UnitDim &u) { return render(u); }

Quantity::Quantity(double magnitude, UnitDim unit) {
  if (!std::isfinite(magnitude))
    throw ArithmeticError("quantity magnitude must be finite");
  m_magnitude = apply_scale(magnitude, unit.scale);
  if (!std::isfinite(m_magnitude))
    throw ArithmeticError("quantity magnitude overflows after scaling");
  unit.scale = 1.0;
  m_unit = unit;
}

Quantity qty(double magnitude, std::string_view unit) {
  return Quantity(magnitude, parse_unit(unit));
}

Quantity qty_mul(const Quantity &a, const Quantity &b) {
  return Quantity(a.magnitude() * b.magnitude(), a.unit() * b.unit());
}

Quantity qty_div(const Quantity &a, const Quantity &b) {
  if (b.magnitude() == 0.0)
    throw ArithmeticError("division by zero quantity");
  return Quantity(a.magnitude() / b.magnitude(), a.unit() / b.unit());
}

Quantity qty_add(const Quantity &a, const Quantity &b) {
  if (!a.unit().compatible(b.unit()))
    throw DimensionError("+", format_dimension(a.unit()),
                         format_dimension(b.unit()));
  return Quantity(a.magnitude() + b.magnitude(), a.unit());
}

Quantity qty_sub(const Quantity &a, const Quantity &b) {
  if (!a.unit().compatible(b.unit()))
    throw DimensionError("-", format_dimension(a.unit()),
                         format_dimension(b.unit()));
  return Quantity(a.magnitude() - b.magnitude(), a.unit());
}

Quantity qty_scale(const Quantity &a, double factor) {
  return Quantity(a.magnitude() * factor, a.unit());
}

Quantity convert_area_depth_to_volume(const Quantity &area,
                                      const Quantity &depth) {
  require_dim(area, UnitDim::of(Base::area), "area");
  require_dim(depth, UnitDim::of(Base::length), "depth");
  // 1 ha = 1e4 m2, 1 mm = 1e-3 m
  return Quantity(area.magnitude() * depth.magnitude() * 10.0,
                  UnitDim::of(Base::volume));
}

void require_dim(const Quantity &q, const UnitDim &dim, std::string_view slot) {
  if (!q.unit().compatible(dim))
    throw DimensionError(std::string(slot), format_dimension(dim),
                         format_dimension(q.unit()));
}

} // namespace esdv::units

namespace esdv::units {

std::string_view to_string(Method m) {
  switch (m) {
  case Method::statistic:
    return "statistic";
  case Method::local_study:
    return "local_study";
  case Method::transfer:
    return "transfer";
  case Method::constant:
    return "constant";
  }
  return "statistic";
}

Method method_from_string(std::string_view token) {
  for (Method m : {Method::statistic, Method::local_study, Method::transfer,
                   Method::constant})
    if (to_string(m) == token)
      return m;
  throw std::invalid_argument("unknown method '" + std::string(token) + "'");
}

Parameter::Parameter(std::string id, Quantity quantity, Provenance provenance,
                     std::optional<Interval> uncertainty)
    : m_id(std::move(id)), m_quantity(quantity),
      m_provenance(std::move(provenance)), m_uncertainty(uncertainty) {
  if (m_id.empty())
    throw StructuralError("parameter id must not be empty");
  if (m_uncertainty) {
    if (!std::isfinite(m_uncertainty->low) ||
        !std::isfinite(m_uncertainty->high))
      throw StructuralError("parameter '" + m_id + "': non-finite interval");
    double v = m_quantity.magnitude();
    if (!(m_uncertainty->low <= v && v <= m_uncertainty->high))
      throw StructuralError("parameter '" + m_id +
                            "': uncertainty interval must satisfy low <= "
                            "value <= high");
  }
}

Parameter Parameter::with_magnitude(double magnitude) const {
  Parameter out = *this;
  out.m_quantity = Quantity(magnitude, m_quantity.unit());
  return out;
}

} // namespace esdv::units
