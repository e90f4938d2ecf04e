#include "esdv/transfer.hpp"

#include <algorithm>

namespace esdv::transfer {

namespace {

double adjustment_product(std::span<const Adjustment> adjustments) {
  double product = 1.0;
  for (const auto &a : adjustments) {
    if (!(a.factor > 0.0))
      throw DomainError(a.label,
                        "adjustment factor '" + a.label + "' must be positive");
    product *= a.factor;
  }
  return product;
}

std::string adjustment_labels(std::span<const Adjustment> adjustments) {
  std::string out;
  for (const auto &a : adjustments)
    out += (out.empty() ? "" : ",") + a.label;
  return out;
}

} // namespace

Parameter ratio_from_donors(const TransferRecord &rec) {
  if (rec.observations.empty())
    throw StructuralError("transfer '" + rec.derived_id +
                          "' has no donor observations");
  double product = adjustment_product(rec.adjustments);

  std::vector<double> ratios;
  ratios.reserve(rec.observations.size());
  for (const auto &obs : rec.observations) {
    if (!obs.numerator.unit().compatible(obs.denominator.unit()))
      throw DomainError(obs.site, "donor '" + obs.site +
                                      "': numerator and denominator must "
                                      "share a dimension");
    if (!(obs.denominator.magnitude() > 0.0))
      throw DomainError(obs.site, "donor '" + obs.site +
                                      "': denominator must be positive");
    ratios.push_back(obs.numerator.magnitude() / obs.denominator.magnitude());
  }
  double sum = 0.0;
  for (double r : ratios)
    sum += r;
  auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  // The true mean lies in [min, max]; clamp away summation rounding.
  double mean = std::clamp(sum / static_cast<double>(ratios.size()), *lo, *hi);

  std::string source = rec.source;
  if (!rec.adjustments.empty())
    source += " [adjusted: " + adjustment_labels(rec.adjustments) + "]";
  return Parameter(rec.derived_id,
                   Quantity(mean * product, units::UnitDim::dimensionless()),
                   {source, rec.year, units::Method::transfer},
                   units::Interval{*lo * product, *hi * product});
}

Parameter point_transfer(const Parameter &value,
                         std::span<const Adjustment> adjustments) {
  double product = adjustment_product(adjustments);
  units::Provenance prov = value.provenance();
  prov.method = units::Method::transfer;
  if (!adjustments.empty())
    prov.source += " [adjusted: " + adjustment_labels(adjustments) + "]";
  std::optional<units::Interval> interval = value.uncertainty();
  if (interval) {
    interval->low *= product;
    interval->high *= product;
  }
  return Parameter(
      value.id(),
      Quantity(value.quantity().magnitude() * product, value.quantity().unit()),
      std::move(prov), interval);
}

} // namespace esdv::transfer
