#pragma once

#include <span>
#include <string>
#include <vector>

#include "esdv/units.hpp"

namespace esdv::transfer {

using units::Parameter;
using units::Quantity;

struct DonorObservation {
  std::string site;
  Quantity numerator;
  Quantity denominator;

  bool operator==(const DonorObservation &) const = default;
};

struct Adjustment {
  std::string label;
  double factor = 1.0;

  bool operator==(const Adjustment &) const = default;
};

/// Donor-site observations that yield one dimensionless parameter, e.g. the
/// share of maintenance spending that goes to repairing root damage.
struct TransferRecord {
  std::string derived_id;
  std::string source;
  int year = 0;
  std::vector<DonorObservation> observations;
  std::vector<Adjustment> adjustments;

  bool operator==(const TransferRecord &) const = default;
};

/// Mean of the per-site ratios times the product of adjustment factors.
/// The uncertainty interval is [min, max] of the per-site ratios scaled by
/// the same product.
///
/// Throws StructuralError for an empty record and DomainError for a
/// non-positive denominator or factor, or a numerator/denominator dimension
/// mismatch.
Parameter ratio_from_donors(const TransferRecord &rec);

/// Multiplies a parameter's magnitude and interval by the adjustment
/// product, keeping the unit and marking the provenance as transferred.
Parameter point_transfer(const Parameter &value,
                         std::span<const Adjustment> adjustments);

} // namespace esdv::transfer
