#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "esdv/taxonomy.hpp"
#include "esdv/units.hpp"

namespace esdv::kernels {

using units::Quantity;

enum class Side { ES, EDS };

std::string_view to_string(Side s);
Side side_from_string(std::string_view s);

/// Monetary flow of one kernel evaluation, always in RMB/year and >= 0.
/// When `breakdown` is non-empty, `value` is the sum of its entries.
struct Valuation {
  Quantity value;
  std::map<std::string, Quantity> breakdown;
};

struct LineItemResult {
  std::string id;
  Side side = Side::ES;
  taxonomy::FunctionalClass functional_class =
      taxonomy::FunctionalClass::Regulating;
  Quantity value;
  std::map<std::string, Quantity> breakdown;
};

struct KernelOptions {
  /// Enforce the Beijing term counts: 4 product classes, 3 carbon land
  /// types, 4 oxygen land types.
  bool strict = false;
};

/// Amount x unit price, the building block of most sums below.
struct PricedAmount {
  Quantity amount;
  Quantity price;
};

struct DiseaseTerm {
  Quantity incidence;        // annual incidence, fraction
  Quantity plant_share;      // share of patients attributable to plants
  Quantity cost_per_patient; // RMB/person
};

struct ClimateInputs {
  Quantity wetland_area;      // ha
  Quantity evaporation;       // mm/year
  Quantity vaporization_heat; // kJ/kg
  Quantity ac_efficiency;     // dimensionless, > 0
  Quantity electricity_price; // RMB/kWh
  Quantity humidify_energy;   // kWh/m3
  std::vector<PricedAmount> carbon;
  std::vector<PricedAmount> oxygen;
};

struct SoilInputs {
  Quantity retained;         // t/year
  Quantity nutrient_content; // fraction
  Quantity fertilizer_price; // RMB/t
  Quantity bulk_density;     // t/m3
  Quantity reservoir_share;  // fraction
  Quantity cleaning_price;   // RMB/m3
};

struct EducationSite {
  Quantity area;            // ha
  Quantity adjustment;      // dimensionless, >= 0
  Quantity income_per_area; // RMB/ha/year
};

// Disservices (added-cost valuation).

/// Repair cost of infrastructure damage: maintenance x repair share.
Quantity infrastructure_damage_value(const Quantity &maintenance,
                                     const Quantity &repair_share);
/// Artificial watering cost: ecological and agricultural water at their
/// respective prices.
Quantity water_deficit_value(const Quantity &eco_water,
                             const Quantity &eco_price,
                             const Quantity &agri_water,
                             const Quantity &agri_price);
/// Medical cost of plant-related disease. Incidence is read as an annual
/// rate, so population x incidence x share is patients per year.
Quantity disease_value(const Quantity &population,
                       std::span<const DiseaseTerm> diseases);

// Services.

Quantity food_raw_material_value(std::span<const PricedAmount> products,
                                 KernelOptions options = {});

/// Breakdown V_T, V_H, V_CO2, V_O2.
///
/// Temperature regulation follows ha x mm -> m3 -> kg -> kJ -> kWh, then
/// divides by the air-conditioner efficiency and prices the electricity.
/// Humidity regulation prices the electricity needed to evaporate the same
/// volume.
Valuation climate_regulation_value(const ClimateInputs &in,
                                   KernelOptions options = {});

/// Breakdown V_R (pollutant reduction) and V_Ianion (anion release).
Valuation air_quality_value(const Quantity &pollutant_reduced,
                            const Quantity &reduction_price,
                            const Quantity &anion_released,
                            const Quantity &anion_price);

Quantity water_quality_value(const Quantity &forest_purification,
                             const Quantity &wetland_purification,
                             const Quantity &purification_price);

/// Forest noise reduction expressed as soundproof-window equivalents times
/// the annualized cost of one window. Throws SingularityError for a
/// non-positive window capacity.
Quantity noise_reduction_value(const Quantity &forest_reduction,
                               const Quantity &window_reduction,
                               const Quantity &window_price);

/// Breakdown V_SN (nutrient retention) and V_SC (avoided cleaning).
Valuation soil_retention_value(const SoilInputs &in);

/// Breakdown V_Rec and V_Edu.
Valuation ecotourism_value(std::span<const PricedAmount> recreation,
                           std::span<const EducationSite> education);

// Generic, manifest-driven layer.

struct SlotSpec {
  std::string name;
  units::UnitDim dim;
};

struct ListSlotSpec {
  std::string name;
  std::vector<SlotSpec> fields;
};

struct KernelSignature {
  std::string id;
  std::vector<SlotSpec> scalars;
  std::vector<ListSlotSpec> lists;
};

struct KernelInputs {
  std::map<std::string, Quantity> scalars;
  std::map<std::string, std::vector<std::map<std::string, Quantity>>> lists;
};

/// Every kernel id, including the `prevalued` pass-through.
const std::vector<KernelSignature> &kernel_signatures();
const KernelSignature *find_kernel(std::string_view id);

/// Checks every slot's dimension before evaluating anything.
/// Throws StructuralError for unknown kernels or missing slots,
/// DimensionError for a wrong dimension, DomainError on bad values.
Valuation evaluate_kernel(std::string_view kernel_id, const KernelInputs &in,
                          KernelOptions options = {});

struct LedgerSummary {
  Quantity es_total;
  Quantity eds_total;
  Quantity net;
  std::map<std::string, double> shares_es;
  std::map<std::string, double> shares_eds;
  /// Absent when es_total is zero.
  std::optional<double> eds_to_es_ratio;
};

/// Sums each side in ascending item-id order. Disservices are stored as
/// positive losses; this is the one place their sign is applied.
/// Throws StructuralError on duplicate ids.
LedgerSummary build_ledger(std::span<const LineItemResult> items);

/// RMB/year.
const units::UnitDim &money_flow();

} // namespace esdv::kernels
