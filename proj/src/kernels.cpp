#include "esdv/kernels.hpp"

#include <algorithm>
#include <stdexcept>

namespace esdv::kernels {

using units::parse_unit;
using units::require_dim;
using units::UnitDim;

namespace {

const UnitDim &dim_of(std::string_view text) {
  static const std::map<std::string, UnitDim, std::less<>> table = [] {
    std::map<std::string, UnitDim, std::less<>> m;
    for (const char *u :
         {"one", "RMB/year", "m3/year", "RMB/m3", "person", "RMB/person",
          "t/year", "RMB/t", "ha", "mm/year", "kJ/kg", "RMB/kWh", "kWh/m3",
          "dB/year", "t/m3", "person/year", "RMB/ha/year"})
      m.emplace(u, parse_unit(u));
    return m;
  }();
  auto it = table.find(text);
  if (it == table.end())
    throw std::logic_error("kernel unit '" + std::string(text) +
                           "' missing from table");
  return it->second;
}

Quantity zero_flow() { return Quantity(0.0, money_flow()); }

void non_negative(const Quantity &q, std::string_view slot) {
  if (q.magnitude() < 0.0)
    throw DomainError(std::string(slot),
                      "'" + std::string(slot) + "' must be non-negative");
}

void fraction(const Quantity &q, std::string_view slot) {
  if (q.magnitude() < 0.0 || q.magnitude() > 1.0)
    throw DomainError(std::string(slot),
                      "'" + std::string(slot) + "' must lie in [0, 1]");
}

/// Dimension check plus non-negativity, the common case for amounts and
/// prices.
void amount(const Quantity &q, std::string_view unit, std::string_view slot) {
  require_dim(q, dim_of(unit), slot);
  non_negative(q, slot);
}

std::string indexed(std::string_view list, std::size_t i,
                    std::string_view field) {
  return std::string(list) + "[" + std::to_string(i) + "]." +
         std::string(field);
}

Quantity priced_sum(std::span<const PricedAmount> terms, std::string_view list,
                    std::string_view amount_unit, std::string_view price_unit,
                    std::string_view amount_field = "amount",
                    std::string_view price_field = "price") {
  Quantity total = zero_flow();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    amount(terms[i].amount, amount_unit, indexed(list, i, amount_field));
    amount(terms[i].price, price_unit, indexed(list, i, price_field));
  }
  for (const auto &t : terms)
    total = total + t.amount * t.price;
  return total;
}

void require_count(std::size_t actual, std::size_t expected,
                   std::string_view list) {
  if (actual != expected)
    throw DomainError(std::string(list),
                      "strict mode expects " + std::to_string(expected) + " '" +
                          std::string(list) + "' terms, got " +
                          std::to_string(actual));
}

} // namespace

const UnitDim &money_flow() {
  static const UnitDim d = parse_unit("RMB/year");
  return d;
}

std::string_view to_string(Side s) { return s == Side::ES ? "ES" : "EDS"; }

Side side_from_string(std::string_view s) {
  if (s == "ES")
    return Side::ES;
  if (s == "EDS")
    return Side::EDS;
  throw std::invalid_argument("unknown side '" + std::string(s) + "'");
}

Quantity infrastructure_damage_value(const Quantity &maintenance,
                                     const Quantity &repair_share) {
  amount(maintenance, "RMB/year", "M");
  require_dim(repair_share, dim_of("one"), "P_T");
  fraction(repair_share, "P_T");
  return maintenance * repair_share;
}

Quantity water_deficit_value(const Quantity &eco_water,
                             const Quantity &eco_price,
                             const Quantity &agri_water,
                             const Quantity &agri_price) {
  amount(eco_water, "m3/year", "A_E");
  amount(eco_price, "RMB/m3", "Pr_WE");
  amount(agri_water, "m3/year", "A_A");
  amount(agri_price, "RMB/m3", "Pr_WA");
  return eco_water * eco_price + agri_water * agri_price;
}

Quantity disease_value(const Quantity &population,
                       std::span<const DiseaseTerm> diseases) {
  amount(population, "person", "Pop");
  for (std::size_t i = 0; i < diseases.size(); ++i) {
    const auto &d = diseases[i];
    require_dim(d.incidence, dim_of("one"), indexed("diseases", i, "alpha"));
    fraction(d.incidence, indexed("diseases", i, "alpha"));
    require_dim(d.plant_share, dim_of("one"), indexed("diseases", i, "beta"));
    fraction(d.plant_share, indexed("diseases", i, "beta"));
    amount(d.cost_per_patient, "RMB/person", indexed("diseases", i, "C"));
  }
  static const Quantity per_year = units::qty(1.0, "year");
  Quantity total = zero_flow();
  for (const auto &d : diseases)
    total = total + population * d.incidence * d.plant_share *
                        d.cost_per_patient / per_year;
  return total;
}

Quantity food_raw_material_value(std::span<const PricedAmount> products,
                                 KernelOptions options) {
  if (options.strict)
    require_count(products.size(), 4, "products");
  return priced_sum(products, "products", "t/year", "RMB/t", "Pro", "Pr");
}

Valuation climate_regulation_value(const ClimateInputs &in,
                                   KernelOptions options) {
  amount(in.wetland_area, "ha", "A_W");
  amount(in.evaporation, "mm/year", "ET_avg");
  amount(in.vaporization_heat, "kJ/kg", "Va");
  require_dim(in.ac_efficiency, dim_of("one"), "Ef");
  if (in.ac_efficiency.magnitude() <= 0.0)
    throw DomainError("Ef", "'Ef' must be positive");
  amount(in.electricity_price, "RMB/kWh", "Pr_E");
  amount(in.humidify_energy, "kWh/m3", "X");
  if (options.strict) {
    require_count(in.carbon.size(), 3, "carbon");
    require_count(in.oxygen.size(), 4, "oxygen");
  }
  Quantity v_co2 = priced_sum(in.carbon, "carbon", "t/year", "RMB/t");
  Quantity v_o2 = priced_sum(in.oxygen, "oxygen", "t/year", "RMB/t");

  static const Quantity one_year = units::qty(1.0, "year");
  static const Quantity water_density = units::qty(1.0, "t/m3");
  Quantity evaporated = units::convert_area_depth_to_volume(
                            in.wetland_area, in.evaporation * one_year) /
                        one_year;
  // Energy is carried in kJ and the electricity price in RMB/kJ after
  // normalization, which folds in the kWh step (1 kWh = 3600 kJ).
  Quantity heat = evaporated * water_density * in.vaporization_heat;
  Quantity v_t = heat / in.ac_efficiency * in.electricity_price;
  Quantity v_h = evaporated * in.humidify_energy * in.electricity_price;

  Valuation out;
  out.value = v_t + v_h + v_co2 + v_o2;
  out.breakdown = {
      {"V_T", v_t}, {"V_H", v_h}, {"V_CO2", v_co2}, {"V_O2", v_o2}};
  return out;
}

Valuation air_quality_value(const Quantity &pollutant_reduced,
                            const Quantity &reduction_price,
                            const Quantity &anion_released,
                            const Quantity &anion_price) {
  amount(pollutant_reduced, "t/year", "R");
  amount(reduction_price, "RMB/t", "Pr_R");
  amount(anion_released, "t/year", "I");
  amount(anion_price, "RMB/t", "Pr_I");
  Quantity v_r = pollutant_reduced * reduction_price;
  Quantity v_i = anion_released * anion_price;
  return {v_r + v_i, {{"V_R", v_r}, {"V_Ianion", v_i}}};
}

Quantity water_quality_value(const Quantity &forest_purification,
                             const Quantity &wetland_purification,
                             const Quantity &purification_price) {
  amount(forest_purification, "t/year", "W_F");
  amount(wetland_purification, "t/year", "W_W");
  amount(purification_price, "RMB/t", "Pr_WQ");
  return (forest_purification + wetland_purification) * purification_price;
}

Quantity noise_reduction_value(const Quantity &forest_reduction,
                               const Quantity &window_reduction,
                               const Quantity &window_price) {
  amount(forest_reduction, "dB/year", "N_F");
  require_dim(window_reduction, dim_of("dB/year"), "N_R");
  if (window_reduction.magnitude() <= 0.0)
    throw SingularityError("N_R", "'N_R' must be positive");
  amount(window_price, "RMB/year", "Pr_N");
  return forest_reduction / window_reduction * window_price;
}

Valuation soil_retention_value(const SoilInputs &in) {
  amount(in.retained, "t/year", "R_S");
  require_dim(in.nutrient_content, dim_of("one"), "N_SN");
  fraction(in.nutrient_content, "N_SN");
  amount(in.fertilizer_price, "RMB/t", "Pr_SN");
  require_dim(in.bulk_density, dim_of("t/m3"), "rho_S");
  if (in.bulk_density.magnitude() <= 0.0)
    throw SingularityError("rho_S", "'rho_S' must be positive");
  require_dim(in.reservoir_share, dim_of("one"), "P_SC");
  fraction(in.reservoir_share, "P_SC");
  amount(in.cleaning_price, "RMB/m3", "Pr_SC");

  Quantity v_sn = in.retained * in.nutrient_content * in.fertilizer_price;
  Quantity v_sc =
      in.retained / in.bulk_density * in.reservoir_share * in.cleaning_price;
  return {v_sn + v_sc, {{"V_SN", v_sn}, {"V_SC", v_sc}}};
}

Valuation ecotourism_value(std::span<const PricedAmount> recreation,
                           std::span<const EducationSite> education) {
  Quantity v_rec = priced_sum(recreation, "recreation", "person/year",
                              "RMB/person", "visitors", "fee");
  for (std::size_t i = 0; i < education.size(); ++i) {
    amount(education[i].area, "ha", indexed("education", i, "A"));
    amount(education[i].adjustment, "one", indexed("education", i, "X"));
    amount(education[i].income_per_area, "RMB/ha/year",
           indexed("education", i, "In"));
  }
  Quantity v_edu = zero_flow();
  for (const auto &e : education)
    v_edu = v_edu + e.area * e.adjustment * e.income_per_area;
  return {v_rec + v_edu, {{"V_Rec", v_rec}, {"V_Edu", v_edu}}};
}

// ---------------------------------------------------------------------------

const std::vector<KernelSignature> &kernel_signatures() {
  static const std::vector<KernelSignature> table = [] {
    auto s = [](std::string name, std::string_view unit) {
      return SlotSpec{std::move(name), dim_of(unit)};
    };
    std::vector<KernelSignature> t;
    t.push_back({"infra_damage", {s("M", "RMB/year"), s("P_T", "one")}, {}});
    t.push_back({"water_deficit",
                 {s("A_E", "m3/year"), s("Pr_WE", "RMB/m3"),
                  s("A_A", "m3/year"), s("Pr_WA", "RMB/m3")},
                 {}});
    t.push_back(
        {"disease_burden",
         {s("Pop", "person")},
         {{"diseases",
           {s("alpha", "one"), s("beta", "one"), s("C", "RMB/person")}}}});
    t.push_back({"food_raw_material",
                 {},
                 {{"products", {s("Pro", "t/year"), s("Pr", "RMB/t")}}}});
    t.push_back({"climate_regulation",
                 {s("A_W", "ha"), s("ET_avg", "mm/year"), s("Va", "kJ/kg"),
                  s("Ef", "one"), s("Pr_E", "RMB/kWh"), s("X", "kWh/m3")},
                 {{"carbon", {s("amount", "t/year"), s("price", "RMB/t")}},
                  {"oxygen", {s("amount", "t/year"), s("price", "RMB/t")}}}});
    t.push_back({"air_quality",
                 {s("R", "t/year"), s("Pr_R", "RMB/t"), s("I", "t/year"),
                  s("Pr_I", "RMB/t")},
                 {}});
    t.push_back({"water_quality",
                 {s("W_F", "t/year"), s("W_W", "t/year"), s("Pr_WQ", "RMB/t")},
                 {}});
    t.push_back(
        {"noise_reduction",
         {s("N_F", "dB/year"), s("N_R", "dB/year"), s("Pr_N", "RMB/year")},
         {}});
    t.push_back({"soil_retention",
                 {s("R_S", "t/year"), s("N_SN", "one"), s("Pr_SN", "RMB/t"),
                  s("rho_S", "t/m3"), s("P_SC", "one"), s("Pr_SC", "RMB/m3")},
                 {}});
    t.push_back({"ecotourism",
                 {},
                 {{"recreation",
                   {s("visitors", "person/year"), s("fee", "RMB/person")}},
                  {"education",
                   {s("A", "ha"), s("X", "one"), s("In", "RMB/ha/year")}}}});
    t.push_back({"prevalued", {s("value", "RMB/year")}, {}});
    return t;
  }();
  return table;
}

const KernelSignature *find_kernel(std::string_view id) {
  for (const auto &k : kernel_signatures())
    if (k.id == id)
      return &k;
  return nullptr;
}

namespace {

void check_inputs(const KernelSignature &sig, const KernelInputs &in) {
  for (const auto &[name, q] : in.scalars) {
    (void)q;
    if (std::none_of(sig.scalars.begin(), sig.scalars.end(),
                     [&](const SlotSpec &s) { return s.name == name; }))
      throw StructuralError("kernel '" + sig.id + "' has no slot '" + name +
                            "'");
  }
  for (const auto &[name, rows] : in.lists) {
    (void)rows;
    if (std::none_of(sig.lists.begin(), sig.lists.end(),
                     [&](const ListSlotSpec &s) { return s.name == name; }))
      throw StructuralError("kernel '" + sig.id + "' has no list slot '" +
                            name + "'");
  }
  for (const auto &slot : sig.scalars) {
    auto it = in.scalars.find(slot.name);
    if (it == in.scalars.end())
      throw StructuralError("kernel '" + sig.id + "': missing slot '" +
                            slot.name + "'");
    require_dim(it->second, slot.dim, slot.name);
  }
  for (const auto &list : sig.lists) {
    auto it = in.lists.find(list.name);
    if (it == in.lists.end())
      throw StructuralError("kernel '" + sig.id + "': missing list slot '" +
                            list.name + "'");
    for (std::size_t i = 0; i < it->second.size(); ++i) {
      const auto &row = it->second[i];
      if (row.size() != list.fields.size())
        throw StructuralError("kernel '" + sig.id + "': " + list.name + "[" +
                              std::to_string(i) + "] must have exactly " +
                              std::to_string(list.fields.size()) + " fields");
      for (const auto &field : list.fields) {
        auto f = row.find(field.name);
        if (f == row.end())
          throw StructuralError("kernel '" + sig.id + "': missing field '" +
                                indexed(list.name, i, field.name) + "'");
        require_dim(f->second, field.dim, indexed(list.name, i, field.name));
      }
    }
  }
}

std::vector<PricedAmount> priced_rows(const KernelInputs &in,
                                      const std::string &list,
                                      const std::string &amount_field,
                                      const std::string &price_field) {
  std::vector<PricedAmount> out;
  for (const auto &row : in.lists.at(list))
    out.push_back({row.at(amount_field), row.at(price_field)});
  return out;
}

} // namespace

Valuation evaluate_kernel(std::string_view kernel_id, const KernelInputs &in,
                          KernelOptions options) {
  const KernelSignature *sig = find_kernel(kernel_id);
  if (!sig)
    throw StructuralError("unknown kernel '" + std::string(kernel_id) + "'");
  check_inputs(*sig, in);
  const auto &s = in.scalars;
  const std::string id = sig->id;

  if (id == "infra_damage")
    return {infrastructure_damage_value(s.at("M"), s.at("P_T")), {}};
  if (id == "water_deficit")
    return {water_deficit_value(s.at("A_E"), s.at("Pr_WE"), s.at("A_A"),
                                s.at("Pr_WA")),
            {}};
  if (id == "disease_burden") {
    std::vector<DiseaseTerm> terms;
    for (const auto &row : in.lists.at("diseases"))
      terms.push_back({row.at("alpha"), row.at("beta"), row.at("C")});
    return {disease_value(s.at("Pop"), terms), {}};
  }
  if (id == "food_raw_material")
    return {food_raw_material_value(priced_rows(in, "products", "Pro", "Pr"),
                                    options),
            {}};
  if (id == "climate_regulation") {
    ClimateInputs c{s.at("A_W"),
                    s.at("ET_avg"),
                    s.at("Va"),
                    s.at("Ef"),
                    s.at("Pr_E"),
                    s.at("X"),
                    priced_rows(in, "carbon", "amount", "price"),
                    priced_rows(in, "oxygen", "amount", "price")};
    return climate_regulation_value(c, options);
  }
  if (id == "air_quality")
    return air_quality_value(s.at("R"), s.at("Pr_R"), s.at("I"), s.at("Pr_I"));
  if (id == "water_quality")
    return {water_quality_value(s.at("W_F"), s.at("W_W"), s.at("Pr_WQ")), {}};
  if (id == "noise_reduction")
    return {noise_reduction_value(s.at("N_F"), s.at("N_R"), s.at("Pr_N")), {}};
  if (id == "soil_retention")
    return soil_retention_value({s.at("R_S"), s.at("N_SN"), s.at("Pr_SN"),
                                 s.at("rho_S"), s.at("P_SC"), s.at("Pr_SC")});
  if (id == "ecotourism") {
    std::vector<EducationSite> edu;
    for (const auto &row : in.lists.at("education"))
      edu.push_back({row.at("A"), row.at("X"), row.at("In")});
    return ecotourism_value(priced_rows(in, "recreation", "visitors", "fee"),
                            edu);
  }
  // prevalued
  const Quantity &v = s.at("value");
  non_negative(v, "value");
  return {v, {}};
}

LedgerSummary build_ledger(std::span<const LineItemResult> items) {
  std::vector<const LineItemResult *> sorted;
  sorted.reserve(items.size());
  for (const auto &item : items) {
    require_dim(item.value, money_flow(), item.id);
    sorted.push_back(&item);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const auto *a, const auto *b) { return a->id < b->id; });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i]->id == sorted[i - 1]->id)
      throw StructuralError("duplicate line item id '" + sorted[i]->id + "'");

  LedgerSummary out;
  out.es_total = zero_flow();
  out.eds_total = zero_flow();
  for (const auto *item : sorted) {
    Quantity &total = item->side == Side::ES ? out.es_total : out.eds_total;
    total = total + item->value;
  }
  out.net = out.es_total - out.eds_total;

  for (const auto *item : sorted) {
    bool es = item->side == Side::ES;
    double total = (es ? out.es_total : out.eds_total).magnitude();
    if (total > 0.0)
      (es ? out.shares_es : out.shares_eds)[item->id] =
          item->value.magnitude() / total;
  }
  if (out.es_total.magnitude() != 0.0)
    out.eds_to_es_ratio = out.eds_total.magnitude() / out.es_total.magnitude();
  return out;
}

} // namespace esdv::kernels
