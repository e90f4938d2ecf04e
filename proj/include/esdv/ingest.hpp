#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "esdv/kernels.hpp"
#include "esdv/taxonomy.hpp"
#include "esdv/transfer.hpp"
#include "esdv/units.hpp"

namespace esdv::ingest {

using units::Parameter;

struct ParameterSet {
  std::string region;
  int reference_year = 0;
  std::map<std::string, Parameter> parameters;

  /// Throws StructuralError on a duplicate id.
  void add(Parameter p);
  const Parameter *find(std::string_view id) const;
  bool operator==(const ParameterSet &) const = default;
};

/// Parses `id,value,unit,source,year,method,low,high` (RFC 4180).
/// Magnitudes are normalized to scale 1. Throws LoadError naming the
/// 1-based record number (the header is record 1).
ParameterSet parse_params_csv(std::string_view bytes);

/// Rows sorted by id, canonical units, shortest round-trip numbers.
std::string serialize_params_csv(const ParameterSet &set);

/// Scalar slots map to one parameter id; list slots hold one
/// field -> parameter id mapping per element.
struct SlotBinding {
  std::map<std::string, std::string> scalars;
  std::map<std::string, std::vector<std::map<std::string, std::string>>> lists;

  bool operator==(const SlotBinding &) const = default;
};

struct LineItem {
  std::string id;
  std::string kernel;
  kernels::Side side = kernels::Side::ES;
  taxonomy::FunctionalClass functional_class =
      taxonomy::FunctionalClass::Regulating;
  std::string node;
  SlotBinding slots;

  bool operator==(const LineItem &) const = default;
};

struct ValuationModel {
  std::string region;
  int year = 0;
  bool strict = false;
  taxonomy::CascadeGraph cascade;
  std::vector<transfer::TransferRecord> transfers;
  std::vector<LineItem> items;

  bool operator==(const ValuationModel &) const = default;
};

/// Structural load only; cascade and double-counting checks are separate.
/// Throws LoadError prefixed with the JSON path of the offending value.
ValuationModel parse_model_manifest(std::string_view bytes);

/// Canonical JSON (sorted keys, two-space indent, trailing newline).
std::string serialize_model_manifest(const ValuationModel &model);

/// Adds the parameters derived by the model's transfers.
/// Throws LoadError when a derived id is already present.
ParameterSet with_transfers(const ValuationModel &model,
                            const ParameterSet &params);

struct BindError {
  enum class Kind { unresolved, dimension_mismatch };

  std::string item;
  std::string slot; // "M" or "diseases[1].alpha"
  std::string parameter;
  Kind kind = Kind::unresolved;
  std::string expected;
  std::string actual;

  std::string message() const;
  auto operator<=>(const BindError &) const = default;
};

struct BoundItem {
  LineItem item;
  kernels::KernelInputs inputs;
  /// Slot path -> parameter id, used to name the culprit of a domain error.
  std::map<std::string, std::string> sources;
};

struct BoundModel {
  std::vector<BoundItem> items;
  kernels::KernelOptions options;
};

struct BindResult {
  BoundModel model;
  /// Every unresolved slot and dimension mismatch, sorted by (item, slot).
  std::vector<BindError> errors;

  bool ok() const noexcept { return errors.empty(); }
};

BindResult bind(const ValuationModel &model, const ParameterSet &params);

/// Evaluates every bound item in model order. Throws EvaluationError naming
/// the item and parameter when a kernel rejects a value.
std::vector<kernels::LineItemResult> evaluate(const BoundModel &model);

/// Binds and evaluates in one step; throws StructuralError if binding fails.
std::vector<kernels::LineItemResult> evaluate(const ValuationModel &model,
                                              const ParameterSet &params);

} // namespace esdv::ingest
