#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "esdv/ingest.hpp"
#include "esdv/kernels.hpp"
#include "esdv/sensitivity.hpp"
#include "esdv/taxonomy.hpp"

namespace esdv::report {

inline constexpr std::string_view tool_name = "esdv";
inline constexpr std::string_view tool_version = "0.1.0";

std::string sha256_hex(std::string_view bytes);

/// "sha256:<hex>" over the digests of the manifest and parameter bytes.
std::string inputs_digest(std::string_view manifest_bytes,
                          std::string_view params_bytes);

struct ReportItem {
  kernels::LineItemResult result;
  std::string kernel;
  std::string node;
};

/// Everything one run produced. Monetary values are RMB/year at scale 1.
struct ReportDocument {
  std::string digest;
  std::string region;
  int year = 0;
  std::vector<ReportItem> items;
  kernels::LedgerSummary ledger;
  taxonomy::ValidationReport cascade;
  taxonomy::ValidationReport double_counting;
  std::vector<ingest::BindError> binding;
  std::optional<sensitivity::SensitivityReport> sensitivity;
};

/// Canonical JSON: sorted keys, shortest round-trip numbers, two-space
/// indent, trailing newline.
std::string render_json(const ReportDocument &doc);

/// Human-readable ledger: items by descending value within each side,
/// 4 significant figures, shares to 0.1 %.
std::string render_table(const ReportDocument &doc);

/// Stable finding codes for binding errors.
std::string_view binding_code(const ingest::BindError &e);

} // namespace esdv::report
