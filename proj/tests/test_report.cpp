#include <doctest.h>

#include <cstdio>

#include <json.hpp>

#include "esdv/report.hpp"
#include "support.hpp"

using namespace esdv;
using nlohmann::json;

namespace {

report::ReportDocument beijing_document() {
  auto m = test::beijing_model();
  auto p = test::beijing_params(m);
  auto bound = ingest::bind(m, p);
  REQUIRE(bound.ok());
  auto results = ingest::evaluate(bound.model);
  report::ReportDocument doc;
  doc.digest = report::inputs_digest(
      test::read_file(test::data_path("beijing2018.json")),
      test::read_file(test::data_path("beijing2018_params.csv")));
  doc.region = m.region;
  doc.year = m.year;
  for (std::size_t i = 0; i < results.size(); ++i)
    doc.items.push_back({results[i], m.items[i].kernel, m.items[i].node});
  doc.ledger = kernels::build_ledger(results);
  doc.cascade = taxonomy::validate_cascade(m.cascade);
  return doc;
}

std::string sig4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

} // namespace

TEST_CASE("sha256 matches the standard test vectors") {
  CHECK(report::sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(report::sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("inputs digest is stable and sensitive to both inputs") {
  std::string d = report::inputs_digest("manifest", "params");
  CHECK(d.rfind("sha256:", 0) == 0);
  CHECK(d.size() == 7 + 64);
  CHECK(d == report::inputs_digest("manifest", "params"));
  CHECK(d != report::inputs_digest("manifest ", "params"));
  CHECK(d != report::inputs_digest("manifest", "params "));
  // Concatenation boundaries matter.
  CHECK(report::inputs_digest("ab", "c") != report::inputs_digest("a", "bc"));
}

TEST_CASE("JSON report is canonical") {
  auto doc = beijing_document();
  std::string a = report::render_json(doc);
  std::string b = report::render_json(beijing_document());
  CHECK(a == b);
  CHECK(a.back() == '\n');

  json j = json::parse(a);
  CHECK(j.dump(2) + "\n" == a);
  CHECK(j["tool"]["name"] == "esdv");
  CHECK(j["ledger"]["unit"] == "RMB/year");
  CHECK(j["items"].size() == 8);
  CHECK(j["validation"]["cascade"].empty());
  CHECK_FALSE(j.contains("sensitivity"));

  // Keys appear in sorted order at every level.
  auto keys_sorted = [](const json &o) {
    std::vector<std::string> keys;
    for (auto it = o.begin(); it != o.end(); ++it)
      keys.push_back(it.key());
    return std::is_sorted(keys.begin(), keys.end());
  };
  CHECK(keys_sorted(j));
  CHECK(keys_sorted(j["ledger"]));
  CHECK(a.find("\"inputs_digest\"") < a.find("\"items\""));
}

TEST_CASE("JSON numbers round-trip exactly") {
  auto doc = beijing_document();
  json j = json::parse(report::render_json(doc));
  CHECK(j["ledger"]["net"].get<double>() == doc.ledger.net.magnitude());
  CHECK(j["ledger"]["es_total"].get<double>() ==
        doc.ledger.es_total.magnitude());
  CHECK(j["ledger"]["eds_total"].get<double>() ==
        doc.ledger.eds_total.magnitude());
  CHECK(j["ledger"]["eds_to_es_ratio"].get<double>() ==
        *doc.ledger.eds_to_es_ratio);
  for (std::size_t i = 0; i < doc.items.size(); ++i)
    CHECK(j["items"][i]["value"].get<double>() ==
          doc.items[i].result.value.magnitude());
  for (const auto &[id, share] : doc.ledger.shares_es)
    CHECK(j["ledger"]["shares_es"][id].get<double>() == share);
}

TEST_CASE("table agrees with JSON before display rounding") {
  auto doc = beijing_document();
  json j = json::parse(report::render_json(doc));
  std::string table = report::render_table(doc);
  for (const auto &item : j["items"]) {
    std::string value = sig4(item["value"].get<double>());
    CHECK_MESSAGE(table.find(value) != std::string::npos, value);
  }
  CHECK(table.find(sig4(j["ledger"]["net"].get<double>())) !=
        std::string::npos);
  CHECK(table.find("42.0%") != std::string::npos);
  CHECK(table.find("37.5%") != std::string::npos);
  CHECK(table.find("4.5%") != std::string::npos);
}

TEST_CASE("table sorts items by value within each side") {
  std::string table = report::render_table(beijing_document());
  auto pos = [&](const char *s) { return table.find(std::string("  ") + s); };
  CHECK(pos("ecotourism") < pos("climate_regulation"));
  CHECK(pos("climate_regulation") < pos("food_raw_material"));
  CHECK(pos("food_raw_material") < pos("environmental_quality"));
  CHECK(pos("environmental_quality") < pos("soil_retention"));
  CHECK(pos("soil_retention") < pos("water_deficit"));
  CHECK(pos("water_deficit") < pos("infrastructure_damage"));
  CHECK(pos("infrastructure_damage") < pos("disease_burden"));
}

TEST_CASE("empty model renders zero totals") {
  report::ReportDocument doc;
  doc.ledger = kernels::build_ledger({});
  json j = json::parse(report::render_json(doc));
  CHECK(j["ledger"]["es_total"] == 0.0);
  CHECK(j["ledger"]["eds_total"] == 0.0);
  CHECK(j["ledger"]["net"] == 0.0);
  CHECK(j["ledger"]["eds_to_es_ratio"].is_null());
  CHECK(j["items"].empty());
  CHECK(report::render_table(doc).find("Net value") != std::string::npos);
}

TEST_CASE("sensitivity section") {
  auto doc = beijing_document();
  sensitivity::SensitivityReport s;
  s.seed = 7;
  s.samples = 3;
  s.delta = 1e-3;
  s.elasticities = {{"M", -0.004}, {"Z", std::nullopt}};
  s.net = {1, 2, 3, 4};
  doc.sensitivity = s;
  json j = json::parse(report::render_json(doc));
  CHECK(j["sensitivity"]["seed"] == 7);
  CHECK(j["sensitivity"]["distribution"] == "uniform");
  CHECK(j["sensitivity"]["elasticities"]["M"] == -0.004);
  CHECK(j["sensitivity"]["elasticities"]["Z"].is_null());
  CHECK(j["sensitivity"]["net"]["p95"] == 4.0);
  std::string table = report::render_table(doc);
  CHECK(table.find("undefined") != std::string::npos);
  CHECK(table.find("Monte-Carlo (3 draws, seed 7, uniform)") !=
        std::string::npos);
}

TEST_CASE("binding findings carry stable codes") {
  ingest::BindError e{
      "water_deficit", "Pr_WE",
      "Pr_WE",         ingest::BindError::Kind::dimension_mismatch,
      "RMB/m3",        "RMB/t"};
  CHECK(report::binding_code(e) == "E-BIND-DIMENSION");
  e.kind = ingest::BindError::Kind::unresolved;
  CHECK(report::binding_code(e) == "E-BIND-UNRESOLVED");
}
