#include "esdv/report.hpp"

#include <algorithm>
#include <cstdio>

#include <openssl/evp.h>

#include <json.hpp>

namespace esdv::report {

using nlohmann::json;

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1)
    throw Error("sha256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string inputs_digest(std::string_view manifest_bytes,
                          std::string_view params_bytes) {
  return "sha256:" +
         sha256_hex(sha256_hex(manifest_bytes) + sha256_hex(params_bytes));
}

std::string_view binding_code(const ingest::BindError &e) {
  return e.kind == ingest::BindError::Kind::unresolved ? "E-BIND-UNRESOLVED"
                                                       : "E-BIND-DIMENSION";
}

namespace {

json violations_json(const taxonomy::ValidationReport &r) {
  json out = json::array();
  for (const auto &v : r.violations)
    out.push_back(
        {{"code", v.code}, {"nodes", v.nodes}, {"message", v.message}});
  return out;
}

json stats_json(const sensitivity::Statistics &s) {
  return {{"mean", s.mean}, {"sd", s.sd}, {"p5", s.p5}, {"p95", s.p95}};
}

std::string sig4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string percent1(double fraction) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.1f%%", fraction * 100.0);
  return buf;
}

std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width)
    s.append(width - s.size(), ' ');
  return s;
}

std::string pad_left(std::string s, std::size_t width) {
  if (s.size() < width)
    s.insert(0, width - s.size(), ' ');
  return s;
}

} // namespace

std::string render_json(const ReportDocument &doc) {
  json items = json::array();
  for (const auto &it : doc.items) {
    json breakdown = json::object();
    for (const auto &[k, q] : it.result.breakdown)
      breakdown[k] = q.magnitude();
    items.push_back({{"id", it.result.id},
                     {"kernel", it.kernel},
                     {"node", it.node},
                     {"side", kernels::to_string(it.result.side)},
                     {"class", taxonomy::to_string(it.result.functional_class)},
                     {"value", it.result.value.magnitude()},
                     {"breakdown", breakdown}});
  }

  const auto &l = doc.ledger;
  json ledger = {{"unit", "RMB/year"},
                 {"es_total", l.es_total.magnitude()},
                 {"eds_total", l.eds_total.magnitude()},
                 {"net", l.net.magnitude()},
                 {"shares_es", l.shares_es},
                 {"shares_eds", l.shares_eds},
                 {"eds_to_es_ratio", nullptr}};
  if (l.eds_to_es_ratio)
    ledger["eds_to_es_ratio"] = *l.eds_to_es_ratio;

  json binding = json::array();
  for (const auto &e : doc.binding)
    binding.push_back({{"code", binding_code(e)},
                       {"item", e.item},
                       {"slot", e.slot},
                       {"parameter", e.parameter},
                       {"message", e.message()}});

  json out = {
      {"tool", {{"name", tool_name}, {"version", tool_version}}},
      {"inputs_digest", doc.digest},
      {"region", doc.region},
      {"year", doc.year},
      {"items", items},
      {"ledger", ledger},
      {"validation",
       {{"cascade", violations_json(doc.cascade)},
        {"double_counting", violations_json(doc.double_counting)},
        {"binding", binding}}},
  };

  if (doc.sensitivity) {
    const auto &s = *doc.sensitivity;
    json elasticities = json::object();
    for (const auto &[id, e] : s.elasticities)
      elasticities[id] = e ? json(*e) : json(nullptr);
    out["sensitivity"] = {
        {"seed", s.seed},
        {"samples", s.samples},
        {"distribution", sensitivity::to_string(s.distribution)},
        {"delta", s.delta},
        {"rejected_draws", s.rejected_draws},
        {"elasticities", elasticities},
        {"es_total", stats_json(s.es_total)},
        {"eds_total", stats_json(s.eds_total)},
        {"net", stats_json(s.net)},
    };
  }
  return out.dump(2) + "\n";
}

std::string render_table(const ReportDocument &doc) {
  constexpr std::size_t name_w = 28, value_w = 12, share_w = 9;
  std::string out = "Ecosystem service ledger";
  if (!doc.region.empty())
    out += ": " + doc.region + " " + std::to_string(doc.year);
  out += " (RMB/year)\n";

  const auto &l = doc.ledger;
  auto side_block = [&](kernels::Side side, const std::string &title) {
    std::vector<const ReportItem *> rows;
    for (const auto &it : doc.items)
      if (it.result.side == side)
        rows.push_back(&it);
    std::stable_sort(
        rows.begin(), rows.end(), [](const auto *a, const auto *b) {
          if (a->result.value.magnitude() != b->result.value.magnitude())
            return a->result.value.magnitude() > b->result.value.magnitude();
          return a->result.id < b->result.id;
        });
    const auto &shares = side == kernels::Side::ES ? l.shares_es : l.shares_eds;
    const auto &total = side == kernels::Side::ES ? l.es_total : l.eds_total;
    out += "\n" + pad_right(title, name_w) + pad_left("value", value_w) +
           pad_left("share", share_w) + "\n";
    for (const auto *r : rows) {
      auto s = shares.find(r->result.id);
      out += pad_right("  " + r->result.id, name_w) +
             pad_left(sig4(r->result.value.magnitude()), value_w) +
             pad_left(s == shares.end() ? "-" : percent1(s->second), share_w) +
             "\n";
    }
    out += pad_right("  total", name_w) +
           pad_left(sig4(total.magnitude()), value_w) + "\n";
  };
  side_block(kernels::Side::ES, "Services (ES)");
  side_block(kernels::Side::EDS, "Disservices (EDS)");

  out += "\n" + pad_right("Net value", name_w) +
         pad_left(sig4(l.net.magnitude()), value_w) + "\n";
  out += pad_right("EDS / ES", name_w) +
         pad_left(l.eds_to_es_ratio ? percent1(*l.eds_to_es_ratio) : "-",
                  value_w) +
         "\n";

  if (doc.sensitivity) {
    const auto &s = *doc.sensitivity;
    out += "\nMonte-Carlo (" + std::to_string(s.samples) + " draws, seed " +
           std::to_string(s.seed) + ", " +
           std::string(sensitivity::to_string(s.distribution)) + ")\n";
    out += pad_right("", name_w) + pad_left("mean", value_w) +
           pad_left("sd", value_w) + pad_left("p5", value_w) +
           pad_left("p95", value_w) + "\n";
    auto stat_row = [&](const std::string &name,
                        const sensitivity::Statistics &st) {
      out += pad_right("  " + name, name_w) + pad_left(sig4(st.mean), value_w) +
             pad_left(sig4(st.sd), value_w) + pad_left(sig4(st.p5), value_w) +
             pad_left(sig4(st.p95), value_w) + "\n";
    };
    stat_row("es_total", s.es_total);
    stat_row("eds_total", s.eds_total);
    stat_row("net", s.net);
    out += "\nElasticity of net value (delta " + sig4(s.delta) + ")\n";
    for (const auto &[id, e] : s.elasticities)
      out += pad_right("  " + id, name_w) +
             pad_left(e ? sig4(*e) : "undefined", value_w) + "\n";
  }
  return out;
}

} // namespace esdv::report
