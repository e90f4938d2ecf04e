#include "esdv/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <json.hpp>

namespace esdv::ingest {

using nlohmann::json;
using units::Quantity;

void ParameterSet::add(Parameter p) {
  std::string id = p.id();
  if (!parameters.emplace(id, std::move(p)).second)
    throw StructuralError("duplicate parameter id '" + id + "'");
}

const Parameter *ParameterSet::find(std::string_view id) const {
  auto it = parameters.find(std::string(id));
  return it == parameters.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

constexpr std::string_view csv_header =
    "id,value,unit,source,year,method,low,high";

struct CsvRecord {
  std::size_t number; // 1-based, header is 1
  std::vector<std::string> fields;
};

std::vector<CsvRecord> split_csv(std::string_view text) {
  std::vector<CsvRecord> records;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false, field_started = false;
  std::size_t number = 1;

  auto end_record = [&] {
    fields.push_back(std::move(field));
    field.clear();
    bool blank = fields.size() == 1 && fields[0].empty() && !field_started;
    if (!blank)
      records.push_back({number, std::move(fields)});
    fields.clear();
    field_started = false;
    ++number;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
    case '"':
      if (!field.empty())
        throw LoadError("params csv record " + std::to_string(number) +
                        ": stray quote inside unquoted field");
      quoted = field_started = true;
      break;
    case ',':
      fields.push_back(std::move(field));
      field.clear();
      field_started = true;
      break;
    case '\r':
      if (i + 1 < text.size() && text[i + 1] == '\n')
        break;
      end_record();
      break;
    case '\n':
      end_record();
      break;
    default:
      field += c;
      field_started = true;
    }
  }
  if (quoted)
    throw LoadError("params csv record " + std::to_string(number) +
                    ": unterminated quoted field");
  if (field_started || !field.empty() || !fields.empty())
    end_record();
  return records;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string csv_escape(const std::string &s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + '"';
}

template <class T> bool parse_full(const std::string &s, T &out) {
  const char *first = s.data();
  const char *last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return !s.empty() && ec == std::errc() && ptr == last;
}

} // namespace

ParameterSet parse_params_csv(std::string_view bytes) {
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF")
    bytes.remove_prefix(3);
  auto records = split_csv(bytes);
  if (records.empty())
    throw LoadError("params csv: missing header");
  {
    std::string header;
    for (const auto &f : records.front().fields)
      header += (header.empty() ? "" : ",") + f;
    if (records.front().number != 1 || header != csv_header)
      throw LoadError("params csv record 1: header must be exactly '" +
                      std::string(csv_header) + "'");
  }

  ParameterSet set;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto &rec = records[r];
    auto fail = [&](const std::string &msg) -> LoadError {
      return LoadError("params csv record " + std::to_string(rec.number) +
                       ": " + msg);
    };
    if (rec.fields.size() != 8)
      throw fail("expected 8 fields, got " + std::to_string(rec.fields.size()));
    const auto &f = rec.fields;
    const std::string &id = f[0];
    if (id.empty())
      throw fail("empty id");

    units::UnitDim unit;
    try {
      unit = units::parse_unit(f[2]);
    } catch (const ParseError &e) {
      throw fail("unparsable unit '" + f[2] + "', token '" + e.token() +
                 "' at byte " + std::to_string(e.offset()));
    }
    double value = 0.0;
    if (!parse_full(f[1], value) || !std::isfinite(value))
      throw fail("non-numeric value '" + f[1] + "'");
    int year = 0;
    if (!parse_full(f[4], year))
      throw fail("non-integer year '" + f[4] + "'");
    units::Method method;
    try {
      method = units::method_from_string(f[5]);
    } catch (const std::invalid_argument &) {
      throw fail("unknown method '" + f[5] + "'");
    }

    std::optional<units::Interval> interval;
    if (!f[6].empty() || !f[7].empty()) {
      double low = 0.0, high = 0.0;
      if (!parse_full(f[6], low) || !std::isfinite(low))
        throw fail("non-numeric low '" + f[6] + "'");
      if (!parse_full(f[7], high) || !std::isfinite(high))
        throw fail("non-numeric high '" + f[7] + "'");
      if (low > high)
        throw fail("low > high");
      interval = units::Interval{Quantity(low, unit).magnitude(),
                                 Quantity(high, unit).magnitude()};
    }

    try {
      set.add(
          Parameter(id, Quantity(value, unit), {f[3], year, method}, interval));
    } catch (const Error &e) {
      throw fail(e.what());
    }
  }
  return set;
}

std::string serialize_params_csv(const ParameterSet &set) {
  std::string out(csv_header);
  out += '\n';
  for (const auto &[id, p] : set.parameters) {
    out += csv_escape(id) + ',' + format_number(p.quantity().magnitude()) +
           ',' + csv_escape(units::format_unit(p.quantity().unit())) + ',' +
           csv_escape(p.provenance().source) + ',' +
           std::to_string(p.provenance().year) + ',' +
           std::string(units::to_string(p.provenance().method)) + ',';
    if (p.uncertainty())
      out += format_number(p.uncertainty()->low) + ',' +
             format_number(p.uncertainty()->high);
    else
      out += ',';
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

[[noreturn]] void schema_fail(const std::string &path, const std::string &msg) {
  throw LoadError(path + ": " + msg);
}

const json &member(const json &obj, const std::string &key,
                   const std::string &path) {
  auto it = obj.find(key);
  if (it == obj.end())
    schema_fail(path, "missing required key '" + key + "'");
  return *it;
}

std::string get_string(const json &obj, const std::string &key,
                       const std::string &path) {
  const json &v = member(obj, key, path);
  if (!v.is_string())
    schema_fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

int get_int(const json &obj, const std::string &key, const std::string &path) {
  const json &v = member(obj, key, path);
  if (!v.is_number_integer())
    schema_fail(path + "." + key, "expected an integer");
  return v.get<int>();
}

const json &get_array(const json &obj, const std::string &key,
                      const std::string &path) {
  const json &v = member(obj, key, path);
  if (!v.is_array())
    schema_fail(path + "." + key, "expected an array");
  return v;
}

void require_object(const json &v, const std::string &path) {
  if (!v.is_object())
    schema_fail(path, "expected an object");
}

void only_keys(const json &obj, std::initializer_list<std::string_view> keys,
               const std::string &path) {
  for (const auto &[k, v] : obj.items()) {
    (void)v;
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      schema_fail(path, "unknown key '" + k + "'");
  }
}

template <class F>
auto parse_token(F &&from_string, const std::string &token,
                 const std::string &path) {
  try {
    return from_string(token);
  } catch (const std::invalid_argument &e) {
    schema_fail(path, e.what());
  }
}

Quantity parse_quantity(const json &v, const std::string &path) {
  require_object(v, path);
  only_keys(v, {"value", "unit"}, path);
  const json &value = member(v, "value", path);
  if (!value.is_number())
    schema_fail(path + ".value", "expected a number");
  std::string unit = get_string(v, "unit", path);
  try {
    return Quantity(value.get<double>(), units::parse_unit(unit));
  } catch (const Error &e) {
    schema_fail(path + ".unit", e.what());
  }
}

taxonomy::CascadeGraph parse_cascade(const json &v, const std::string &path) {
  require_object(v, path);
  only_keys(v, {"nodes", "edges"}, path);
  taxonomy::CascadeGraph g;
  const json &nodes = get_array(v, "nodes", path);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::string p = path + ".nodes[" + std::to_string(i) + "]";
    const json &n = nodes[i];
    require_object(n, p);
    only_keys(n, {"id", "kind", "tier", "class", "label"}, p);
    taxonomy::Node node;
    node.id = get_string(n, "id", p);
    node.kind = parse_token(taxonomy::node_kind_from_string,
                            get_string(n, "kind", p), p + ".kind");
    if (n.contains("tier"))
      node.tier = parse_token(taxonomy::tier_from_string,
                              get_string(n, "tier", p), p + ".tier");
    if (n.contains("class"))
      node.functional_class = parse_token(
          taxonomy::class_from_string, get_string(n, "class", p), p + ".class");
    if (n.contains("label"))
      node.label = get_string(n, "label", p);
    try {
      g.add_node(std::move(node));
    } catch (const StructuralError &e) {
      schema_fail(p, e.what());
    }
  }
  const json &edges = get_array(v, "edges", path);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::string p = path + ".edges[" + std::to_string(i) + "]";
    const json &e = edges[i];
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() ||
        !e[1].is_string())
      schema_fail(p, "expected [from, to] node ids");
    g.add_edge(e[0].get<std::string>(), e[1].get<std::string>());
  }
  return g;
}

transfer::TransferRecord parse_transfer(const json &v, const std::string &path,
                                        int default_year) {
  require_object(v, path);
  only_keys(v, {"id", "source", "year", "observations", "adjustments"}, path);
  transfer::TransferRecord rec;
  rec.derived_id = get_string(v, "id", path);
  if (v.contains("source"))
    rec.source = get_string(v, "source", path);
  rec.year = v.contains("year") ? get_int(v, "year", path) : default_year;
  const json &obs = get_array(v, "observations", path);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    std::string p = path + ".observations[" + std::to_string(i) + "]";
    require_object(obs[i], p);
    only_keys(obs[i], {"site", "numerator", "denominator"}, p);
    rec.observations.push_back(
        {get_string(obs[i], "site", p),
         parse_quantity(member(obs[i], "numerator", p), p + ".numerator"),
         parse_quantity(member(obs[i], "denominator", p), p + ".denominator")});
  }
  if (v.contains("adjustments")) {
    const json &adj = get_array(v, "adjustments", path);
    for (std::size_t i = 0; i < adj.size(); ++i) {
      std::string p = path + ".adjustments[" + std::to_string(i) + "]";
      require_object(adj[i], p);
      only_keys(adj[i], {"label", "factor"}, p);
      const json &factor = member(adj[i], "factor", p);
      if (!factor.is_number())
        schema_fail(p + ".factor", "expected a number");
      rec.adjustments.push_back(
          {get_string(adj[i], "label", p), factor.get<double>()});
    }
  }
  return rec;
}

SlotBinding parse_slots(const json &v, const kernels::KernelSignature &sig,
                        const std::string &path) {
  require_object(v, path);
  SlotBinding b;
  for (const auto &[k, val] : v.items()) {
    (void)val;
    bool known = std::any_of(sig.scalars.begin(), sig.scalars.end(),
                             [&](const auto &s) { return s.name == k; }) ||
                 std::any_of(sig.lists.begin(), sig.lists.end(),
                             [&](const auto &s) { return s.name == k; });
    if (!known)
      schema_fail(path, "kernel '" + sig.id + "' has no slot '" + k + "'");
  }
  for (const auto &slot : sig.scalars)
    b.scalars[slot.name] = get_string(v, slot.name, path);
  for (const auto &list : sig.lists) {
    const json &rows = get_array(v, list.name, path);
    auto &out = b.lists[list.name];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::string p = path + "." + list.name + "[" + std::to_string(i) + "]";
      require_object(rows[i], p);
      std::map<std::string, std::string> row;
      for (const auto &field : list.fields)
        row[field.name] = get_string(rows[i], field.name, p);
      if (rows[i].size() != row.size())
        schema_fail(p, "unexpected field in '" + list.name + "' element");
      out.push_back(std::move(row));
    }
  }
  return b;
}

} // namespace

ValuationModel parse_model_manifest(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error &e) {
    throw LoadError(std::string("$: malformed JSON: ") + e.what());
  }
  const std::string root = "$";
  require_object(doc, root);
  only_keys(doc, {"region", "year", "strict", "cascade", "transfers", "items"},
            root);

  ValuationModel m;
  m.region = get_string(doc, "region", root);
  m.year = get_int(doc, "year", root);
  if (doc.contains("strict")) {
    if (!doc["strict"].is_boolean())
      schema_fail("$.strict", "expected a boolean");
    m.strict = doc["strict"].get<bool>();
  }
  m.cascade = parse_cascade(member(doc, "cascade", root), "$.cascade");

  if (doc.contains("transfers")) {
    const json &transfers = get_array(doc, "transfers", root);
    for (std::size_t i = 0; i < transfers.size(); ++i)
      m.transfers.push_back(parse_transfer(
          transfers[i], "$.transfers[" + std::to_string(i) + "]", m.year));
  }

  const json &items = get_array(doc, "items", root);
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::string p = "$.items[" + std::to_string(i) + "]";
    const json &it = items[i];
    require_object(it, p);
    only_keys(it, {"id", "kernel", "side", "class", "node", "slots"}, p);
    LineItem item;
    item.id = get_string(it, "id", p);
    item.kernel = get_string(it, "kernel", p);
    const auto *sig = kernels::find_kernel(item.kernel);
    if (!sig)
      schema_fail(p + ".kernel", "unknown kernel '" + item.kernel + "'");
    item.side = parse_token(kernels::side_from_string,
                            get_string(it, "side", p), p + ".side");
    item.functional_class = parse_token(
        taxonomy::class_from_string, get_string(it, "class", p), p + ".class");
    item.node = get_string(it, "node", p);
    item.slots = parse_slots(member(it, "slots", p), *sig, p + ".slots");
    for (const auto &prev : m.items)
      if (prev.id == item.id)
        schema_fail(p + ".id", "duplicate item id '" + item.id + "'");
    m.items.push_back(std::move(item));
  }
  return m;
}

std::string serialize_model_manifest(const ValuationModel &m) {
  json doc;
  doc["region"] = m.region;
  doc["year"] = m.year;
  doc["strict"] = m.strict;

  json nodes = json::array();
  for (const auto &[id, n] : m.cascade.nodes()) {
    json node = {
        {"id", id}, {"kind", taxonomy::to_string(n.kind)}, {"label", n.label}};
    if (n.tier)
      node["tier"] = taxonomy::to_string(*n.tier);
    if (n.functional_class)
      node["class"] = taxonomy::to_string(*n.functional_class);
    nodes.push_back(std::move(node));
  }
  json edges = json::array();
  for (const auto &[from, to] : m.cascade.edges())
    edges.push_back({from, to});
  doc["cascade"] = {{"nodes", nodes}, {"edges", edges}};

  auto quantity = [](const Quantity &q) {
    return json{{"value", q.magnitude()},
                {"unit", units::format_unit(q.unit())}};
  };
  json transfers = json::array();
  for (const auto &t : m.transfers) {
    json obs = json::array();
    for (const auto &o : t.observations)
      obs.push_back({{"site", o.site},
                     {"numerator", quantity(o.numerator)},
                     {"denominator", quantity(o.denominator)}});
    json adj = json::array();
    for (const auto &a : t.adjustments)
      adj.push_back({{"label", a.label}, {"factor", a.factor}});
    transfers.push_back({{"id", t.derived_id},
                         {"source", t.source},
                         {"year", t.year},
                         {"observations", obs},
                         {"adjustments", adj}});
  }
  doc["transfers"] = transfers;

  json items = json::array();
  for (const auto &item : m.items) {
    json slots = json::object();
    for (const auto &[k, v] : item.slots.scalars)
      slots[k] = v;
    for (const auto &[k, rows] : item.slots.lists) {
      json arr = json::array();
      for (const auto &row : rows)
        arr.push_back(json(row));
      slots[k] = arr;
    }
    items.push_back({{"id", item.id},
                     {"kernel", item.kernel},
                     {"side", kernels::to_string(item.side)},
                     {"class", taxonomy::to_string(item.functional_class)},
                     {"node", item.node},
                     {"slots", slots}});
  }
  doc["items"] = items;
  return doc.dump(2) + "\n";
}

ParameterSet with_transfers(const ValuationModel &model,
                            const ParameterSet &params) {
  ParameterSet out = params;
  if (out.region.empty())
    out.region = model.region;
  if (out.reference_year == 0)
    out.reference_year = model.year;
  for (const auto &rec : model.transfers) {
    if (out.find(rec.derived_id))
      throw LoadError("transfer '" + rec.derived_id +
                      "' collides with an existing parameter id");
    out.add(transfer::ratio_from_donors(rec));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binding

std::string BindError::message() const {
  switch (kind) {
  case Kind::unresolved:
    return "item '" + item + "' slot '" + slot + "': parameter '" + parameter +
           "' not found";
  case Kind::dimension_mismatch:
    return "item '" + item + "' slot '" + slot + "': parameter '" + parameter +
           "' has dimension " + actual + ", expected " + expected;
  }
  return {};
}

BindResult bind(const ValuationModel &model, const ParameterSet &params) {
  BindResult result;
  result.model.options.strict = model.strict;

  for (const auto &item : model.items) {
    const auto *sig = kernels::find_kernel(item.kernel);
    if (!sig)
      throw StructuralError("item '" + item.id + "': unknown kernel '" +
                            item.kernel + "'");
    BoundItem bound{item, {}, {}};

    auto resolve = [&](const std::string &slot_path, const std::string &pid,
                       const units::UnitDim &dim) -> const Parameter * {
      bound.sources[slot_path] = pid;
      const Parameter *p = params.find(pid);
      if (!p) {
        result.errors.push_back(
            {item.id, slot_path, pid, BindError::Kind::unresolved, {}, {}});
        return nullptr;
      }
      if (!p->quantity().unit().compatible(dim)) {
        result.errors.push_back(
            {item.id, slot_path, pid, BindError::Kind::dimension_mismatch,
             units::format_dimension(dim),
             units::format_dimension(p->quantity().unit())});
        return nullptr;
      }
      return p;
    };

    for (const auto &slot : sig->scalars) {
      auto it = item.slots.scalars.find(slot.name);
      if (it == item.slots.scalars.end())
        throw StructuralError("item '" + item.id + "': missing slot '" +
                              slot.name + "'");
      if (const Parameter *p = resolve(slot.name, it->second, slot.dim))
        bound.inputs.scalars[slot.name] = p->quantity();
    }
    for (const auto &list : sig->lists) {
      auto it = item.slots.lists.find(list.name);
      if (it == item.slots.lists.end())
        throw StructuralError("item '" + item.id + "': missing list slot '" +
                              list.name + "'");
      auto &rows = bound.inputs.lists[list.name];
      for (std::size_t i = 0; i < it->second.size(); ++i) {
        std::map<std::string, Quantity> row;
        for (const auto &field : list.fields) {
          std::string path =
              list.name + "[" + std::to_string(i) + "]." + field.name;
          auto f = it->second[i].find(field.name);
          if (f == it->second[i].end())
            throw StructuralError("item '" + item.id + "': missing field '" +
                                  path + "'");
          if (const Parameter *p = resolve(path, f->second, field.dim))
            row[field.name] = p->quantity();
        }
        rows.push_back(std::move(row));
      }
    }
    result.model.items.push_back(std::move(bound));
  }
  std::sort(result.errors.begin(), result.errors.end(),
            [](const BindError &a, const BindError &b) {
              return std::tie(a.item, a.slot) < std::tie(b.item, b.slot);
            });
  return result;
}

std::vector<kernels::LineItemResult> evaluate(const BoundModel &model) {
  std::vector<kernels::LineItemResult> out;
  out.reserve(model.items.size());
  for (const auto &b : model.items) {
    kernels::Valuation v;
    try {
      v = kernels::evaluate_kernel(b.item.kernel, b.inputs, model.options);
    } catch (const DomainError &e) {
      auto src = b.sources.find(e.slot());
      std::string param = src == b.sources.end() ? e.slot() : src->second;
      throw EvaluationError(b.item.id, param,
                            "item '" + b.item.id + "', parameter '" + param +
                                "': " + e.what());
    }
    out.push_back({b.item.id, b.item.side, b.item.functional_class, v.value,
                   std::move(v.breakdown)});
  }
  return out;
}

std::vector<kernels::LineItemResult> evaluate(const ValuationModel &model,
                                              const ParameterSet &params) {
  BindResult bound = bind(model, params);
  if (!bound.ok())
    throw StructuralError(bound.errors.front().message());
  return evaluate(bound.model);
}

} // namespace esdv::ingest
