#include "esdv/taxonomy.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <stdexcept>

#include "esdv/ingest.hpp"

namespace esdv::taxonomy {

namespace {

constexpr std::array<std::pair<NodeKind, std::string_view>, 6> kind_names = {{
    {NodeKind::Structure, "structure"},
    {NodeKind::Function, "function"},
    {NodeKind::Service, "service"},
    {NodeKind::Disservice, "disservice"},
    {NodeKind::NegativeEffect, "negative_effect"},
    {NodeKind::ValueChange, "value_change"},
}};

constexpr std::array<std::pair<FunctionalClass, std::string_view>, 3>
    class_names = {{
        {FunctionalClass::Provisioning, "provisioning"},
        {FunctionalClass::Regulating, "regulating"},
        {FunctionalClass::Cultural, "cultural"},
    }};

template <class Table, class E> std::string_view name_of(const Table &t, E e) {
  for (const auto &[v, n] : t)
    if (v == e)
      return n;
  return "?";
}

template <class Table>
auto value_of(const Table &t, std::string_view s, std::string_view what) {
  for (const auto &[v, n] : t)
    if (n == s)
      return v;
  throw std::invalid_argument("unknown " + std::string(what) + " '" +
                              std::string(s) + "'");
}

using Adjacency = std::map<std::string, std::vector<std::string>>;

/// Forward adjacency: every edge except Function -> Structure feedback.
Adjacency forward_edges(const CascadeGraph &g) {
  Adjacency adj;
  for (const auto &[id, n] : g.nodes())
    adj[id];
  for (const auto &[from, to] : g.edges()) {
    if (!is_feedback_edge(g.find(from)->kind, g.find(to)->kind))
      adj[from].push_back(to);
  }
  return adj;
}

/// Tarjan's strongly connected components; returns components that form a
/// cycle (size > 1, or a self loop).
std::vector<std::vector<std::string>> cyclic_components(const Adjacency &adj) {
  std::map<std::string, int> index, low;
  std::map<std::string, bool> on_stack;
  std::vector<std::string> stack;
  std::vector<std::vector<std::string>> out;
  int counter = 0;

  std::function<void(const std::string &)> visit = [&](const std::string &v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const auto &w : adj.at(v)) {
      if (!index.count(w)) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> comp;
      std::string w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      const auto &succ = adj.at(v);
      bool self_loop = std::find(succ.begin(), succ.end(), v) != succ.end();
      if (comp.size() > 1 || self_loop) {
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  };
  for (const auto &[v, succ] : adj) {
    (void)succ;
    if (!index.count(v))
      visit(v);
  }
  return out;
}

bool reaches_final_or_service(const CascadeGraph &g, const Adjacency &adj,
                              const std::string &start) {
  std::vector<std::string> todo = adj.at(start);
  std::map<std::string, bool> seen;
  while (!todo.empty()) {
    std::string v = todo.back();
    todo.pop_back();
    if (seen[v])
      continue;
    seen[v] = true;
    const Node &n = *g.find(v);
    if (n.kind == NodeKind::Service ||
        (n.kind == NodeKind::Disservice && n.tier == DisserviceTier::Final))
      return true;
    for (const auto &w : adj.at(v))
      todo.push_back(w);
  }
  return false;
}

} // namespace

std::string_view to_string(NodeKind k) { return name_of(kind_names, k); }

std::string_view to_string(DisserviceTier t) {
  return t == DisserviceTier::Final ? "final" : "intermediate";
}

std::string_view to_string(FunctionalClass c) {
  return name_of(class_names, c);
}

NodeKind node_kind_from_string(std::string_view s) {
  return value_of(kind_names, s, "node kind");
}

DisserviceTier tier_from_string(std::string_view s) {
  if (s == "final")
    return DisserviceTier::Final;
  if (s == "intermediate")
    return DisserviceTier::Intermediate;
  throw std::invalid_argument("unknown tier '" + std::string(s) + "'");
}

FunctionalClass class_from_string(std::string_view s) {
  return value_of(class_names, s, "functional class");
}

void CascadeGraph::add_node(Node node) {
  if (node.id.empty())
    throw StructuralError("cascade node id must not be empty");
  if (node.kind == NodeKind::Disservice && !node.tier)
    throw StructuralError("disservice '" + node.id + "' needs a tier");
  if (node.kind != NodeKind::Disservice && node.tier)
    throw StructuralError("node '" + node.id +
                          "' is not a disservice and cannot carry a tier");
  std::string id = node.id;
  if (!m_nodes.emplace(id, std::move(node)).second)
    throw StructuralError("duplicate cascade node '" + id + "'");
}

void CascadeGraph::add_edge(std::string from, std::string to) {
  m_edges.emplace(std::move(from), std::move(to));
}

const Node *CascadeGraph::find(std::string_view id) const {
  auto it = m_nodes.find(std::string(id));
  return it == m_nodes.end() ? nullptr : &it->second;
}

bool edge_permitted(NodeKind from, NodeKind to) {
  using K = NodeKind;
  switch (from) {
  case K::Structure:
    return to == K::Function;
  case K::Function:
    return to == K::Service || to == K::Disservice || to == K::Structure;
  case K::Service:
    return to == K::ValueChange;
  case K::Disservice:
    return to == K::NegativeEffect || to == K::Disservice || to == K::Service;
  case K::NegativeEffect:
    return to == K::ValueChange;
  case K::ValueChange:
    return false;
  }
  return false;
}

bool is_feedback_edge(NodeKind from, NodeKind to) {
  return from == NodeKind::Function && to == NodeKind::Structure;
}

ValidationReport validate_cascade(const CascadeGraph &g) {
  for (const auto &[from, to] : g.edges())
    for (const auto &id : {from, to})
      if (!g.find(id))
        throw StructuralError("edge " + from + " -> " + to +
                              " references unknown node '" + id + "'");

  ValidationReport report;
  auto emit = [&](std::string_view code, std::vector<std::string> nodes,
                  std::string message) {
    report.violations.push_back(
        {std::string(code), std::move(nodes), std::move(message)});
  };

  std::map<std::string, std::vector<NodeKind>> successors;
  for (const auto &[from, to] : g.edges()) {
    NodeKind fk = g.find(from)->kind, tk = g.find(to)->kind;
    successors[from].push_back(tk);
    if (!edge_permitted(fk, tk))
      emit(codes::illegal_edge, {from, to},
           "edge " + std::string(to_string(fk)) + " '" + from + "' -> " +
               std::string(to_string(tk)) + " '" + to +
               "' is outside the cascade order");
  }

  Adjacency adj = forward_edges(g);
  auto has_successor = [&](const std::string &id, NodeKind kind) {
    auto it = successors.find(id);
    return it != successors.end() &&
           std::find(it->second.begin(), it->second.end(), kind) !=
               it->second.end();
  };

  for (const auto &[id, n] : g.nodes()) {
    if (n.kind == NodeKind::Disservice && n.tier == DisserviceTier::Final &&
        !has_successor(id, NodeKind::NegativeEffect))
      emit(codes::final_without_effect, {id},
           "final disservice '" + id + "' has no negative effect");
    if (n.kind == NodeKind::Disservice &&
        n.tier == DisserviceTier::Intermediate) {
      if (has_successor(id, NodeKind::NegativeEffect))
        emit(codes::intermediate_direct_effect, {id},
             "intermediate disservice '" + id +
                 "' links directly to a negative effect");
      if (!reaches_final_or_service(g, adj, id))
        emit(codes::intermediate_dead_end, {id},
             "intermediate disservice '" + id +
                 "' reaches no final disservice or service");
    }
    if ((n.kind == NodeKind::Service || n.kind == NodeKind::NegativeEffect) &&
        !has_successor(id, NodeKind::ValueChange))
      emit(codes::no_value_change, {id},
           std::string(to_string(n.kind)) + " '" + id +
               "' has no value change");
  }

  for (auto &comp : cyclic_components(adj)) {
    std::string msg = "cycle among";
    for (const auto &id : comp)
      msg += " '" + id + "'";
    emit(codes::cycle, std::move(comp), std::move(msg));
  }

  std::sort(report.violations.begin(), report.violations.end());
  return report;
}

ValidationReport check_double_counting(const CascadeGraph &g,
                                       const ingest::ValuationModel &model) {
  ValidationReport report;
  for (const auto &item : model.items) {
    const Node *n = g.find(item.node);
    if (!n)
      throw StructuralError("item '" + item.id + "' references unknown node '" +
                            item.node + "'");
    if (n->kind == NodeKind::Disservice &&
        n->tier == DisserviceTier::Intermediate)
      report.violations.push_back(
          {std::string(codes::double_count),
           {item.node, item.id},
           "item '" + item.id + "' values intermediate disservice '" +
               item.node +
               "'; its value is already embedded in the final "
               "disservices and services it feeds"});
  }
  std::sort(report.violations.begin(), report.violations.end());
  return report;
}

} // namespace esdv::taxonomy
