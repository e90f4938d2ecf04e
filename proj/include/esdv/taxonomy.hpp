#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "esdv/errors.hpp"

namespace esdv::ingest {
struct ValuationModel;
}

namespace esdv::taxonomy {

enum class NodeKind {
  Structure,
  Function,
  Service,
  Disservice,
  NegativeEffect,
  ValueChange,
};

/// Final disservices harm wellbeing directly; intermediate ones only act
/// through final disservices or reduced services.
enum class DisserviceTier { Final, Intermediate };

/// Applies to services and disservices alike. There is no Supporting class.
enum class FunctionalClass { Provisioning, Regulating, Cultural };

std::string_view to_string(NodeKind k);
std::string_view to_string(DisserviceTier t);
std::string_view to_string(FunctionalClass c);
// Parsers throw std::invalid_argument on unknown tokens.
NodeKind node_kind_from_string(std::string_view s);
DisserviceTier tier_from_string(std::string_view s);
FunctionalClass class_from_string(std::string_view s);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Structure;
  std::optional<DisserviceTier> tier;
  std::optional<FunctionalClass> functional_class;
  std::string label;

  bool operator==(const Node &) const = default;
};

using Edge = std::pair<std::string, std::string>;

/// Typed cascade DAG: structure -> function -> (dis)service -> effect ->
/// value change. Nodes and edges live in ordered containers so iteration
/// order never depends on insertion order.
class CascadeGraph {
public:
  /// Throws StructuralError on a duplicate id, on a disservice without a
  /// tier, or on a tier attached to a non-disservice node.
  void add_node(Node node);
  /// Edges are not checked here; dangling ids surface in validate_cascade.
  void add_edge(std::string from, std::string to);

  const std::map<std::string, Node> &nodes() const noexcept { return m_nodes; }
  const std::set<Edge> &edges() const noexcept { return m_edges; }
  const Node *find(std::string_view id) const;

  bool empty() const noexcept { return m_nodes.empty(); }
  bool operator==(const CascadeGraph &) const = default;

private:
  std::map<std::string, Node> m_nodes;
  std::set<Edge> m_edges;
};

namespace codes {
inline constexpr std::string_view final_without_effect = "E-CASCADE-A";
inline constexpr std::string_view intermediate_direct_effect = "E-CASCADE-B";
inline constexpr std::string_view intermediate_dead_end = "E-CASCADE-C";
inline constexpr std::string_view illegal_edge = "E-CASCADE-D";
inline constexpr std::string_view cycle = "E-CASCADE-E";
inline constexpr std::string_view no_value_change = "E-CASCADE-F";
inline constexpr std::string_view double_count = "E-DOUBLECOUNT";
} // namespace codes

struct Violation {
  std::string code;
  std::vector<std::string> nodes;
  std::string message;

  auto operator<=>(const Violation &) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// True for the edge kinds the cascade order permits.
bool edge_permitted(NodeKind from, NodeKind to);

/// Function -> Structure feedback edges are allowed but never close a cycle.
bool is_feedback_edge(NodeKind from, NodeKind to);

/// Lints a cascade graph. Violations come back sorted by (code, nodes).
///
///   A  final disservice with no edge to a negative effect
///   B  intermediate disservice with a direct edge to a negative effect
///   C  intermediate disservice reaching neither a final disservice nor a
///      service
///   D  edge outside the cascade order
///   E  cycle among forward edges (one violation per strongly connected
///      component)
///   F  service or negative effect with no edge to a value change, which
///      would leave a valuation path dangling
///
/// Throws StructuralError when an edge references an unknown node.
ValidationReport validate_cascade(const CascadeGraph &g);

/// Flags every line item valued on an intermediate disservice: its value is
/// already embedded in the final disservices and services it feeds.
/// Throws StructuralError when an item references an unknown node.
ValidationReport check_double_counting(const CascadeGraph &g,
                                       const ingest::ValuationModel &model);

} // namespace esdv::taxonomy
