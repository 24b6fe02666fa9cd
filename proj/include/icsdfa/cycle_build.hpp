#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "icsdfa/cycle_split.hpp"
#include "icsdfa/dtmc.hpp"

namespace icsdfa {

struct SubgraphEdge {
  SymbolId from;
  SymbolId to;
  std::uint64_t count = 0;
  /// Inserted by missed-edge repair rather than observed.
  bool added = false;

  friend bool operator==(const SubgraphEdge&, const SubgraphEdge&) = default;
};

/// Per-cycle view of the DTMC. `edges` is a multiset: repair may add an edge
/// parallel to an existing one.
struct CycleSubgraph {
  int set_id = 0;
  std::map<SymbolId, int> vertices;
  std::vector<SubgraphEdge> edges;

  std::map<SymbolId, int> in_degrees() const;
  std::map<SymbolId, int> out_degrees() const;
  bool balanced() const;
};

using EulerCycle = std::vector<SymbolId>;

/// Members of `set` as vertices, every retained DTMC edge between two members.
CycleSubgraph build_subgraph(const Dtmc& dtmc, const SymbolSet& set);

/// Remove edges whose count falls outside [m(1 - t_med), m(1 + t_med)] for the
/// median edge count m. Throws std::invalid_argument on an edge-less graph.
CycleSubgraph drop_redundant_edges(const CycleSubgraph& g, double t_med = 0.05);

/// Score used to pick among candidate missed edges; higher wins.
using EdgeHint = std::function<double(SymbolId from, SymbolId to)>;

/// Pair vertices lacking an outgoing edge with vertices lacking an incoming
/// edge and connect them, at most |V| times. The new edge's count is the
/// smallest count in `g`. With a hint the highest-scoring pair is taken first;
/// otherwise pairs are taken in symbol order.
CycleSubgraph add_missed_edges(const CycleSubgraph& g, const EdgeHint& hint = {});

/// Hierholzer's algorithm over varied start vertices and sub-tour merge
/// orders. Empty when the graph is unbalanced or its edges are disconnected.
/// Cycles are canonicalized to their lexicographically smallest rotation.
std::vector<EulerCycle> euler_cycles(const CycleSubgraph& g, std::size_t max_alternatives = 4);

EulerCycle canonical_rotation(const EulerCycle& cycle);

/// Closed walk visiting every member of `set` exactly as often as its instance
/// count, chosen to maximize the summed `weight` of its consecutive pairs: an
/// optimal successor assignment over the instances, with sub-cycles then
/// patched together at the smallest loss. Canonical rotation.
EulerCycle max_weight_cycle(const SymbolSet& set, const EdgeHint& weight);

/// Copy of `set` with the instance count of each non-anchor member
/// re-estimated as round(max(in, out) / set.freq), where in and out are the
/// bigram counts between the member and the set's anchors. Anchors keep their
/// count, as do members with no bigram to any anchor. Counts stay >= 1.
SymbolSet estimate_instances(const SymbolSet& set, const std::set<SymbolId>& anchors, const EdgeHint& count);

}  // namespace icsdfa
