#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "icsdfa/trace.hpp"

namespace icsdfa {

struct NodeInfo {
  std::uint64_t freq = 0;
  /// Largest bigram counts entering and leaving this node, measured before
  /// rare-bigram filtering.
  std::uint64_t max_in_count = 0;
  std::uint64_t max_out_count = 0;
};

/// Reference count for the rare-bigram filter. `Target` compares an edge with
/// the largest count entering its target. `Endpoints` also compares it with
/// the largest count leaving its source, so a stray transition out of a busy
/// symbol into a sparse one counts as rare.
enum class RareBasis { Target, Endpoints };

struct EdgeInfo {
  std::uint64_t count = 0;
  double probability = 0.0;
};

using Edge = std::pair<SymbolId, SymbolId>;

/// State graph of the discrete-time Markov chain over symbols. Maps are keyed
/// by SymbolId so iteration order is deterministic.
class Dtmc {
 public:
  const std::map<SymbolId, NodeInfo>& nodes() const { return nodes_; }
  const std::map<Edge, EdgeInfo>& edges() const { return edges_; }
  /// Bigrams removed by the rare-bigram filter, with their counts.
  const std::map<Edge, std::uint64_t>& filtered_edges() const { return filtered_; }

  bool contains(SymbolId s) const { return nodes_.count(s) != 0; }
  const NodeInfo& node(SymbolId s) const;
  const EdgeInfo* edge(SymbolId from, SymbolId to) const;

  /// Bigram count before filtering (0 if never observed).
  std::uint64_t raw_count(SymbolId from, SymbolId to) const;

  const std::vector<SymbolId>& successors(SymbolId s) const;
  const std::vector<SymbolId>& predecessors(SymbolId s) const;
  std::size_t in_degree(SymbolId s) const { return predecessors(s).size(); }
  std::size_t out_degree(SymbolId s) const { return successors(s).size(); }

  std::vector<SymbolId> symbols() const;

 private:
  friend Dtmc build_dtmc(const Trace& trace, double t_rare, RareBasis basis);

  void index();

  std::map<SymbolId, NodeInfo> nodes_;
  std::map<Edge, EdgeInfo> edges_;
  std::map<Edge, std::uint64_t> filtered_;
  std::map<SymbolId, std::vector<SymbolId>> succ_;
  std::map<SymbolId, std::vector<SymbolId>> pred_;
};

/// Count symbols and bigrams of the raw stream, drop every bigram whose count
/// is below `t_rare` times its reference count (see RareBasis), and
/// renormalize outgoing probabilities. Nodes are never removed.
Dtmc build_dtmc(const Trace& trace, double t_rare = 0.10, RareBasis basis = RareBasis::Endpoints);

/// Largest pre-filter bigram count entering `v`; 0 when nothing enters it.
/// Throws std::out_of_range for an unknown symbol.
std::uint64_t max_incoming_count(const Dtmc& dtmc, SymbolId v);

/// Largest pre-filter bigram count leaving `v`; 0 when nothing leaves it.
std::uint64_t max_outgoing_count(const Dtmc& dtmc, SymbolId v);

std::string rare_basis_name(RareBasis basis);
/// Inverse of rare_basis_name; throws std::invalid_argument.
RareBasis parse_rare_basis(std::string_view name);

/// Debug edge list, one `u,v,count,probability` line per retained edge.
std::string format_dtmc_edges(const Dtmc& dtmc);

}  // namespace icsdfa
