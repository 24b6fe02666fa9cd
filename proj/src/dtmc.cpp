#include "icsdfa/dtmc.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace icsdfa {

namespace {
const std::vector<SymbolId> kNoNeighbors;
}

const NodeInfo& Dtmc::node(SymbolId s) const {
  auto it = nodes_.find(s);
  if (it == nodes_.end()) throw std::out_of_range("unknown symbol " + format_symbol(s));
  return it->second;
}

const EdgeInfo* Dtmc::edge(SymbolId from, SymbolId to) const {
  auto it = edges_.find({from, to});
  return it == edges_.end() ? nullptr : &it->second;
}

std::uint64_t Dtmc::raw_count(SymbolId from, SymbolId to) const {
  if (const auto* e = edge(from, to)) return e->count;
  auto it = filtered_.find({from, to});
  return it == filtered_.end() ? 0 : it->second;
}

const std::vector<SymbolId>& Dtmc::successors(SymbolId s) const {
  auto it = succ_.find(s);
  return it == succ_.end() ? kNoNeighbors : it->second;
}

const std::vector<SymbolId>& Dtmc::predecessors(SymbolId s) const {
  auto it = pred_.find(s);
  return it == pred_.end() ? kNoNeighbors : it->second;
}

std::vector<SymbolId> Dtmc::symbols() const {
  std::vector<SymbolId> out;
  out.reserve(nodes_.size());
  for (const auto& [s, _] : nodes_) out.push_back(s);
  return out;
}

void Dtmc::index() {
  succ_.clear();
  pred_.clear();
  std::map<SymbolId, std::uint64_t> out_total;
  for (const auto& [e, info] : edges_) {
    succ_[e.first].push_back(e.second);
    pred_[e.second].push_back(e.first);
    out_total[e.first] += info.count;
  }
  for (auto& [e, info] : edges_) {
    info.probability = static_cast<double>(info.count) / static_cast<double>(out_total[e.first]);
  }
}

Dtmc build_dtmc(const Trace& trace, double t_rare, RareBasis basis) {
  if (trace.size() < 2) throw std::invalid_argument("build_dtmc needs at least 2 events");
  if (!(t_rare >= 0.0 && t_rare < 1.0)) throw std::invalid_argument("t_rare must be in [0,1)");

  Dtmc g;
  std::map<Edge, std::uint64_t> counts;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    ++g.nodes_[trace.events[i].symbol].freq;
    if (i + 1 < trace.size()) ++counts[{trace.events[i].symbol, trace.events[i + 1].symbol}];
  }
  for (const auto& [e, c] : counts) {
    auto& target = g.nodes_[e.second];
    target.max_in_count = std::max(target.max_in_count, c);
    auto& source = g.nodes_[e.first];
    source.max_out_count = std::max(source.max_out_count, c);
  }
  // Thresholds come from pre-filter counts; one pass only.
  for (const auto& [e, c] : counts) {
    std::uint64_t ref = g.nodes_[e.second].max_in_count;
    if (basis == RareBasis::Endpoints) ref = std::max(ref, g.nodes_[e.first].max_out_count);
    const double threshold = t_rare * static_cast<double>(ref);
    if (static_cast<double>(c) < threshold) {
      g.filtered_.emplace(e, c);
    } else {
      g.edges_.emplace(e, EdgeInfo{c, 0.0});
    }
  }
  g.index();
  return g;
}

std::uint64_t max_incoming_count(const Dtmc& dtmc, SymbolId v) {
  return dtmc.node(v).max_in_count;
}

std::uint64_t max_outgoing_count(const Dtmc& dtmc, SymbolId v) {
  return dtmc.node(v).max_out_count;
}

std::string rare_basis_name(RareBasis basis) {
  return basis == RareBasis::Target ? "target" : "endpoints";
}

RareBasis parse_rare_basis(std::string_view name) {
  if (name == "target") return RareBasis::Target;
  if (name == "endpoints") return RareBasis::Endpoints;
  throw std::invalid_argument("rare_basis must be 'target' or 'endpoints', got '" + std::string(name) + "'");
}

std::string format_dtmc_edges(const Dtmc& dtmc) {
  std::string out = "u,v,count,probability\n";
  char buf[64];
  for (const auto& [e, info] : dtmc.edges()) {
    out += format_symbol(e.first);
    out += ',';
    out += format_symbol(e.second);
    out += ',';
    out += std::to_string(info.count);
    out += ',';
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, info.probability);
    (void)ec;
    out.append(buf, ptr);
    out += '\n';
  }
  return out;
}

}  // namespace icsdfa
