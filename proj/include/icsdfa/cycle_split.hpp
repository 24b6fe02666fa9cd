#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "icsdfa/dtmc.hpp"

namespace icsdfa {

/// Candidate symbol membership of one cyclic pattern. `members` maps each
/// symbol to its number of instances in the cycle.
struct SymbolSet {
  int id = 0;
  double freq = 0.0;
  std::map<SymbolId, int> members;
  /// Created by the catch-all step for vertices nothing else claimed.
  bool leftover = false;

  int instance_count() const;
};

struct Partition {
  std::vector<SymbolSet> sets;
  /// Vertices whose residual frequency never reached zero.
  std::vector<std::pair<SymbolId, double>> unclassified;
  /// Number of sets after each of the seven splitting steps.
  std::array<std::size_t, 7> sets_after_step{};
};

struct SplitOptions {
  double t_sim = 0.05;
  /// Subset enumeration is skipped for vertices with more adjacent candidates.
  std::size_t max_adjacent = 16;
  std::size_t max_forks = 8;
};

/// a(1 - t_sim) < b < a(1 + t_sim), strict on both sides.
bool freq_similar(double a, double b, double t_sim = 0.05);

/// Split DTMC vertices into per-cycle symbol sets. Returns one partition per
/// fork created by the adjacent-subset step (at least one).
std::vector<Partition> split_symbol_sets(const Dtmc& dtmc, const SplitOptions& opts = {});

/// Fraction of true (symbol, set) instances reproduced by `found`, maximized
/// over injective matchings of true sets onto found sets.
double partition_accuracy(const Partition& found, const Partition& truth);

/// Debug dump, one `set_id,freq,symbol,instances` line per membership.
std::string format_partition(const Partition& p);

}  // namespace icsdfa
