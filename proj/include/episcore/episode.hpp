#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "episcore/seq.hpp"

namespace episcore {

enum class EpisodeClass { kSerial, kParallel, kGeneral };

/// Labelled DAG pattern, stored as its transitive closure. Two episodes with
/// the same closure are the same episode; canonical_key() realises that.
/// Node count is capped at 64 (adjacency lives in per-node bitmasks).
class Episode {
 public:
  Episode() = default;
  /// edges are (from, to) node-index pairs; the closure is taken on
  /// construction. Throws on cycles or on more than 64 nodes.
  Episode(std::vector<Symbol> labels, const std::vector<std::pair<int, int>>& edges);

  static Episode serial(std::span<const Symbol> labels);
  static Episode parallel(std::span<const Symbol> labels);
  static Episode single(Symbol label);

  int node_count() const { return static_cast<int>(labels_.size()); }
  bool empty() const { return labels_.empty(); }
  Symbol label(int v) const { return labels_[v]; }
  const std::vector<Symbol>& labels() const { return labels_; }

  bool has_edge(int u, int v) const { return (parents_[v] >> u) & 1u; }
  std::uint64_t parent_mask(int v) const { return parents_[v]; }
  std::vector<std::pair<int, int>> closure_edges() const;

  /// Nodes with no outgoing edge.
  std::vector<int> sinks() const;
  /// Copy without node v (a sink) and its incident edges. Throws otherwise.
  Episode remove_sink(int v) const;
  /// New episode with u -> v added and the closure recomputed.
  Episode with_edge(int u, int v) const;

  bool is_strict() const;
  EpisodeClass classify() const;

  /// Equal for isomorphic labelled DAGs with identical closures.
  /// Signature refinement plus permutation fallback; node cap 10 for the
  /// fallback (throws beyond).
  const std::string& canonical_key() const;

  /// Linear rendering: "a>b>c" for serial, "a|b|c" for parallel, explicit
  /// node/edge form for general episodes.
  std::string render(const SymbolTable& table) const;

  bool operator==(const Episode& other) const;

 private:
  std::vector<Symbol> labels_;
  std::vector<std::uint64_t> parents_;  // closure: bit u of parents_[v] <=> u -> v
  mutable std::string key_;             // cached canonical key
};

/// All prefix episodes of G (downward-closed node subsets), including G and
/// the empty episode.
std::vector<Episode> prefix_episodes(const Episode& g);

/// True iff an injective, label- and order-respecting embedding of g into s
/// exists. Exponential search; throws if g has more than max_nodes nodes.
bool covers_bruteforce(const EventSequence& s, const Episode& g, int max_nodes = 8);

/// True iff `big` contains `small` as a sub-episode: an injective map of
/// small's nodes into big's preserving labels and closure order. Node cap 8.
bool is_subepisode(const Episode& small, const Episode& big, int max_nodes = 8);

}  // namespace episcore
