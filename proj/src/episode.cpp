#include "episcore/episode.hpp"

#include <algorithm>
#include <bit>
#include <queue>
#include <sstream>

namespace episcore {

namespace {

// Kahn topological order over parent masks; empty result signals a cycle.
std::vector<int> topo_order(const std::vector<std::uint64_t>& parents) {
  int n = static_cast<int>(parents.size());
  std::vector<int> indeg(n, 0), order;
  order.reserve(n);
  for (int v = 0; v < n; ++v) indeg[v] = std::popcount(parents[v]);
  std::vector<int> ready;
  for (int v = 0; v < n; ++v)
    if (indeg[v] == 0) ready.push_back(v);
  while (!ready.empty()) {
    int v = ready.back();
    ready.pop_back();
    order.push_back(v);
    for (int u = 0; u < n; ++u)
      if ((parents[u] >> v) & 1u)
        if (--indeg[u] == 0) ready.push_back(u);
  }
  if (static_cast<int>(order.size()) != n) order.clear();
  return order;
}

}  // namespace

Episode::Episode(std::vector<Symbol> labels, const std::vector<std::pair<int, int>>& edges)
    : labels_(std::move(labels)) {
  int n = node_count();
  if (n > 64) throw Error("episode too large (node cap 64)");
  parents_.assign(n, 0);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n || u == v) throw Error("episode: bad edge");
    parents_[v] |= 1ull << u;
  }
  auto order = topo_order(parents_);
  if (order.empty() && n > 0) throw Error("episode: graph is cyclic");
  // transitive closure, parents-first
  for (int v : order)
    for (int u = 0; u < n; ++u)
      if ((parents_[v] >> u) & 1u) parents_[v] |= parents_[u];
}

Episode Episode::serial(std::span<const Symbol> labels) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < static_cast<int>(labels.size()); ++i) edges.emplace_back(i, i + 1);
  return Episode(std::vector<Symbol>(labels.begin(), labels.end()), edges);
}

Episode Episode::parallel(std::span<const Symbol> labels) {
  return Episode(std::vector<Symbol>(labels.begin(), labels.end()), {});
}

Episode Episode::single(Symbol label) { return Episode({label}, {}); }

std::vector<std::pair<int, int>> Episode::closure_edges() const {
  std::vector<std::pair<int, int>> edges;
  for (int v = 0; v < node_count(); ++v)
    for (int u = 0; u < node_count(); ++u)
      if ((parents_[v] >> u) & 1u) edges.emplace_back(u, v);
  return edges;
}

std::vector<int> Episode::sinks() const {
  int n = node_count();
  std::vector<bool> has_child(n, false);
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u)
      if ((parents_[v] >> u) & 1u) has_child[u] = true;
  std::vector<int> out;
  for (int v = 0; v < n; ++v)
    if (!has_child[v]) out.push_back(v);
  return out;
}

Episode Episode::remove_sink(int v) const {
  auto sk = sinks();
  if (std::find(sk.begin(), sk.end(), v) == sk.end())
    throw Error("remove_sink: node is not a sink");
  std::vector<Symbol> labels;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> remap(node_count(), -1);
  for (int u = 0; u < node_count(); ++u)
    if (u != v) {
      remap[u] = static_cast<int>(labels.size());
      labels.push_back(labels_[u]);
    }
  for (auto [a, b] : closure_edges())
    if (a != v && b != v) edges.emplace_back(remap[a], remap[b]);
  return Episode(std::move(labels), edges);
}

Episode Episode::with_edge(int u, int v) const {
  auto edges = closure_edges();
  edges.emplace_back(u, v);
  return Episode(labels_, edges);
}

bool Episode::is_strict() const {
  for (int u = 0; u < node_count(); ++u)
    for (int v = u + 1; v < node_count(); ++v)
      if (labels_[u] == labels_[v] && !has_edge(u, v) && !has_edge(v, u)) return false;
  return true;
}

EpisodeClass Episode::classify() const {
  bool total = true, no_edges = true;
  for (int u = 0; u < node_count(); ++u)
    for (int v = u + 1; v < node_count(); ++v) {
      if (has_edge(u, v) || has_edge(v, u)) no_edges = false;
      else total = false;
    }
  if (total) return EpisodeClass::kSerial;
  if (no_edges) return EpisodeClass::kParallel;
  return EpisodeClass::kGeneral;
}

namespace {

struct CanonSearch {
  const Episode& g;
  int n;
  std::vector<int> twin_class;            // nodes interchangeable under any order
  std::vector<std::pair<Symbol, std::uint64_t>> best;
  std::vector<std::pair<Symbol, std::uint64_t>> cur;
  std::vector<int> pos_of;                // node -> placed position, -1 if unplaced
  std::uint64_t placed_mask = 0;
  bool have_best = false;

  explicit CanonSearch(const Episode& ep) : g(ep), n(ep.node_count()), pos_of(n, -1) {
    twin_class.assign(n, -1);
    std::vector<std::uint64_t> child(n, 0);
    for (int v = 0; v < n; ++v)
      for (int u = 0; u < n; ++u)
        if (g.has_edge(u, v)) child[u] |= 1ull << v;
    int next = 0;
    for (int v = 0; v < n; ++v) {
      if (twin_class[v] >= 0) continue;
      twin_class[v] = next;
      for (int u = v + 1; u < n; ++u) {
        if (twin_class[u] >= 0 || g.label(u) != g.label(v)) continue;
        // masks with the pair itself masked out; twins are never adjacent
        std::uint64_t pair_mask = (1ull << u) | (1ull << v);
        if ((g.parent_mask(u) & ~pair_mask) == (g.parent_mask(v) & ~pair_mask) &&
            (child[u] & ~pair_mask) == (child[v] & ~pair_mask) &&
            !g.has_edge(u, v) && !g.has_edge(v, u))
          twin_class[u] = next;
      }
      ++next;
    }
  }

  // parent set of v renumbered to placed positions
  std::uint64_t renumbered_parents(int v) const {
    std::uint64_t m = 0;
    for (int u = 0; u < n; ++u)
      if (g.has_edge(u, v)) m |= 1ull << pos_of[u];
    return m;
  }

  void dfs(int depth) {
    if (depth == n) {
      if (!have_best || cur < best) {
        best = cur;
        have_best = true;
      }
      return;
    }
    if (have_best && cur > std::vector(best.begin(), best.begin() + depth)) return;

    // available nodes: all closure-parents placed
    std::vector<int> avail;
    for (int v = 0; v < n; ++v)
      if (pos_of[v] < 0 && (g.parent_mask(v) & ~placed_mask) == 0) avail.push_back(v);

    std::pair<Symbol, std::uint64_t> lo{0, 0};
    bool have_lo = false;
    std::vector<std::pair<std::pair<Symbol, std::uint64_t>, int>> keyed;
    for (int v : avail) {
      std::pair<Symbol, std::uint64_t> k{g.label(v), renumbered_parents(v)};
      keyed.emplace_back(k, v);
      if (!have_lo || k < lo) { lo = k; have_lo = true; }
    }
    std::uint64_t tried_twins = 0;
    for (auto& [k, v] : keyed) {
      if (k != lo) continue;  // only minimal immediate keys can extend a minimal encoding
      if ((tried_twins >> twin_class[v]) & 1u) continue;
      tried_twins |= 1ull << twin_class[v];
      pos_of[v] = depth;
      placed_mask |= 1ull << v;
      cur.push_back(k);
      dfs(depth + 1);
      cur.pop_back();
      placed_mask &= ~(1ull << v);
      pos_of[v] = -1;
    }
  }
};

}  // namespace

const std::string& Episode::canonical_key() const {
  if (!key_.empty()) return key_;
  if (labels_.empty()) {
    key_ = "0:";
    return key_;
  }
  if (node_count() > 10) throw Error("canonical_key: node cap 10 exceeded");
  CanonSearch search(*this);
  search.dfs(0);
  std::ostringstream out;
  out << node_count() << ":";
  for (auto& [label, mask] : search.best) out << label << "," << mask << ";";
  key_ = out.str();
  return key_;
}

std::string Episode::render(const SymbolTable& table) const {
  std::ostringstream out;
  switch (classify()) {
    case EpisodeClass::kSerial: {
      // emit in the (unique) topological order
      std::vector<int> order(node_count());
      for (int v = 0; v < node_count(); ++v) order[std::popcount(parents_[v])] = v;
      for (int i = 0; i < node_count(); ++i)
        out << (i ? ">" : "") << table.token_of(labels_[order[i]]);
      break;
    }
    case EpisodeClass::kParallel: {
      std::vector<std::string> toks;
      for (Symbol a : labels_) toks.push_back(table.token_of(a));
      std::sort(toks.begin(), toks.end());
      for (std::size_t i = 0; i < toks.size(); ++i) out << (i ? "|" : "") << toks[i];
      break;
    }
    case EpisodeClass::kGeneral: {
      out << "[";
      for (int v = 0; v < node_count(); ++v)
        out << (v ? " " : "") << (v + 1) << ":" << table.token_of(labels_[v]);
      out << " |";
      for (auto [u, v] : closure_edges()) out << " " << (u + 1) << ">" << (v + 1);
      out << "]";
      break;
    }
  }
  return out.str();
}

bool Episode::operator==(const Episode& other) const {
  if (node_count() != other.node_count()) return false;
  return canonical_key() == other.canonical_key();
}

std::vector<Episode> prefix_episodes(const Episode& g) {
  int n = g.node_count();
  std::vector<std::uint64_t> seen{0};
  std::vector<std::size_t> frontier{0};
  std::vector<std::uint64_t> masks{0};
  // BFS over downward-closed subsets
  std::unordered_map<std::uint64_t, bool> visited;
  visited[0] = true;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    std::uint64_t s = masks[i];
    for (int v = 0; v < n; ++v) {
      if ((s >> v) & 1u) continue;
      if ((g.parent_mask(v) & ~s) != 0) continue;
      std::uint64_t t = s | (1ull << v);
      if (!visited[t]) {
        visited[t] = true;
        masks.push_back(t);
      }
    }
  }
  std::vector<Episode> out;
  out.reserve(masks.size());
  for (std::uint64_t s : masks) {
    std::vector<Symbol> labels;
    std::vector<int> remap(n, -1);
    for (int v = 0; v < n; ++v)
      if ((s >> v) & 1u) {
        remap[v] = static_cast<int>(labels.size());
        labels.push_back(g.label(v));
      }
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : g.closure_edges())
      if (remap[u] >= 0 && remap[v] >= 0) edges.emplace_back(remap[u], remap[v]);
    out.emplace_back(std::move(labels), edges);
  }
  return out;
}

namespace {

bool embed(const Episode& g, const EventSequence& s, std::vector<int>& assign,
           std::vector<bool>& used, const std::vector<int>& order, std::size_t k) {
  if (k == order.size()) return true;
  int v = order[k];
  std::size_t lo = 1;
  for (int u = 0; u < g.node_count(); ++u)
    if (g.has_edge(u, v)) lo = std::max(lo, static_cast<std::size_t>(assign[u]) + 1);
  for (std::size_t pos = lo; pos <= s.length(); ++pos) {
    if (used[pos] || s.at(pos) != g.label(v)) continue;
    assign[v] = static_cast<int>(pos);
    used[pos] = true;
    if (embed(g, s, assign, used, order, k + 1)) return true;
    used[pos] = false;
  }
  return false;
}

}  // namespace

bool covers_bruteforce(const EventSequence& s, const Episode& g, int max_nodes) {
  if (g.node_count() > max_nodes) throw Error("covers_bruteforce: size guard exceeded");
  if (g.empty()) return true;
  std::vector<std::uint64_t> parents(g.node_count());
  for (int v = 0; v < g.node_count(); ++v) parents[v] = g.parent_mask(v);
  auto order = topo_order(parents);
  std::vector<int> assign(g.node_count(), 0);
  std::vector<bool> used(s.length() + 1, false);
  return embed(g, s, assign, used, order, 0);
}

namespace {

bool embed_sub(const Episode& small, const Episode& big, std::vector<int>& assign,
               std::uint64_t used, int k) {
  if (k == small.node_count()) return true;
  for (int w = 0; w < big.node_count(); ++w) {
    if ((used >> w) & 1u) continue;
    if (big.label(w) != small.label(k)) continue;
    bool ok = true;
    for (int u = 0; u < k && ok; ++u) {
      if (small.has_edge(u, k) && !big.has_edge(assign[u], w)) ok = false;
      if (small.has_edge(k, u) && !big.has_edge(w, assign[u])) ok = false;
    }
    if (!ok) continue;
    assign[k] = w;
    if (embed_sub(small, big, assign, used | (1ull << w), k + 1)) return true;
  }
  return false;
}

}  // namespace

bool is_subepisode(const Episode& small, const Episode& big, int max_nodes) {
  if (big.node_count() > max_nodes) throw Error("is_subepisode: size guard exceeded");
  if (small.node_count() > big.node_count()) return false;
  std::vector<int> assign(small.node_count(), -1);
  return embed_sub(small, big, assign, 0, 0);
}

}  // namespace episcore
