#include "episcore/miner.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "parallel.hpp"

namespace episcore {

std::size_t episode_support(const EventSequence& s, const Episode& g, std::size_t alphabet,
                            std::size_t max_window) {
  MinimalWindowMachine mw = build_minimal_window_machine(g, alphabet);
  return disjoint_support(minimal_windows(s, mw, max_window));
}

namespace {

using LabelMultiset = std::vector<Symbol>;  // sorted

struct MultisetHash {
  std::size_t operator()(const LabelMultiset& v) const {
    std::size_t h = 1469598103934665603ull;
    for (Symbol a : v) {
      h ^= a + 0x9e3779b9;
      h *= 1099511628211ull;
    }
    return h;
  }
};

/// Upper bound on minimal-window counts of every label pair: the number of
/// position pairs (j, i), i - j < max_window, whose symbols form the pair.
/// Every minimal window of a 2-label parallel episode is such a pair.
std::unordered_map<std::uint64_t, std::size_t> pair_cooccurrence(const EventSequence& s,
                                                                 std::size_t max_window) {
  std::unordered_map<std::uint64_t, std::size_t> counts;
  const auto symbols = s.symbols();
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    std::size_t j0 = (i + 1 > max_window) ? i + 1 - max_window : 0;
    for (std::size_t j = j0; j < i; ++j) {
      Symbol a = std::min(symbols[j], symbols[i]);
      Symbol b = std::max(symbols[j], symbols[i]);
      ++counts[(static_cast<std::uint64_t>(a) << 32) | b];
    }
  }
  return counts;
}

std::vector<std::size_t> count_supports(const EventSequence& s, std::size_t alphabet,
                                        const MinerConfig& cfg,
                                        const std::vector<Episode>& episodes) {
  std::vector<std::size_t> supports(episodes.size(), 0);
  parallel_for(episodes.size(), cfg.workers, [&](std::size_t i) {
    supports[i] = episode_support(s, episodes[i], alphabet, cfg.max_window);
  });
  return supports;
}

}  // namespace

std::vector<MinedEpisode> mine_parallel(const EventSequence& s, std::size_t alphabet,
                                        const MinerConfig& cfg) {
  std::vector<MinedEpisode> out;

  // level 1: plain symbol counts are exact singleton supports
  std::vector<std::size_t> counts(alphabet, 0);
  for (Symbol a : s.symbols()) ++counts[a];
  std::vector<bool> frequent1(alphabet, false);
  for (Symbol a = 0; a < alphabet; ++a)
    if (counts[a] >= cfg.min_support) {
      frequent1[a] = true;
      out.push_back({Episode::single(a), counts[a]});
    }
  if (cfg.max_nodes < 2) return out;

  // level 2: co-occurrence pre-screen, then exact counting
  std::unordered_set<LabelMultiset, MultisetHash> frequent_prev;
  {
    std::vector<LabelMultiset> candidates;
    for (const auto& [key, bound] : pair_cooccurrence(s, cfg.max_window)) {
      if (bound < cfg.min_support) continue;
      Symbol a = static_cast<Symbol>(key >> 32);
      Symbol b = static_cast<Symbol>(key & 0xffffffffu);
      if (frequent1[a] && frequent1[b]) candidates.push_back({a, b});
    }
    std::sort(candidates.begin(), candidates.end());
    std::vector<Episode> episodes;
    episodes.reserve(candidates.size());
    for (const auto& labels : candidates) episodes.push_back(Episode::parallel(labels));
    auto supports = count_supports(s, alphabet, cfg, episodes);
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (supports[i] >= cfg.min_support) {
        frequent_prev.insert(candidates[i]);
        out.push_back({std::move(episodes[i]), supports[i]});
      }
  }

  // levels >= 3: Apriori join on sorted multisets
  for (std::size_t level = 3; level <= cfg.max_nodes && !frequent_prev.empty(); ++level) {
    std::vector<LabelMultiset> prev(frequent_prev.begin(), frequent_prev.end());
    std::sort(prev.begin(), prev.end());
    std::vector<LabelMultiset> candidates;
    for (std::size_t i = 0; i < prev.size(); ++i) {
      for (std::size_t j = i + 1; j < prev.size(); ++j) {
        if (!std::equal(prev[i].begin(), prev[i].end() - 1, prev[j].begin())) break;
        LabelMultiset cand = prev[i];
        cand.push_back(prev[j].back());
        bool ok = true;
        for (std::size_t drop = 0; drop + 2 < cand.size() && ok; ++drop) {
          LabelMultiset sub = cand;
          sub.erase(sub.begin() + drop);
          ok = frequent_prev.count(sub) != 0;
        }
        if (ok) candidates.push_back(std::move(cand));
      }
    }
    std::vector<Episode> episodes;
    episodes.reserve(candidates.size());
    for (const auto& labels : candidates) episodes.push_back(Episode::parallel(labels));
    auto supports = count_supports(s, alphabet, cfg, episodes);
    frequent_prev.clear();
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (supports[i] >= cfg.min_support) {
        frequent_prev.insert(candidates[i]);
        out.push_back({std::move(episodes[i]), supports[i]});
      }
  }
  return out;
}

std::vector<MinedEpisode> refine_orders(const Episode& parallel, const EventSequence& s,
                                        std::size_t alphabet, const MinerConfig& cfg) {
  std::vector<MinedEpisode> out;
  std::unordered_set<std::string> visited{parallel.canonical_key()};
  std::vector<Episode> frontier{parallel};

  while (!frontier.empty()) {
    std::vector<Episode> level;
    for (const Episode& e : frontier) {
      for (int u = 0; u < e.node_count(); ++u) {
        for (int v = 0; v < e.node_count(); ++v) {
          if (u == v || e.has_edge(u, v) || e.has_edge(v, u)) continue;
          Episode refined = e.with_edge(u, v);
          if (visited.insert(refined.canonical_key()).second)
            level.push_back(std::move(refined));
        }
      }
    }
    auto supports = count_supports(s, alphabet, cfg, level);
    frontier.clear();
    for (std::size_t i = 0; i < level.size(); ++i) {
      if (supports[i] < cfg.min_support) continue;
      frontier.push_back(level[i]);
      out.push_back({std::move(level[i]), supports[i]});
    }
  }
  return out;
}

std::vector<MinedEpisode> closedness_filter(std::vector<MinedEpisode> candidates) {
  std::map<std::size_t, std::vector<std::size_t>> by_support;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    by_support[candidates[i].support].push_back(i);

  std::vector<bool> drop(candidates.size(), false);
  for (const auto& [support, group] : by_support) {
    for (std::size_t a : group) {
      for (std::size_t b : group) {
        if (a == b) continue;
        const Episode& small = candidates[a].episode;
        const Episode& big = candidates[b].episode;
        if (small.node_count() > big.node_count() || big.node_count() > 8) continue;
        if (small.canonical_key() == big.canonical_key()) continue;
        if (is_subepisode(small, big)) {
          drop[a] = true;
          break;
        }
      }
    }
  }
  std::vector<MinedEpisode> out;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (!drop[i]) out.push_back(std::move(candidates[i]));
  return out;
}

std::vector<MinedEpisode> mine(const EventSequence& s, std::size_t alphabet,
                               const MinerConfig& cfg) {
  std::vector<MinedEpisode> all = mine_parallel(s, alphabet, cfg);
  std::size_t n_parallel = all.size();
  for (std::size_t i = 0; i < n_parallel; ++i) {
    if (all[i].episode.node_count() < 2) continue;
    auto refined = refine_orders(all[i].episode, s, alphabet, cfg);
    for (auto& r : refined) all.push_back(std::move(r));
  }

  std::vector<MinedEpisode> kept;
  for (auto& c : all) {
    if (!c.episode.is_strict()) continue;
    switch (c.episode.classify()) {
      case EpisodeClass::kParallel:
        if (!cfg.emit_parallel) continue;
        break;
      case EpisodeClass::kSerial:
        if (!cfg.emit_serial) continue;
        break;
      case EpisodeClass::kGeneral:
        if (!cfg.emit_general) continue;
        break;
    }
    kept.push_back(std::move(c));
  }
  kept = closedness_filter(std::move(kept));
  std::sort(kept.begin(), kept.end(), [](const MinedEpisode& a, const MinedEpisode& b) {
    if (a.support != b.support) return a.support > b.support;
    return a.episode.canonical_key() < b.episode.canonical_key();
  });
  return kept;
}

}  // namespace episcore
