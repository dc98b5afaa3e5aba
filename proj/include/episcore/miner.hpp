#pragma once

#include <cstddef>
#include <vector>

#include "episcore/episode.hpp"
#include "episcore/scan.hpp"

namespace episcore {

struct MinerConfig {
  std::size_t min_support = 1;   // threshold on disjoint minimal windows
  std::size_t max_window = 15;   // maximal minimal-window length while mining
  std::size_t max_nodes = 5;
  bool emit_parallel = true;
  bool emit_serial = true;
  bool emit_general = true;
  std::size_t workers = 0;       // 0: hardware concurrency
};

struct MinedEpisode {
  Episode episode;
  std::size_t support = 0;
};

/// Exact disjoint-minimal-window support of one episode in s.
std::size_t episode_support(const EventSequence& s, const Episode& g, std::size_t alphabet,
                            std::size_t max_window);

/// Level-wise Apriori over label multisets; returns every parallel episode
/// (as a label multiset) with support >= min_support, up to max_nodes labels.
std::vector<MinedEpisode> mine_parallel(const EventSequence& s, std::size_t alphabet,
                                        const MinerConfig& cfg);

/// Breadth-first order refinement of one frequent parallel episode: each step
/// adds one comparable pair and re-closes transitively; refinements below
/// min_support are pruned. Returns every frequent refinement (the given
/// parallel episode excluded), deduplicated by canonical key.
std::vector<MinedEpisode> refine_orders(const Episode& parallel, const EventSequence& s,
                                        std::size_t alphabet, const MinerConfig& cfg);

/// Drops candidates that have a strict super-episode of equal support in the
/// list (closedness relative to the explored set).
std::vector<MinedEpisode> closedness_filter(std::vector<MinedEpisode> candidates);

/// Full candidate generation: parallel phase, order refinement, strictness
/// and class filters, closedness filter. Output is deterministic: support
/// descending, canonical key ascending.
std::vector<MinedEpisode> mine(const EventSequence& s, std::size_t alphabet,
                               const MinerConfig& cfg);

}  // namespace episcore
