#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "episcore/miner.hpp"
#include "episcore/stats.hpp"

namespace episcore {

/// One row of ranked output.
struct RankedRecord {
  std::size_t id = 0;            // input order in the candidate file
  Episode episode;
  std::string rendering;
  EpisodeClass cls = EpisodeClass::kGeneral;
  int nodes = 0;
  std::size_t support = 0;       // training-side support from the miner
  std::size_t n = 0;             // minimal windows found in the test sequence
  double r = 0;
  double mu = 0;
  double sigma = 0;
  double score_value = 0;
  double pvalue = 0;
  bool scorable = false;
  bool truncated = false;        // a scan walk hit the max_len bound
  bool sigma_clamped = false;
  std::string error;             // non-empty when statistics failed outright
};

struct RankConfig {
  double rho = 0.5;
  std::size_t max_window_scan = 0;  // scan bound while ranking; 0: unbounded.
                                    // Bounding drops long windows from n and
                                    // biases r upward, so ranking defaults to
                                    // the full walk (it ends at psi anyway).
  double smoothing = 1.0;           // Laplace smoothing for the model
  std::size_t workers = 0;          // 0: hardware concurrency
};

/// Scores candidates against `test` under a model estimated from `train`
/// (or a caller-provided model). Singletons are dropped; per-episode
/// failures set flags and never abort the batch. Sorted by score descending,
/// unscorable records at the bottom.
std::vector<RankedRecord> rank_episodes(const std::vector<MinedEpisode>& candidates,
                                        const EventSequence& train, const EventSequence& test,
                                        std::size_t alphabet, const RankConfig& cfg);
std::vector<RankedRecord> rank_episodes(const std::vector<MinedEpisode>& candidates,
                                        const ProbabilityModel& model,
                                        const EventSequence& test, std::size_t alphabet,
                                        const RankConfig& cfg);

void write_ranked_csv(std::ostream& out, const std::vector<RankedRecord>& records,
                      const SymbolTable& table);

struct NormalityConfig {
  std::size_t alphabet = 100;
  std::size_t train_length = 10'000;
  std::size_t test_length = 1'000'000;
  std::size_t threshold = 12;
  std::size_t max_window = 20;
  double rho = 0.5;
  std::uint64_t seed = 1;
  bool learned_probabilities = false;  // default: true uniform model
  std::size_t workers = 0;
};

struct NormalityResult {
  std::vector<double> pvalues;  // sorted ascending, one per scorable episode
  double ks_distance = 0;       // sup |empirical CDF - uniform|
  std::size_t episodes_ranked = 0;
};

/// The independent-sequences experiment: generate train/test, mine the train
/// half, rank against the test half, collect Phi(-score) values.
NormalityResult simulate_normality(const NormalityConfig& cfg);

void write_normality_csv(std::ostream& out, const NormalityResult& result);

/// Kolmogorov distance between sorted values in [0,1] and the uniform CDF.
double ks_distance_uniform(const std::vector<double>& sorted_values);

/// Machine-size report for one episode (cmd inspect).
struct MachineReport {
  std::size_t episode_nodes = 0;
  std::size_t mg_states = 0, mg_edges = 0;
  std::size_t simple_states = 0, simple_edges = 0;
  std::size_t mw_states = 0, mw_edges = 0;
  std::size_t cross_states = 0, cross_edges = 0;
  std::string mg_dot, simple_dot, mw_dot;
};
MachineReport inspect_episode(const Episode& g, std::size_t alphabet);

}  // namespace episcore
