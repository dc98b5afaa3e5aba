#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "episcore/episode.hpp"
#include "episcore/miner.hpp"
#include "episcore/seq.hpp"

namespace episcore {

/// Sequence files: UTF-8 text, whitespace-separated tokens, '#' starts a
/// comment line.
SequenceData read_sequence(std::istream& in);
SequenceData read_sequence_file(const std::string& path);
void write_sequence(std::ostream& out, const EventSequence& s, const SymbolTable& table,
                    std::size_t tokens_per_line = 20);
void write_sequence_file(const std::string& path, const EventSequence& s,
                         const SymbolTable& table);

/// Probability model files: CSV "token,probability".
void write_probability_csv(std::ostream& out, const ProbabilityModel& model,
                           const SymbolTable& table);
ProbabilityModel read_probability_csv(std::istream& in, const SymbolTable& table);

/// Episode files: one block per episode, blank-line separated:
///   nodes 1:fox 2:jump
///   edges 1>2
///   support 12        (optional)
/// Parse errors carry line numbers.
void write_episodes(std::ostream& out, const std::vector<MinedEpisode>& episodes,
                    const SymbolTable& table);
std::vector<MinedEpisode> read_episodes(std::istream& in, const SymbolTable& table);
void write_episodes_file(const std::string& path, const std::vector<MinedEpisode>& episodes,
                         const SymbolTable& table);
std::vector<MinedEpisode> read_episodes_file(const std::string& path, const SymbolTable& table);

/// JSON-compatible export: {"nodes":[...], "labels":[...], "edges":[[u,v],...]}.
std::string episode_to_json(const Episode& g, const SymbolTable& table);

}  // namespace episcore
