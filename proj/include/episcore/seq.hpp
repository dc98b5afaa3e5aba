#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace episcore {

using Symbol = std::uint32_t;

/// Thrown on violated preconditions and malformed data.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense token <-> symbol-id bijection, ids assigned in first-appearance order.
class SymbolTable {
 public:
  SymbolTable() = default;

  Symbol intern(const std::string& token);
  /// Returns the id of a known token, throws if absent.
  Symbol id_of(const std::string& token) const;
  bool contains(const std::string& token) const { return index_.count(token) != 0; }
  const std::string& token_of(Symbol id) const;
  std::size_t size() const { return tokens_.size(); }

  /// Table with tokens "0", "1", ... for synthetic alphabets.
  static SymbolTable numeric(std::size_t alphabet);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, Symbol> index_;
};

/// Immutable symbol sequence. Storage is 0-based; every public position
/// argument and result is 1-based, matching s = s_1 ... s_L.
class EventSequence {
 public:
  EventSequence() = default;
  explicit EventSequence(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}

  std::size_t length() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  Symbol at(std::size_t pos_1based) const { return symbols_[pos_1based - 1]; }
  std::span<const Symbol> symbols() const { return symbols_; }

  /// Inclusive 1-based slice s[i, j]; empty when j < i.
  EventSequence slice(std::size_t i, std::size_t j) const;

 private:
  std::vector<Symbol> symbols_;
};

/// Per-symbol occurrence probabilities; strictly positive and summing to 1.
struct ProbabilityModel {
  std::vector<double> p;
  double smoothing = 0.0;

  double of(Symbol a) const { return p[a]; }
  std::size_t alphabet() const { return p.size(); }
  static ProbabilityModel uniform(std::size_t alphabet);
  void validate() const;  // throws unless sum==1 within 1e-12 and all p > 0
};

struct SequenceData {
  SymbolTable table;
  EventSequence sequence;
};

/// Interns tokens in first-appearance order. Throws on empty input.
SequenceData intern(std::span<const std::string> tokens);

/// Inverse of intern for a known table.
std::vector<std::string> render(const EventSequence& s, const SymbolTable& table);

/// train = s[1, floor(fraction*L)], test = the rest. 0 < fraction < 1.
std::pair<EventSequence, EventSequence> split(const EventSequence& s, double fraction);

/// p(a) = (count(a) + smoothing) / (L + smoothing*|alphabet|).
/// Throws, naming the symbol, if some symbol would get probability 0.
ProbabilityModel estimate_probabilities(const EventSequence& s, const SymbolTable& table,
                                        double smoothing);

/// i.i.d. uniform symbols over a dense alphabet; reproducible by seed.
EventSequence generate_independent(std::size_t alphabet, std::size_t length,
                                   std::uint64_t seed);

class Episode;  // episode.hpp

struct PlantedData {
  EventSequence sequence;
  std::vector<Episode> episodes;  // ground-truth serial patterns
};

/// Uniform background with `n_patterns` serial patterns planted `occurrences`
/// times each at non-overlapping anchors; a background event is inserted
/// between consecutive pattern events with probability gap_prob.
PlantedData generate_planted(std::size_t alphabet, std::size_t length, std::size_t n_patterns,
                             std::size_t pattern_len, std::size_t occurrences, double gap_prob,
                             std::uint64_t seed);

/// splitmix64; used to derive per-shard seeds from a root seed.
std::uint64_t mix_seed(std::uint64_t root, std::uint64_t counter);

}  // namespace episcore
