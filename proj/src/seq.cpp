#include "episcore/seq.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "episcore/episode.hpp"

namespace episcore {

Symbol SymbolTable::intern(const std::string& token) {
  auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  Symbol id = static_cast<Symbol>(tokens_.size());
  tokens_.push_back(token);
  index_.emplace(token, id);
  return id;
}

Symbol SymbolTable::id_of(const std::string& token) const {
  auto it = index_.find(token);
  if (it == index_.end()) throw Error("unknown token: " + token);
  return it->second;
}

const std::string& SymbolTable::token_of(Symbol id) const {
  if (id >= tokens_.size()) throw Error("symbol id out of range");
  return tokens_[id];
}

SymbolTable SymbolTable::numeric(std::size_t alphabet) {
  SymbolTable t;
  for (std::size_t i = 0; i < alphabet; ++i) t.intern(std::to_string(i));
  return t;
}

EventSequence EventSequence::slice(std::size_t i, std::size_t j) const {
  if (i < 1 || j > symbols_.size()) throw Error("slice out of range");
  if (j < i) return EventSequence{};
  return EventSequence(std::vector<Symbol>(symbols_.begin() + (i - 1), symbols_.begin() + j));
}

ProbabilityModel ProbabilityModel::uniform(std::size_t alphabet) {
  if (alphabet == 0) throw Error("empty alphabet");
  ProbabilityModel m;
  m.p.assign(alphabet, 1.0 / static_cast<double>(alphabet));
  return m;
}

void ProbabilityModel::validate() const {
  double sum = std::accumulate(p.begin(), p.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12) throw Error("probabilities do not sum to 1");
  for (std::size_t a = 0; a < p.size(); ++a)
    if (!(p[a] > 0.0)) throw Error("non-positive probability for symbol " + std::to_string(a));
}

SequenceData intern(std::span<const std::string> tokens) {
  if (tokens.empty()) throw Error("intern: empty token list");
  SequenceData out;
  std::vector<Symbol> symbols;
  symbols.reserve(tokens.size());
  for (const auto& tok : tokens) symbols.push_back(out.table.intern(tok));
  out.sequence = EventSequence(std::move(symbols));
  return out;
}

std::vector<std::string> render(const EventSequence& s, const SymbolTable& table) {
  std::vector<std::string> out;
  out.reserve(s.length());
  for (Symbol a : s.symbols()) out.push_back(table.token_of(a));
  return out;
}

std::pair<EventSequence, EventSequence> split(const EventSequence& s, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw Error("split: fraction must be in (0,1)");
  auto cut = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(s.length())));
  return {s.slice(1, cut), s.slice(cut + 1, s.length())};
}

ProbabilityModel estimate_probabilities(const EventSequence& s, const SymbolTable& table,
                                        double smoothing) {
  if (smoothing < 0.0) throw Error("estimate_probabilities: smoothing must be >= 0");
  std::vector<double> counts(table.size(), 0.0);
  for (Symbol a : s.symbols()) {
    if (a >= counts.size()) throw Error("sequence symbol outside the table");
    counts[a] += 1.0;
  }
  double denom = static_cast<double>(s.length()) + smoothing * static_cast<double>(table.size());
  ProbabilityModel model;
  model.smoothing = smoothing;
  model.p.resize(counts.size());
  for (std::size_t a = 0; a < counts.size(); ++a) {
    model.p[a] = (counts[a] + smoothing) / denom;
    if (!(model.p[a] > 0.0))
      throw Error("zero probability for symbol '" + table.token_of(static_cast<Symbol>(a)) +
                  "'; use smoothing > 0");
  }
  return model;
}

EventSequence generate_independent(std::size_t alphabet, std::size_t length,
                                   std::uint64_t seed) {
  if (alphabet < 1) throw Error("generate_independent: alphabet must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Symbol> dist(0, static_cast<Symbol>(alphabet - 1));
  std::vector<Symbol> symbols(length);
  for (auto& a : symbols) a = dist(rng);
  return EventSequence(std::move(symbols));
}

PlantedData generate_planted(std::size_t alphabet, std::size_t length, std::size_t n_patterns,
                             std::size_t pattern_len, std::size_t occurrences, double gap_prob,
                             std::uint64_t seed) {
  if (alphabet < n_patterns * pattern_len)
    throw Error("generate_planted: alphabet too small for distinct pattern labels");
  if (pattern_len < 1) throw Error("generate_planted: pattern_len must be >= 1");
  std::mt19937_64 rng(seed);

  PlantedData out;
  std::vector<Symbol> seq(length);
  std::uniform_int_distribution<Symbol> background(0, static_cast<Symbol>(alphabet - 1));
  for (auto& a : seq) a = background(rng);

  // distinct labels across all patterns
  std::vector<Symbol> pool(alphabet);
  std::iota(pool.begin(), pool.end(), 0u);
  std::shuffle(pool.begin(), pool.end(), rng);

  std::vector<std::pair<std::size_t, std::size_t>> occupied;  // [start, end] 0-based
  std::bernoulli_distribution gap(gap_prob);

  for (std::size_t pat = 0; pat < n_patterns; ++pat) {
    std::vector<Symbol> labels(pool.begin() + pat * pattern_len,
                               pool.begin() + (pat + 1) * pattern_len);
    out.episodes.push_back(Episode::serial(labels));

    for (std::size_t occ = 0; occ < occurrences; ++occ) {
      // span layout: pattern event, then an optional single gap slot before
      // each following pattern event
      std::vector<bool> gaps(pattern_len > 0 ? pattern_len - 1 : 0);
      std::size_t span = pattern_len;
      for (std::size_t g = 0; g + 1 < pattern_len; ++g) {
        gaps[g] = gap(rng);
        if (gaps[g]) ++span;
      }
      if (span > length) throw Error("generate_planted: sequence too short");

      std::uniform_int_distribution<std::size_t> anchor_dist(0, length - span);
      std::size_t anchor = 0;
      bool placed = false;
      for (int attempt = 0; attempt < 10'000; ++attempt) {
        anchor = anchor_dist(rng);
        std::size_t hi = anchor + span - 1;
        bool clash = false;
        for (const auto& [s0, e0] : occupied)
          if (anchor <= e0 && s0 <= hi) { clash = true; break; }
        if (!clash) { placed = true; break; }
      }
      if (!placed)
        throw Error("generate_planted: no room for requested occurrences");
      occupied.emplace_back(anchor, anchor + span - 1);

      std::size_t pos = anchor;
      for (std::size_t k = 0; k < pattern_len; ++k) {
        seq[pos++] = labels[k];
        if (k + 1 < pattern_len && gaps[k]) pos++;  // gap slot keeps its background draw
      }
    }
  }

  out.sequence = EventSequence(std::move(seq));
  return out;
}

std::uint64_t mix_seed(std::uint64_t root, std::uint64_t counter) {
  std::uint64_t z = root + 0x9e3779b97f4a7c15ull * (counter + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace episcore
