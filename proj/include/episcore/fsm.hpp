#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "episcore/episode.hpp"
#include "episcore/seq.hpp"

namespace episcore {

using StateId = std::uint32_t;

/// Edge label standing for every symbol not otherwise present among the
/// child state's incoming labels. Keeps machines small at large alphabets.
inline constexpr Symbol kWildcard = std::numeric_limits<Symbol>::max();

/// Single-source DAG automaton. Edges run parent -> child; the greedy step
/// moves a state to its parent along a matching incoming edge. A machine is
/// simple when no state has two incoming edges with the same effective label;
/// every constructor here yields simple machines.
struct Machine {
  struct InEdge {
    Symbol label;    // concrete symbol or kWildcard
    StateId parent;
  };

  /// Incoming edges per state; at most one wildcard per state, kept last.
  std::vector<std::vector<InEdge>> in;
  std::vector<std::string> name;  // provenance payload for DOT/debugging
  StateId source = 0;             // the unique state with no incoming edges
  StateId sink = 0;               // distinguished sink where meaningful
  std::size_t alphabet = 0;

  std::size_t n_states() const { return in.size(); }
  std::size_t n_edges() const;

  StateId add_state(std::string label_text);
  void add_edge(StateId parent, StateId child, Symbol label);

  /// One greedy step: parent along the matching incoming edge, else x itself.
  StateId step(StateId x, Symbol a) const;

  /// Effective incoming label set as probability mass under `model`:
  /// per-edge (mass, parent); a wildcard edge carries the residual mass.
  /// residual == 0 entries are kept (they matter for step()).
  double incoming_mass(StateId x, const ProbabilityModel& model,
                       const std::function<void(double, StateId)>& fn) const;

  /// States ordered sources-first (parents before children).
  std::vector<StateId> topological_order() const;

  /// Validates the simple-machine flag and the single-source invariant.
  void check_simple() const;
};

/// Right-to-left fold of step over s (last symbol first).
StateId greedy(const Machine& m, StateId x, const EventSequence& s);
StateId greedy(const Machine& m, StateId x, std::span<const Symbol> symbols);

/// Machine M_G: one state per prefix episode of g, an edge (x_{F-v}, x_F)
/// labelled lab(v) for every sink v of F. Throws when the prefix-state count
/// exceeds max_states.
Machine build_episode_machine(const Episode& g, std::size_t alphabet,
                              std::size_t max_states = 1u << 16);

/// Reverse determinisation: states become state sets, grouped by the closure
/// of parent(X; a). Identity-shaped for machines of strict episodes.
Machine simplify(const Machine& m, std::size_t max_states = 1u << 16);

/// M plus a fresh source J with a wildcard edge (J, old source).
Machine with_new_source(const Machine& m);
/// M plus a fresh sink T with a wildcard edge (old sink, T).
Machine with_new_sink(const Machine& m);

struct JoinResult {
  Machine machine;
  StateId psi = 0;  // collapsed absorbing source (also machine.source)
  /// pair (z1, z2) of constituent states -> joined state; absorbed pairs absent.
  std::unordered_map<std::uint64_t, StateId> pair_state;

  static std::uint64_t key(StateId z1, StateId z2) {
    return (static_cast<std::uint64_t>(z1) << 32) | z2;
  }
  StateId state_of(StateId z1, StateId z2) const;
  bool has_pair(StateId z1, StateId z2) const { return pair_state.count(key(z1, z2)) != 0; }
};

/// Join machine co(M1, M2, seeds): closure of the seed pairs under the
/// pairwise one-symbol step. Pairs satisfying `absorb` collapse into the
/// single absorbing source psi; their incoming transitions become psi-edges.
JoinResult join(const Machine& m1, const Machine& m2,
                const std::vector<std::pair<StateId, StateId>>& seeds,
                const std::function<bool(StateId, StateId)>& absorb = nullptr,
                std::size_t max_states = 1u << 16);

/// Collapsed machine recognising minimal windows: greedy from alpha lands in
/// omega iff the consumed window is minimal (Prop-5 shape).
struct MinimalWindowMachine {
  Machine machine;
  StateId alpha = 0;             // the (S, T) state; scans start here
  StateId psi = 0;               // absorbing collapsed source
  std::vector<StateId> omega;    // (I, Y) states, Y != I
  std::vector<StateId> theta;    // proper intermediates between alpha and omega
  std::vector<bool> in_omega;    // indexed by StateId

  bool is_omega(StateId x) const { return in_omega[x]; }
};

MinimalWindowMachine build_minimal_window_machine(const Episode& g, std::size_t alphabet,
                                                  std::size_t max_states = 1u << 16);

/// Deterministic GraphViz rendering; wildcard edges print as '*'.
std::string to_dot(const Machine& m, const SymbolTable* table = nullptr);

}  // namespace episcore
