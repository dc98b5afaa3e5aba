#include "episcore/fsm.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace episcore {

std::size_t Machine::n_edges() const {
  std::size_t total = 0;
  for (const auto& edges : in) total += edges.size();
  return total;
}

StateId Machine::add_state(std::string label_text) {
  in.emplace_back();
  name.push_back(std::move(label_text));
  return static_cast<StateId>(in.size() - 1);
}

void Machine::add_edge(StateId parent, StateId child, Symbol label) {
  assert(parent != child);
  in[child].push_back({label, parent});
}

StateId Machine::step(StateId x, Symbol a) const {
  StateId fallback = x;
  for (const auto& e : in[x]) {
    if (e.label == a) return e.parent;
    if (e.label == kWildcard) fallback = e.parent;
  }
  return fallback;
}

double Machine::incoming_mass(StateId x, const ProbabilityModel& model,
                              const std::function<void(double, StateId)>& fn) const {
  double explicit_mass = 0.0;
  const Machine::InEdge* wild = nullptr;
  for (const auto& e : in[x]) {
    if (e.label == kWildcard) {
      wild = &e;
      continue;
    }
    double mass = model.of(e.label);
    explicit_mass += mass;
    fn(mass, e.parent);
  }
  double residual = std::max(0.0, 1.0 - explicit_mass);
  if (wild != nullptr) {
    fn(residual, wild->parent);
    return 0.0;  // nothing stays: the wildcard soaks up every remaining symbol
  }
  return residual;
}

std::vector<StateId> Machine::topological_order() const {
  std::size_t n = n_states();
  std::vector<std::vector<StateId>> children(n);
  std::vector<std::size_t> indeg(n, 0);
  for (StateId x = 0; x < n; ++x) {
    indeg[x] = in[x].size();
    for (const auto& e : in[x]) children[e.parent].push_back(x);
  }
  std::vector<StateId> order;
  order.reserve(n);
  std::deque<StateId> ready;
  for (StateId x = 0; x < n; ++x)
    if (indeg[x] == 0) ready.push_back(x);
  while (!ready.empty()) {
    StateId x = ready.front();
    ready.pop_front();
    order.push_back(x);
    for (StateId c : children[x])
      if (--indeg[c] == 0) ready.push_back(c);
  }
  if (order.size() != n) throw Error("machine is cyclic");
  return order;
}

void Machine::check_simple() const {
  std::size_t sources = 0;
  for (StateId x = 0; x < n_states(); ++x) {
    if (in[x].empty()) {
      ++sources;
      if (x != source) throw Error("machine: extra source state " + name[x]);
    }
    std::set<Symbol> labels;
    std::size_t wildcards = 0;
    for (const auto& e : in[x]) {
      if (e.label == kWildcard) {
        ++wildcards;
        continue;
      }
      if (!labels.insert(e.label).second)
        throw Error("machine not simple at state " + name[x]);
    }
    if (wildcards > 1) throw Error("machine: duplicate wildcard at " + name[x]);
  }
  if (sources != 1) throw Error("machine must have exactly one source");
  (void)topological_order();
}

StateId greedy(const Machine& m, StateId x, std::span<const Symbol> symbols) {
  for (auto it = symbols.rbegin(); it != symbols.rend(); ++it) x = m.step(x, *it);
  return x;
}

StateId greedy(const Machine& m, StateId x, const EventSequence& s) {
  return greedy(m, x, s.symbols());
}

namespace {

std::string subset_name(std::uint64_t mask) {
  std::ostringstream out;
  out << "{";
  bool first = true;
  for (int v = 0; v < 64; ++v)
    if ((mask >> v) & 1u) {
      out << (first ? "" : ",") << (v + 1);
      first = false;
    }
  out << "}";
  return out.str();
}

}  // namespace

Machine build_episode_machine(const Episode& g, std::size_t alphabet, std::size_t max_states) {
  if (g.empty()) throw Error("build_episode_machine: empty episode");
  int n = g.node_count();

  // enumerate downward-closed node subsets
  std::vector<std::uint64_t> masks{0};
  std::unordered_map<std::uint64_t, StateId> id_of{{0, 0}};
  for (std::size_t i = 0; i < masks.size(); ++i) {
    std::uint64_t s = masks[i];
    for (int v = 0; v < n; ++v) {
      if ((s >> v) & 1u) continue;
      if ((g.parent_mask(v) & ~s) != 0) continue;
      std::uint64_t t = s | (1ull << v);
      if (id_of.emplace(t, static_cast<StateId>(masks.size())).second) {
        masks.push_back(t);
        if (masks.size() > max_states)
          throw Error("episode machine exceeds state cap (" + std::to_string(max_states) +
                      ") for a " + std::to_string(n) + "-node episode");
      }
    }
  }

  Machine m;
  m.alphabet = alphabet;
  for (std::uint64_t s : masks) m.add_state(subset_name(s));
  m.source = 0;
  std::uint64_t full = (n == 64) ? ~0ull : ((1ull << n) - 1);
  m.sink = id_of.at(full);

  std::vector<std::uint64_t> child_mask(n, 0);
  for (int v = 0; v < n; ++v)
    for (int u = 0; u < n; ++u)
      if (g.has_edge(u, v)) child_mask[u] |= 1ull << v;

  for (std::size_t i = 0; i < masks.size(); ++i) {
    std::uint64_t f = masks[i];
    for (int v = 0; v < n; ++v) {
      if (!((f >> v) & 1u)) continue;
      if ((child_mask[v] & f) != 0) continue;  // v is not a sink within f
      std::uint64_t h = f & ~(1ull << v);
      m.add_edge(id_of.at(h), static_cast<StateId>(i), g.label(v));
    }
  }
  return m;
}

Machine simplify(const Machine& m, std::size_t max_states) {
  using StateSet = std::vector<StateId>;  // sorted
  std::map<StateSet, StateId> id_of;
  std::vector<StateSet> sets;

  Machine out;
  out.alphabet = m.alphabet;

  auto state_of = [&](const StateSet& set) -> StateId {
    auto it = id_of.find(set);
    if (it != id_of.end()) return it->second;
    std::ostringstream label;
    label << "(";
    for (std::size_t i = 0; i < set.size(); ++i)
      label << (i ? " " : "") << m.name[set[i]];
    label << ")";
    StateId id = out.add_state(label.str());
    id_of.emplace(set, id);
    sets.push_back(set);
    if (sets.size() > max_states) throw Error("simplify exceeds state cap");
    return id;
  };

  StateSet sink_set{m.sink};
  StateId sink_id = state_of(sink_set);

  for (std::size_t i = 0; i < sets.size(); ++i) {
    StateSet set = sets[i];
    std::set<Symbol> inc;
    for (StateId x : set)
      for (const auto& e : m.in[x]) inc.insert(e.label);
    for (Symbol a : inc) {
      StateSet sub, stay;
      for (StateId x : set) {
        bool has_a = false;
        for (const auto& e : m.in[x]) {
          if (e.label == a) {
            sub.push_back(e.parent);
            has_a = true;
          }
        }
        if (!has_a) stay.push_back(x);
      }
      std::sort(sub.begin(), sub.end());
      sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
      StateSet parent;
      if (std::binary_search(sub.begin(), sub.end(), m.source)) {
        parent = {m.source};
      } else {
        parent = sub;
        parent.insert(parent.end(), stay.begin(), stay.end());
        std::sort(parent.begin(), parent.end());
        parent.erase(std::unique(parent.begin(), parent.end()), parent.end());
      }
      out.add_edge(state_of(parent), static_cast<StateId>(i), a);
    }
  }

  out.sink = sink_id;
  out.source = state_of({m.source});
  return out;
}

Machine with_new_source(const Machine& m) {
  Machine out = m;
  StateId j = out.add_state("J");
  out.add_edge(j, m.source, kWildcard);
  out.source = j;
  return out;
}

Machine with_new_sink(const Machine& m) {
  Machine out = m;
  StateId t = out.add_state("T");
  out.add_edge(m.sink, t, kWildcard);
  out.sink = t;
  return out;
}

StateId JoinResult::state_of(StateId z1, StateId z2) const {
  auto it = pair_state.find(key(z1, z2));
  if (it == pair_state.end()) throw Error("join: pair state absent");
  return it->second;
}

namespace {

// wildcard-aware step for a symbol outside the explicit incoming labels
StateId residual_step(const Machine& m, StateId x) {
  for (const auto& e : m.in[x])
    if (e.label == kWildcard) return e.parent;
  return x;
}

}  // namespace

JoinResult join(const Machine& m1, const Machine& m2,
                const std::vector<std::pair<StateId, StateId>>& seeds,
                const std::function<bool(StateId, StateId)>& absorb, std::size_t max_states) {
  if (m1.alphabet != m2.alphabet) throw Error("join: alphabet mismatch");
  JoinResult res;
  res.machine.alphabet = m1.alphabet;
  res.psi = res.machine.add_state("psi");
  res.machine.source = res.psi;

  std::vector<std::pair<StateId, StateId>> pairs{{0, 0}};  // placeholder for psi
  auto state_of = [&](StateId z1, StateId z2) -> StateId {
    auto key = JoinResult::key(z1, z2);
    auto it = res.pair_state.find(key);
    if (it != res.pair_state.end()) return it->second;
    StateId id = res.machine.add_state("(" + m1.name[z1] + " " + m2.name[z2] + ")");
    res.pair_state.emplace(key, id);
    pairs.emplace_back(z1, z2);
    if (res.machine.n_states() > max_states) throw Error("join exceeds state cap");
    return id;
  };

  for (auto [s1, s2] : seeds) state_of(s1, s2);

  for (std::size_t i = 1; i < pairs.size(); ++i) {
    auto [z1, z2] = pairs[i];
    StateId self = res.pair_state.at(JoinResult::key(z1, z2));

    std::vector<Symbol> labels;
    for (const auto& e : m1.in[z1])
      if (e.label != kWildcard) labels.push_back(e.label);
    for (const auto& e : m2.in[z2])
      if (e.label != kWildcard) labels.push_back(e.label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());

    auto connect = [&](StateId y1, StateId y2, Symbol label) {
      StateId target = (absorb && absorb(y1, y2)) ? res.psi : state_of(y1, y2);
      res.machine.add_edge(target, self, label);
    };

    for (Symbol a : labels) connect(m1.step(z1, a), m2.step(z2, a), a);

    if (labels.size() < m1.alphabet) {
      StateId w1 = residual_step(m1, z1);
      StateId w2 = residual_step(m2, z2);
      if (w1 != z1 || w2 != z2) connect(w1, w2, kWildcard);
    }
  }

  if (!seeds.empty()) res.machine.sink = res.state_of(seeds[0].first, seeds[0].second);
  return res;
}

MinimalWindowMachine build_minimal_window_machine(const Episode& g, std::size_t alphabet,
                                                  std::size_t max_states) {
  Machine core = simplify(build_episode_machine(g, alphabet, max_states), max_states);
  const StateId i_state = core.source;
  const StateId s_state = core.sink;
  Machine m1 = with_new_source(core);
  Machine m2 = with_new_sink(core);
  const StateId j_state = m1.source;

  auto absorb = [j_state](StateId z1, StateId z2) { return z1 == j_state || z1 == z2; };
  JoinResult raw = join(m1, m2, {{s_state, m2.sink}}, absorb, max_states);
  const Machine& rm = raw.machine;
  StateId raw_alpha = raw.state_of(s_state, m2.sink);

  std::vector<bool> raw_omega(rm.n_states(), false);
  for (const auto& [key, id] : raw.pair_state)
    if (static_cast<StateId>(key >> 32) == i_state) raw_omega[id] = true;

  // keep only states from which omega is reachable via greedy steps
  std::vector<bool> canreach(rm.n_states(), false);
  for (StateId x : rm.topological_order()) {
    if (raw_omega[x]) canreach[x] = true;
    for (const auto& e : rm.in[x])
      if (canreach[e.parent]) canreach[x] = true;
  }
  if (!canreach[raw_alpha]) throw Error("minimal-window machine: alpha cannot reach omega");

  MinimalWindowMachine mw;
  mw.machine.alphabet = rm.alphabet;
  std::vector<StateId> remap(rm.n_states(), 0);
  mw.psi = mw.machine.add_state("psi");
  mw.machine.source = mw.psi;
  for (StateId x = 0; x < rm.n_states(); ++x)
    if (canreach[x]) remap[x] = mw.machine.add_state(rm.name[x]);
  for (StateId x = 0; x < rm.n_states(); ++x) {
    if (!canreach[x]) continue;
    for (const auto& e : rm.in[x]) {
      StateId parent = canreach[e.parent] ? remap[e.parent] : mw.psi;
      mw.machine.add_edge(parent, remap[x], e.label);
    }
  }
  mw.alpha = remap[raw_alpha];
  mw.machine.sink = mw.alpha;
  mw.in_omega.assign(mw.machine.n_states(), false);
  for (StateId x = 0; x < rm.n_states(); ++x)
    if (canreach[x] && raw_omega[x]) {
      mw.omega.push_back(remap[x]);
      mw.in_omega[remap[x]] = true;
    }
  std::sort(mw.omega.begin(), mw.omega.end());

  // theta: states on greedy-descent paths strictly between alpha and omega
  std::vector<bool> from_alpha(mw.machine.n_states(), false);
  from_alpha[mw.alpha] = true;
  std::deque<StateId> queue{mw.alpha};
  while (!queue.empty()) {
    StateId x = queue.front();
    queue.pop_front();
    for (const auto& e : mw.machine.in[x])
      if (!from_alpha[e.parent]) {
        from_alpha[e.parent] = true;
        queue.push_back(e.parent);
      }
  }
  for (StateId x = 0; x < mw.machine.n_states(); ++x)
    if (from_alpha[x] && x != mw.alpha && x != mw.psi && !mw.in_omega[x])
      mw.theta.push_back(x);

  return mw;
}

std::string to_dot(const Machine& m, const SymbolTable* table) {
  std::ostringstream out;
  out << "digraph machine {\n  rankdir=LR;\n";
  for (StateId x = 0; x < m.n_states(); ++x)
    out << "  s" << x << " [label=\"" << m.name[x] << "\"];\n";
  for (StateId x = 0; x < m.n_states(); ++x) {
    auto edges = m.in[x];
    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
      return std::tie(a.parent, a.label) < std::tie(b.parent, b.label);
    });
    for (const auto& e : edges) {
      out << "  s" << e.parent << " -> s" << x << " [label=\"";
      if (e.label == kWildcard)
        out << "*";
      else if (table != nullptr)
        out << table->token_of(e.label);
      else
        out << e.label;
      out << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace episcore
