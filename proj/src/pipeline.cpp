#include "episcore/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "parallel.hpp"

namespace episcore {

namespace {

const char* class_name(EpisodeClass cls) {
  switch (cls) {
    case EpisodeClass::kSerial: return "serial";
    case EpisodeClass::kParallel: return "parallel";
    case EpisodeClass::kGeneral: return "general";
  }
  return "?";
}

std::string format_g6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::vector<RankedRecord> rank_episodes(const std::vector<MinedEpisode>& candidates,
                                        const ProbabilityModel& model,
                                        const EventSequence& test, std::size_t alphabet,
                                        const RankConfig& cfg) {
  std::vector<const MinedEpisode*> kept;
  for (const auto& c : candidates)
    if (c.episode.node_count() >= 2) kept.push_back(&c);  // singletons are degenerate

  std::vector<RankedRecord> records(kept.size());
  parallel_for(kept.size(), cfg.workers, [&](std::size_t i) {
    const MinedEpisode& cand = *kept[i];
    RankedRecord& rec = records[i];
    rec.id = i;
    rec.episode = cand.episode;
    rec.cls = cand.episode.classify();
    rec.nodes = cand.episode.node_count();
    rec.support = cand.support;
    try {
      EpisodeStatistics st = compute_episode_statistics(cand.episode, cfg.rho, model);
      rec.mu = st.mu;
      rec.sigma = std::sqrt(std::max(0.0, st.sigma2));
      rec.sigma_clamped = st.sigma_clamped;

      MinimalWindowMachine mw = build_minimal_window_machine(cand.episode, alphabet);
      std::size_t cap = cfg.max_window_scan == 0 ? test.length() : cfg.max_window_scan;
      WindowList windows = minimal_windows(test, mw, cap);
      rec.truncated = windows.truncated_walks > 0;
      auto observed = observed_statistic(windows, cfg.rho);
      rec.n = observed.n;
      rec.r = observed.r;

      auto sc = score(st, observed.r, observed.n, test.length());
      if (sc.has_value() && observed.defined) {
        rec.scorable = true;
        rec.score_value = *sc;
        rec.pvalue = p_value(*sc);
      }
    } catch (const Error& e) {
      rec.error = e.what();
    }
  });

  std::sort(records.begin(), records.end(), [](const RankedRecord& a, const RankedRecord& b) {
    if (a.scorable != b.scorable) return a.scorable;
    if (a.scorable && a.score_value != b.score_value) return a.score_value > b.score_value;
    return a.episode.canonical_key() < b.episode.canonical_key();
  });
  return records;
}

std::vector<RankedRecord> rank_episodes(const std::vector<MinedEpisode>& candidates,
                                        const EventSequence& train, const EventSequence& test,
                                        std::size_t alphabet, const RankConfig& cfg) {
  SymbolTable table = SymbolTable::numeric(alphabet);
  ProbabilityModel model = estimate_probabilities(train, table, cfg.smoothing);
  return rank_episodes(candidates, model, test, alphabet, cfg);
}

void write_ranked_csv(std::ostream& out, const std::vector<RankedRecord>& records,
                      const SymbolTable& table) {
  out << "rank,episode,class,nodes,support,n,r,mu,sigma,score,p_value,flags\n";
  std::size_t rank = 0;
  for (const auto& rec : records) {
    ++rank;
    out << rank << ',' << rec.episode.render(table) << ',' << class_name(rec.cls) << ','
        << rec.nodes << ',' << rec.support << ',' << rec.n << ',';
    if (rec.n > 0) out << format_g6(rec.r);
    out << ',' << format_g6(rec.mu) << ',' << format_g6(rec.sigma) << ',';
    if (rec.scorable)
      out << format_g6(rec.score_value) << ',' << format_g6(rec.pvalue);
    else
      out << ',';
    out << ',';
    bool first = true;
    auto flag = [&](bool on, const char* name) {
      if (!on) return;
      out << (first ? "" : ";") << name;
      first = false;
    };
    flag(!rec.scorable, "unscorable");
    flag(rec.truncated, "truncated");
    flag(rec.sigma_clamped, "sigma_clamped");
    flag(!rec.error.empty(), "error");
    out << '\n';
  }
}

double ks_distance_uniform(const std::vector<double>& sorted_values) {
  double d = 0.0;
  std::size_t n = sorted_values.size();
  for (std::size_t i = 0; i < n; ++i) {
    double lo = static_cast<double>(i) / n;
    double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(sorted_values[i] - lo), std::abs(sorted_values[i] - hi)));
  }
  return d;
}

NormalityResult simulate_normality(const NormalityConfig& cfg) {
  EventSequence train = generate_independent(cfg.alphabet, cfg.train_length,
                                             mix_seed(cfg.seed, 1));
  EventSequence test = generate_independent(cfg.alphabet, cfg.test_length,
                                            mix_seed(cfg.seed, 2));

  MinerConfig miner;
  miner.min_support = cfg.threshold;
  miner.max_window = cfg.max_window;
  miner.max_nodes = 5;
  miner.workers = cfg.workers;
  auto candidates = mine(train, cfg.alphabet, miner);

  RankConfig rank_cfg;
  rank_cfg.rho = cfg.rho;
  rank_cfg.workers = cfg.workers;
  ProbabilityModel model = ProbabilityModel::uniform(cfg.alphabet);
  if (cfg.learned_probabilities) {
    SymbolTable table = SymbolTable::numeric(cfg.alphabet);
    model = estimate_probabilities(train, table, rank_cfg.smoothing);
  }
  auto records = rank_episodes(candidates, model, test, cfg.alphabet, rank_cfg);

  NormalityResult result;
  for (const auto& rec : records)
    if (rec.scorable) result.pvalues.push_back(rec.pvalue);
  result.episodes_ranked = result.pvalues.size();
  std::sort(result.pvalues.begin(), result.pvalues.end());
  result.ks_distance = ks_distance_uniform(result.pvalues);
  return result;
}

void write_normality_csv(std::ostream& out, const NormalityResult& result) {
  out << "p_value,cumulative_proportion\n";
  char buf[64];
  std::size_t n = result.pvalues.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g", result.pvalues[i],
                  static_cast<double>(i + 1) / static_cast<double>(n));
    out << buf << '\n';
  }
}

MachineReport inspect_episode(const Episode& g, std::size_t alphabet) {
  MachineReport rep;
  rep.episode_nodes = static_cast<std::size_t>(g.node_count());
  Machine mg = build_episode_machine(g, alphabet);
  rep.mg_states = mg.n_states();
  rep.mg_edges = mg.n_edges();
  rep.mg_dot = to_dot(mg);
  Machine simple = simplify(mg);
  rep.simple_states = simple.n_states();
  rep.simple_edges = simple.n_edges();
  rep.simple_dot = to_dot(simple);
  MinimalWindowMachine mw = build_minimal_window_machine(g, alphabet);
  rep.mw_states = mw.machine.n_states();
  rep.mw_edges = mw.machine.n_edges();
  rep.mw_dot = to_dot(mw.machine);
  if (!mw.theta.empty()) {
    std::vector<std::pair<StateId, StateId>> seeds;
    for (StateId t : mw.theta) seeds.emplace_back(t, mw.alpha);
    StateId psi = mw.psi;
    JoinResult star = join(mw.machine, mw.machine, seeds,
                           [psi](StateId z1, StateId z2) { return z1 == psi || z2 == psi; });
    rep.cross_states = star.machine.n_states();
    rep.cross_edges = star.machine.n_edges();
  }
  return rep;
}

}  // namespace episcore
