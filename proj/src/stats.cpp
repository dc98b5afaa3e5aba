#include "episcore/stats.hpp"

#include <cmath>

namespace episcore {

double pgreedy(const Machine& m, StateId x, const std::vector<bool>& in_y, int length,
               const ProbabilityModel& model) {
  if (model.alphabet() != m.alphabet) throw Error("pgreedy: alphabet mismatch");
  std::vector<double> dist(m.n_states(), 0.0), next(m.n_states(), 0.0);
  dist[x] = 1.0;
  for (int l = 0; l < length; ++l) {
    std::fill(next.begin(), next.end(), 0.0);
    for (StateId y = 0; y < m.n_states(); ++y) {
      double mass = dist[y];
      if (mass == 0.0) continue;
      double stay = m.incoming_mass(
          y, model, [&](double edge_mass, StateId parent) { next[parent] += edge_mass * mass; });
      next[y] += stay * mass;
    }
    dist.swap(next);
  }
  double total = 0.0;
  for (StateId y = 0; y < m.n_states(); ++y)
    if (in_y[y]) total += dist[y];
  return total;
}

MomentTable moments(const Machine& m, const MomentTable& init, const MomentTable& hmap,
                    double c, const ProbabilityModel& model) {
  if (model.alphabet() != m.alphabet) throw Error("moments: alphabet mismatch");
  MomentTable out(m.n_states(), 0.0);
  for (StateId x : m.topological_order()) {
    if (m.in[x].empty()) continue;  // greedy never leaves; never a valid target
    double sum = 0.0;
    double q = m.incoming_mass(x, model, [&](double mass, StateId parent) {
      double ival = init.empty() ? 0.0 : init[parent];
      sum += mass * (out[parent] + ival);
    });
    double r = c - q;
    if (!(r > 0.0))
      throw Error("moments: non-positive denominator c - q at state " + m.name[x]);
    double ix = init.empty() ? 0.0 : init[x];
    double hx = hmap.empty() ? 0.0 : hmap[x];
    out[x] = (q * ix - hx + sum) / r;
  }
  return out;
}

namespace {

MomentTable indicator_init(const MinimalWindowMachine& mw, double f0) {
  MomentTable init(mw.machine.n_states(), 0.0);
  for (StateId w : mw.omega) init[w] = f0;
  return init;
}

}  // namespace

EpisodeMoments episode_moments(const MinimalWindowMachine& mw, double rho,
                               const ProbabilityModel& model) {
  if (!(rho > 0.0 && rho < 1.0)) throw Error("episode_moments: rho must be in (0,1)");
  const Machine& m = mw.machine;
  const MomentTable none;

  MomentTable m_one = moments(m, indicator_init(mw, 1.0), none, 1.0, model);
  MomentTable neg_one(m_one);
  for (double& v : neg_one) v = -v;
  MomentTable m_len = moments(m, MomentTable(m.n_states(), 0.0), neg_one, 1.0, model);
  MomentTable m_rho = moments(m, indicator_init(mw, 1.0), none, 1.0 / rho, model);
  MomentTable m_rho2 = moments(m, indicator_init(mw, 1.0), none, 1.0 / (rho * rho), model);
  MomentTable h_rho_len(m_rho);
  for (double& v : h_rho_len) v = -v / rho;
  MomentTable m_rho_len =
      moments(m, MomentTable(m.n_states(), 0.0), h_rho_len, 1.0 / rho, model);

  EpisodeMoments em;
  em.p = m_one[mw.alpha];
  em.v = m_len[mw.alpha];
  em.q = m_rho[mw.alpha];
  em.z2 = m_rho2[mw.alpha];
  em.w = m_rho_len[mw.alpha];
  return em;
}

namespace {

struct CrossMachinery {
  JoinResult star;               // join(M, M, {(theta, alpha)}) with psi-pairs collapsed
  std::vector<bool> is_theta;    // over M's states
};

CrossMachinery build_cross_machinery(const MinimalWindowMachine& mw, std::size_t max_states) {
  CrossMachinery cm;
  cm.is_theta.assign(mw.machine.n_states(), false);
  for (StateId t : mw.theta) cm.is_theta[t] = true;
  std::vector<std::pair<StateId, StateId>> seeds;
  for (StateId t : mw.theta) seeds.emplace_back(t, mw.alpha);
  StateId psi = mw.psi;
  cm.star = join(mw.machine, mw.machine, seeds,
                 [psi](StateId z1, StateId z2) { return z1 == psi || z2 == psi; }, max_states);
  return cm;
}

double cross_moment_with(const MinimalWindowMachine& mw, const CrossMachinery& cm, double rho,
                         int P, int Q, int R, const ProbabilityModel& model) {
  const Machine& m = mw.machine;
  MomentTable m1 = moments(m, indicator_init(mw, 1.0), {}, std::pow(rho, -P), model);

  MomentTable init2(cm.star.machine.n_states(), 0.0);
  for (const auto& [key, id] : cm.star.pair_state) {
    StateId z1 = static_cast<StateId>(key >> 32);
    StateId z2 = static_cast<StateId>(key & 0xffffffffu);
    if (mw.is_omega(z1) && cm.is_theta[z2]) init2[id] = m1[z2];
  }
  MomentTable m2 = moments(cm.star.machine, init2, {}, std::pow(rho, -Q), model);

  MomentTable init3(m.n_states(), 0.0);
  for (StateId t : mw.theta) init3[t] = m2[cm.star.state_of(t, mw.alpha)];
  MomentTable m3 = moments(m, init3, {}, std::pow(rho, -R), model);
  return m3[mw.alpha];
}

}  // namespace

double cross_moment_f(const MinimalWindowMachine& mw, double rho, int P, int Q, int R,
                      const ProbabilityModel& model) {
  if (mw.theta.empty()) return 0.0;
  CrossMachinery cm = build_cross_machinery(mw, 1u << 16);
  return cross_moment_with(mw, cm, rho, P, Q, R, model);
}

EpisodeStatistics assemble(const EpisodeMoments& em, double f000, double f110, double f011,
                           double f121, double rho, int episode_nodes) {
  EpisodeStatistics st;
  st.rho = rho;
  st.p = em.p;
  st.v = em.v;
  st.q = em.q;
  st.z2 = em.z2;
  st.w = em.w;
  st.f000 = f000;
  st.f110 = f110;
  st.f011 = f011;
  st.f121 = f121;

  if (!(st.p > 0.0)) {
    st.scorable = false;
    return st;
  }

  st.d22 = f000 - (st.v - st.p) * st.p;
  st.d12 = f110 - (st.w - st.q) * st.p;
  st.d21 = f011 - (st.v - st.p) * st.q;
  st.d11 = f121 - (st.w - st.q) * st.q;

  st.c11 = (st.z2 - st.q * st.q) + 2.0 * st.d11;
  st.c22 = st.p * (1.0 - st.p) + 2.0 * st.d22;
  // E[X1 Z1] = E[Z1] = q since Z1 = X1 Z1
  st.c12 = (st.q - st.p * st.q) + st.d12 + st.d21;

  st.mu = st.q / st.p;
  if (episode_nodes == 1) {
    // Z1 = rho * X1 pointwise: the ratio is deterministic
    st.sigma2 = 0.0;
    st.scorable = false;
    return st;
  }
  double s2 = (st.c11 - 2.0 * st.mu * st.c12 + st.mu * st.mu * st.c22) / (st.p * st.p);
  if (s2 < 0.0) {
    if (s2 < -1e-9) throw Error("assemble: negative variance " + std::to_string(s2));
    s2 = 0.0;
    st.sigma_clamped = true;
  }
  st.sigma2 = s2;
  st.scorable = s2 > 0.0;
  return st;
}

EpisodeStatistics compute_episode_statistics(const Episode& g, double rho,
                                             const ProbabilityModel& model,
                                             std::size_t max_states) {
  MinimalWindowMachine mw = build_minimal_window_machine(g, model.alphabet(), max_states);
  EpisodeMoments em = episode_moments(mw, rho, model);
  double f000 = 0, f110 = 0, f011 = 0, f121 = 0;
  if (!mw.theta.empty()) {
    CrossMachinery cm = build_cross_machinery(mw, max_states);
    f000 = cross_moment_with(mw, cm, rho, 0, 0, 0, model);
    f110 = cross_moment_with(mw, cm, rho, 1, 1, 0, model);
    f011 = cross_moment_with(mw, cm, rho, 0, 1, 1, model);
    f121 = cross_moment_with(mw, cm, rho, 1, 2, 1, model);
  }
  return assemble(em, f000, f110, f011, f121, rho, g.node_count());
}

std::optional<double> score(const EpisodeStatistics& st, double r, std::size_t n,
                            std::size_t test_length) {
  if (n == 0 || !(st.sigma2 > 0.0)) return std::nullopt;
  return std::sqrt(static_cast<double>(test_length)) * (r - st.mu) / std::sqrt(st.sigma2);
}

double p_value(double score) {
  double v = 0.5 * std::erfc(score / std::sqrt(2.0));
  return std::min(1.0, std::max(0.0, v));
}

}  // namespace episcore
