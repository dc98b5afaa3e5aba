#pragma once

#include <optional>
#include <vector>

#include "episcore/fsm.hpp"

namespace episcore {

/// Per-state real values m(x) produced by the Moments recursion.
using MomentTable = std::vector<double>;

/// P(greedy(x, s) in Y | |s| = L) for random s under `model`.
/// inY is indexed by StateId. O(L * (V + E)) forward dynamic program.
double pgreedy(const Machine& m, StateId x, const std::vector<bool>& in_y, int length,
               const ProbabilityModel& model);

/// Closed-form moment recursion over f(L-1) = c f(L) + h(L):
///   m(x) = (q*init(x) - hmap(x) + sum_{a in inc(x), y=step(x,a)} p(a)(m(y)+init(y))) / (c-q)
/// processed sources-first. States with no incoming edges get m = 0 (greedy
/// never leaves them and they are never valid targets). Throws when c - q <= 0
/// at any state with incoming edges.
MomentTable moments(const Machine& m, const MomentTable& init, const MomentTable& hmap,
                    double c, const ProbabilityModel& model);

/// The five minimal-window moments of an episode, all read at alpha with
/// target omega: p = E[X1] (f=1), v = E[Y1] (f=L), q = E[Z1] (f=rho^L),
/// z2 = E[Z1^2] (f=rho^2L), w = E[Y1 Z1] (f=rho^L L).
struct EpisodeMoments {
  double p = 0, v = 0, q = 0, z2 = 0, w = 0;
};
EpisodeMoments episode_moments(const MinimalWindowMachine& mw, double rho,
                               const ProbabilityModel& model);

/// Cross-moment f(P,Q,R) = E[X1 sum_{k=2}^{Y1} rho^{P(k-1)+Q(Y1-k+1)+R(Yk-Y1)} Xk]
/// via three chained Moments runs (machine, join of the machine with itself,
/// machine again). Returns 0 when theta is empty.
double cross_moment_f(const MinimalWindowMachine& mw, double rho, int P, int Q, int R,
                      const ProbabilityModel& model);

/// Every scalar model quantity for one episode plus the observed side.
struct EpisodeStatistics {
  double rho = 0;
  double p = 0, v = 0, q = 0, z2 = 0, w = 0;
  double f000 = 0, f110 = 0, f011 = 0, f121 = 0;
  double d11 = 0, d12 = 0, d21 = 0, d22 = 0;
  double c11 = 0, c12 = 0, c22 = 0;
  double mu = 0;
  double sigma2 = 0;
  bool sigma_clamped = false;   // sigma2 landed in [-1e-9, 0) and was clamped
  bool scorable = true;         // p > 0 and sigma2 > 0

  // observed side, filled by scoring
  double r = 0;
  std::size_t n = 0;
};

/// Covariance/score assembly from the moments and cross-moments (the episode
/// is needed only to special-case singletons, whose sigma^2 is identically 0).
EpisodeStatistics assemble(const EpisodeMoments& em, double f000, double f110, double f011,
                           double f121, double rho, int episode_nodes);

/// Full model pipeline for one episode: machines, moments, cross-moments,
/// covariance assembly.
EpisodeStatistics compute_episode_statistics(const Episode& g, double rho,
                                             const ProbabilityModel& model,
                                             std::size_t max_states = 1u << 16);

/// sqrt(L) * (r - mu) / sigma; nullopt when unscorable (n = 0 or sigma = 0).
std::optional<double> score(const EpisodeStatistics& st, double r, std::size_t n,
                            std::size_t test_length);

/// Phi(-score), the upper-tail standard normal probability.
double p_value(double score);

}  // namespace episcore
