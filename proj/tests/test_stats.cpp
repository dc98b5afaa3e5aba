#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "episcore/stats.hpp"
#include "oracle.hpp"

using namespace episcore;

namespace {

constexpr Symbol A = 0, B = 1, C = 2;

Episode join_episode() { return Episode({A, B, C}, {{0, 2}, {1, 2}}); }

ProbabilityModel model325() {
  ProbabilityModel m;
  m.p = {0.3, 0.2, 0.5};
  return m;
}

ProbabilityModel example1_model() {
  ProbabilityModel m;
  m.p = {0.5, 0.25, 0.25};
  return m;
}

// handles into MW({a,b}->c), navigated structurally from alpha
// (paper naming: theta1=x2x1, theta2=x4x1, theta3=x3x1, theta4=x4x2,
//  theta5=x3x2, omega1=x5x3, omega2=x5x1, omega3=x5x4)
struct JoinStates {
  StateId t1, t2, t3, t4, t5, w1, w2, w3;
  explicit JoinStates(const MinimalWindowMachine& mw) {
    const Machine& m = mw.machine;
    t1 = m.step(mw.alpha, C);
    t2 = m.step(t1, A);
    t3 = m.step(t1, B);
    t4 = m.step(t2, C);
    t5 = m.step(t3, C);
    w1 = m.step(t4, B);
    w2 = m.step(t2, B);
    w3 = m.step(t5, A);
  }
};

std::vector<bool> mask_of(const Machine& m, std::initializer_list<StateId> states) {
  std::vector<bool> mask(m.n_states(), false);
  for (StateId x : states) mask[x] = true;
  return mask;
}

Episode random_episode(std::mt19937_64& rng, int max_nodes, int label_range, double density) {
  int n = 1 + static_cast<int>(rng() % max_nodes);
  std::vector<Symbol> labels;
  for (int i = 0; i < n; ++i) labels.push_back(static_cast<Symbol>(rng() % label_range));
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (std::uniform_real_distribution<double>(0, 1)(rng) < density) edges.emplace_back(u, v);
  return Episode(std::move(labels), edges);
}

// random model with probabilities bounded away from zero, so truncated sums
// at L=200 sit far below 1e-9 of the limit
ProbabilityModel random_model(std::mt19937_64& rng, std::size_t alphabet) {
  ProbabilityModel m;
  m.p.resize(alphabet);
  double sum = 0;
  for (auto& p : m.p) {
    p = 0.25 + std::uniform_real_distribution<double>(0, 1)(rng);
    sum += p;
  }
  for (auto& p : m.p) p /= sum;
  return m;
}

}  // namespace

TEST_CASE("pgreedy reproduces the worked 0.2 * 0.5^(L-1) chain") {
  MinimalWindowMachine mw = build_minimal_window_machine(join_episode(), 3);
  JoinStates st(mw);
  auto model = model325();
  auto target = mask_of(mw.machine, {st.w1});
  for (int L = 1; L <= 10; ++L) {
    double expect = 0.2 * std::pow(0.5, L - 1);
    CHECK(pgreedy(mw.machine, st.t4, target, L, model) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(pgreedy(mw.machine, st.t4, mask_of(mw.machine, {st.t4}), 0, model) == 1.0);
}

TEST_CASE("pgreedy equals exhaustive enumeration up to L = 7") {
  MinimalWindowMachine mw = build_minimal_window_machine(join_episode(), 3);
  auto model = model325();
  const auto& target = mw.in_omega;
  for (int L = 0; L <= 7; ++L) {
    double dp = pgreedy(mw.machine, mw.alpha, target, L, model);
    double exact = oracle::pgreedy_exhaustive(mw.machine, mw.alpha, target, L, model);
    CHECK(dp == doctest::Approx(exact).epsilon(1e-12));
  }
  // total probability over singleton targets
  for (int L = 0; L <= 4; ++L) {
    double total = 0;
    for (StateId y = 0; y < mw.machine.n_states(); ++y)
      total += oracle::pgreedy_exhaustive(mw.machine, mw.alpha,
                                          mask_of(mw.machine, {y}), L, model);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pgreedy matches exhaustive enumeration on random machines") {
  std::mt19937_64 rng(101);
  for (int it = 0; it < 20; ++it) {
    Episode g = random_episode(rng, 3, 3, 0.5);
    MinimalWindowMachine mw = build_minimal_window_machine(g, 3);
    auto model = random_model(rng, 3);
    for (int L = 0; L <= 5; ++L) {
      double dp = pgreedy(mw.machine, mw.alpha, mw.in_omega, L, model);
      double exact = oracle::pgreedy_exhaustive(mw.machine, mw.alpha, mw.in_omega, L, model);
      CHECK(dp == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("moments reproduces the worked f=1 table exactly") {
  MinimalWindowMachine mw = build_minimal_window_machine(join_episode(), 3);
  JoinStates st(mw);
  auto model = model325();
  MomentTable init(mw.machine.n_states(), 0.0);
  for (StateId w : mw.omega) init[w] = 1.0;
  MomentTable m = moments(mw.machine, init, {}, 1.0, model);

  CHECK(m[st.t4] == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(m[st.t5] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(m[st.t2] == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
  CHECK(m[st.t3] == doctest::Approx(3.0 / 4.0).epsilon(1e-12));
  // the paper prints 0.32 and 0.16; the exact chain values are 9/28, 9/56
  CHECK(m[st.t1] == doctest::Approx(9.0 / 28.0).epsilon(1e-12));
  CHECK(m[mw.alpha] == doctest::Approx(9.0 / 56.0).epsilon(1e-12));
  CHECK(std::abs(m[st.t1] - 0.32) < 1e-2);
  CHECK(std::abs(m[mw.alpha] - 0.16) < 1e-2);
  // remaining states: 0
  CHECK(m[st.w1] == 0.0);
  CHECK(m[st.w2] == 0.0);
  CHECK(m[st.w3] == 0.0);
  CHECK(m[mw.psi] == 0.0);
}

TEST_CASE("moments is linear in init and hmap, zero on zero input") {
  MinimalWindowMachine mw = build_minimal_window_machine(join_episode(), 3);
  auto model = model325();
  std::size_t n = mw.machine.n_states();
  MomentTable zero(n, 0.0);
  MomentTable m0 = moments(mw.machine, zero, zero, 1.25, model);
  for (double v : m0) CHECK(v == 0.0);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1, 1);
  for (int it = 0; it < 20; ++it) {
    MomentTable i1(n), i2(n), h1(n), h2(n);
    for (std::size_t k = 0; k < n; ++k) {
      i1[k] = unif(rng);
      i2[k] = unif(rng);
      h1[k] = unif(rng);
      h2[k] = unif(rng);
    }
    double k1 = unif(rng), k2 = unif(rng), c = 1.5;
    MomentTable lhs_i(n), lhs_h(n);
    for (std::size_t k = 0; k < n; ++k) {
      lhs_i[k] = k1 * i1[k] + k2 * i2[k];
      lhs_h[k] = k1 * h1[k] + k2 * h2[k];
    }
    MomentTable lhs = moments(mw.machine, lhs_i, lhs_h, c, model);
    MomentTable a = moments(mw.machine, i1, h1, c, model);
    MomentTable b = moments(mw.machine, i2, h2, c, model);
    for (std::size_t k = 0; k < n; ++k)
      CHECK(lhs[k] == doctest::Approx(k1 * a[k] + k2 * b[k]).epsilon(1e-10));
  }
}

TEST_CASE("moments agrees with truncated direct sums on random machines") {
  std::mt19937_64 rng(103);
  const int lmax = 200;
  for (int it = 0; it < 12; ++it) {
    Episode g = random_episode(rng, 3, 3, 0.5);
    MinimalWindowMachine mw = build_minimal_window_machine(g, 3);
    auto model = random_model(rng, 3);
    double rho = 0.5;
    EpisodeMoments em = episode_moments(mw, rho, model);

    std::vector<double> f_one(lmax + 1, 1.0), f_len(lmax + 1), f_rho(lmax + 1),
        f_rho2(lmax + 1), f_rho_len(lmax + 1);
    for (int l = 0; l <= lmax; ++l) {
      f_len[l] = l;
      f_rho[l] = std::pow(rho, l);
      f_rho2[l] = std::pow(rho, 2 * l);
      f_rho_len[l] = std::pow(rho, l) * l;
    }
    auto direct = [&](const std::vector<double>& f) {
      return oracle::truncated_moment(mw.machine, mw.alpha, mw.in_omega, f, lmax, model);
    };
    CHECK(em.p == doctest::Approx(direct(f_one)).epsilon(1e-9));
    CHECK(em.v == doctest::Approx(direct(f_len)).epsilon(1e-9));
    CHECK(em.q == doctest::Approx(direct(f_rho)).epsilon(1e-9));
    CHECK(em.z2 == doctest::Approx(direct(f_rho2)).epsilon(1e-9));
    CHECK(em.w == doctest::Approx(direct(f_rho_len)).epsilon(1e-9));
  }
}

TEST_CASE("episode moments: Example 1 values p = 1/6, q = 1/28, mu = 3/14") {
  Episode ab = Episode::serial(std::vector<Symbol>{A, B});
  MinimalWindowMachine mw = build_minimal_window_machine(ab, 3);
  EpisodeMoments em = episode_moments(mw, 0.5, example1_model());
  CHECK(em.p == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(em.q == doctest::Approx(1.0 / 28.0).epsilon(1e-12));
  CHECK(em.q / em.p == doctest::Approx(3.0 / 14.0).epsilon(1e-12));
}

TEST_CASE("episode moments: single node and the two-symbol serial pair") {
  ProbabilityModel uni2;
  uni2.p = {0.5, 0.5};

  MinimalWindowMachine single = build_minimal_window_machine(Episode::single(A), 2);
  EpisodeMoments ems = episode_moments(single, 0.5, uni2);
  CHECK(ems.p == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ems.q == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(ems.q / ems.p == doctest::Approx(0.5).epsilon(1e-12));

  // a->b over {a,b}: the only minimal window is the exact string "ab"
  Episode ab = Episode::serial(std::vector<Symbol>{A, B});
  MinimalWindowMachine mw = build_minimal_window_machine(ab, 2);
  EpisodeMoments em = episode_moments(mw, 0.5, uni2);
  CHECK(em.p == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(em.q == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
  CHECK(em.v == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(em.q / em.p == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(em.z2 == doctest::Approx(1.0 / 64.0).epsilon(1e-12));
  CHECK(em.w == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("moments rejects non-positive denominators") {
  MinimalWindowMachine mw = build_minimal_window_machine(join_episode(), 3);
  auto model = model325();
  MomentTable init(mw.machine.n_states(), 0.0);
  CHECK_THROWS_AS(moments(mw.machine, init, {}, 0.2, model), Error);
}

TEST_CASE("cross-moment chain per Algorithm 2 (paper's step-3 prints corrected)") {
  MinimalWindowMachine mw = build_minimal_window_machine(join_episode(), 3);
  JoinStates st(mw);
  auto model = model325();
  const double rho = 0.5;

  // step 1: moments of f=1 toward omega (same table as the worked example)
  MomentTable init1(mw.machine.n_states(), 0.0);
  for (StateId w : mw.omega) init1[w] = 1.0;
  MomentTable m1 = moments(mw.machine, init1, {}, 1.0, model);
  CHECK(m1[st.t2] == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
  CHECK(m1[st.t3] == doctest::Approx(3.0 / 4.0).epsilon(1e-12));

  // step 2: the join of the machine with itself, seeded with (theta, alpha)
  std::vector<std::pair<StateId, StateId>> seeds;
  for (StateId t : mw.theta) seeds.emplace_back(t, mw.alpha);
  StateId psi = mw.psi;
  JoinResult star = join(mw.machine, mw.machine, seeds,
                         [psi](StateId z1, StateId z2) { return z1 == psi || z2 == psi; });
  CHECK(star.machine.n_states() == 10);  // psi + the 9 states of Fig "cross" (middle)

  MomentTable init2(star.machine.n_states(), 0.0);
  REQUIRE(star.has_pair(st.w3, st.t2));
  REQUIRE(star.has_pair(st.w1, st.t3));
  init2[star.state_of(st.w3, st.t2)] = m1[st.t2];  // 4/7
  init2[star.state_of(st.w1, st.t3)] = m1[st.t3];  // 3/4
  MomentTable m2 = moments(star.machine, init2, {}, 1.0 / rho, model);
  CHECK(m2[star.state_of(st.t4, st.t1)] == doctest::Approx(3.0 / 40.0).epsilon(1e-12));
  CHECK(m2[star.state_of(st.t5, st.t1)] == doctest::Approx(3.0 / 35.0).epsilon(1e-12));
  CHECK(m2[star.state_of(st.t2, mw.alpha)] == doctest::Approx(3.0 / 160.0).epsilon(1e-12));
  CHECK(m2[star.state_of(st.t4, mw.alpha)] == doctest::Approx(3.0 / 160.0).epsilon(1e-12));
  CHECK(m2[star.state_of(st.t3, mw.alpha)] == doctest::Approx(3.0 / 140.0).epsilon(1e-12));
  CHECK(m2[star.state_of(st.t5, mw.alpha)] == doctest::Approx(3.0 / 140.0).epsilon(1e-12));

  // step 3: the final moments run; theta4/theta5 match the paper's prints,
  // the remaining prints in the paper dropped the i(y) terms of its own
  // Algorithm 1 (the corrected exact values follow from the recursion and
  // are confirmed by the definition-based oracles below)
  MomentTable init3(mw.machine.n_states(), 0.0);
  for (StateId t : mw.theta) init3[t] = m2[star.state_of(t, mw.alpha)];
  MomentTable m3 = moments(mw.machine, init3, {}, 1.0 / rho, model);
  CHECK(m3[st.t4] == doctest::Approx(1.0 / 160.0).epsilon(1e-12));
  CHECK(m3[st.t5] == doctest::Approx(1.0 / 140.0).epsilon(1e-12));
  CHECK(m3[st.t2] == doctest::Approx(29.0 / 2720.0).epsilon(1e-12));
  CHECK(m3[st.t3] == doctest::Approx(13.0 / 1260.0).epsilon(1e-12));
  CHECK(m3[mw.alpha] == doctest::Approx(65.0 / 34272.0).epsilon(1e-12));

  // the public operation returns the same value
  double f011 = cross_moment_f(mw, rho, 0, 1, 1, model);
  CHECK(f011 == doctest::Approx(65.0 / 34272.0).epsilon(1e-12));

  // definition-based oracle: truncated triple sum over (beta, gamma)
  double oracle_val = oracle::fmom_triple_sum(mw, rho, 0, 1, 1, model);
  CHECK(f011 == doctest::Approx(oracle_val).epsilon(1e-9));
}

TEST_CASE("cross moments vanish for single-node episodes") {
  ProbabilityModel uni2;
  uni2.p = {0.5, 0.5};
  MinimalWindowMachine mw = build_minimal_window_machine(Episode::single(A), 2);
  CHECK(cross_moment_f(mw, 0.5, 0, 0, 0, uni2) == 0.0);
  CHECK(cross_moment_f(mw, 0.5, 1, 2, 1, uni2) == 0.0);
}

TEST_CASE("Alg-2 cross moments equal the explicit fmom triple sum") {
  std::vector<std::pair<Episode, ProbabilityModel>> panel;
  panel.emplace_back(Episode::serial(std::vector<Symbol>{A, B}), example1_model());
  panel.emplace_back(Episode::parallel(std::vector<Symbol>{A, B}), model325());
  panel.emplace_back(join_episode(), model325());
  {
    ProbabilityModel uni2;
    uni2.p = {0.5, 0.5};
    panel.emplace_back(Episode::serial(std::vector<Symbol>{A, B}), uni2);
  }
  {
    ProbabilityModel m433;
    m433.p = {0.4, 0.3, 0.3};
    panel.emplace_back(Episode({A, B, C, A}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}), m433);
  }

  const int triples[4][3] = {{0, 0, 0}, {1, 1, 0}, {0, 1, 1}, {1, 2, 1}};
  for (const auto& [g, model] : panel) {
    MinimalWindowMachine mw = build_minimal_window_machine(g, model.alphabet());
    for (const auto& t : triples) {
      double fast = cross_moment_f(mw, 0.5, t[0], t[1], t[2], model);
      double slow = oracle::fmom_triple_sum(mw, 0.5, t[0], t[1], t[2], model);
      CHECK(fast == doctest::Approx(slow).epsilon(1e-9));
    }
  }
}

TEST_CASE("assemble: single-node sigma is exactly zero and unscorable") {
  ProbabilityModel uni2;
  uni2.p = {0.5, 0.5};
  EpisodeStatistics st = compute_episode_statistics(Episode::single(A), 0.5, uni2);
  CHECK(st.sigma2 == 0.0);
  CHECK(!st.scorable);
  CHECK(st.mu == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("assemble: the {a,b}->c example has finite C entries and positive variance") {
  EpisodeStatistics st = compute_episode_statistics(join_episode(), 0.5, model325());
  CHECK(std::isfinite(st.c11));
  CHECK(std::isfinite(st.c12));
  CHECK(std::isfinite(st.c22));
  CHECK(st.sigma2 > 0.0);
  CHECK(st.scorable);
  CHECK(st.mu == doctest::Approx(st.q / st.p).epsilon(1e-14));
  CHECK(st.mu <= 0.25 + 1e-15);
}

TEST_CASE("mu is bounded by rho^2 for multi-node episodes") {
  std::mt19937_64 rng(107);
  for (int it = 0; it < 30; ++it) {
    Episode g = random_episode(rng, 4, 3, 0.4);
    if (g.node_count() < 2) continue;
    auto model = random_model(rng, 3);
    EpisodeStatistics st = compute_episode_statistics(g, 0.5, model);
    CHECK(st.mu <= 0.25 + 1e-12);
  }
}

TEST_CASE("pgreedy tails decay exponentially") {
  // (1/rho)^L * pgreedy(alpha, omega, L) stays bounded on the worked machines
  std::vector<std::pair<Episode, ProbabilityModel>> cases;
  cases.emplace_back(Episode::serial(std::vector<Symbol>{A, B}), example1_model());
  cases.emplace_back(join_episode(), model325());
  for (const auto& [g, model] : cases) {
    MinimalWindowMachine mw = build_minimal_window_machine(g, 3);
    double bound = 0;
    for (int L = 1; L <= 60; ++L) {
      double val = pgreedy(mw.machine, mw.alpha, mw.in_omega, L, model) * std::pow(2.0, L);
      bound = std::max(bound, val);
    }
    CHECK(bound <= 10.0);
  }
  // Lemma-1 shape on random machines: pgreedy <= C * (1 - min p)^(L/2)
  std::mt19937_64 rng(109);
  for (int it = 0; it < 10; ++it) {
    Episode g = random_episode(rng, 3, 3, 0.5);
    auto model = random_model(rng, 3);
    MinimalWindowMachine mw = build_minimal_window_machine(g, 3);
    double minp = *std::min_element(model.p.begin(), model.p.end());
    double q = std::sqrt(1.0 - minp);
    double worst_ratio = 0;
    for (int L = 5; L <= 60; ++L) {
      double val = pgreedy(mw.machine, mw.alpha, mw.in_omega, L, model);
      worst_ratio = std::max(worst_ratio, val / std::pow(q, L));
    }
    CHECK(worst_ratio <= 100.0);
  }
}

TEST_CASE("sum of pgreedy over L recovers p within 1e-9") {
  MinimalWindowMachine mw = build_minimal_window_machine(join_episode(), 3);
  auto model = model325();
  double total = 0;
  for (int L = 1; L <= 200; ++L)
    total += pgreedy(mw.machine, mw.alpha, mw.in_omega, L, model);
  EpisodeMoments em = episode_moments(mw, 0.5, model);
  CHECK(total == doctest::Approx(em.p).epsilon(1e-9));
}

TEST_CASE("score and p_value") {
  EpisodeStatistics st = compute_episode_statistics(join_episode(), 0.5, model325());
  auto zero = score(st, st.mu, 10, 1000);
  REQUIRE(zero.has_value());
  CHECK(*zero == doctest::Approx(0.0).epsilon(1e-12));

  // Example 1: observed r = 0.225 above mu = 3/14 gives a positive score
  Episode ab = Episode::serial(std::vector<Symbol>{A, B});
  EpisodeStatistics st1 = compute_episode_statistics(ab, 0.5, example1_model());
  auto positive = score(st1, 0.225, 5, 14);
  REQUIRE(positive.has_value());
  CHECK(*positive > 0.0);

  CHECK(!score(st1, 0.0, 0, 14).has_value());

  CHECK(p_value(0.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p_value(1.6448536269514722) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(p_value(-1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-9));
  CHECK(p_value(50.0) >= 0.0);
  CHECK(p_value(-50.0) <= 1.0);
}
