#include "episcore/scan.hpp"

#include <cmath>

namespace episcore {

WindowList minimal_windows(const EventSequence& s, const MinimalWindowMachine& mw,
                           std::size_t max_len) {
  WindowList out;
  const Machine& m = mw.machine;
  const std::size_t length = s.length();
  for (std::size_t end = 1; end <= length; ++end) {
    StateId state = mw.alpha;
    for (std::size_t j = end;; --j) {
      state = m.step(state, s.at(j));
      if (mw.is_omega(state)) {
        out.windows.push_back({j, end});
        break;
      }
      if (state == mw.psi) break;
      if (j == 1) break;
      if (end - j + 1 >= max_len) {
        ++out.truncated_walks;
        break;
      }
    }
  }
  return out;
}

ObservedStatistic observed_statistic(const WindowList& w, double rho) {
  ObservedStatistic stat;
  stat.n = w.size();
  if (stat.n == 0) return stat;
  double sum = 0.0;
  for (const Window& win : w.windows) sum += std::pow(rho, static_cast<double>(win.length()));
  stat.r = sum / static_cast<double>(stat.n);
  stat.defined = true;
  return stat;
}

std::pair<double, bool> observed_statistic_r(const WindowList& w, double rho) {
  auto stat = observed_statistic(w, rho);
  return {stat.r, stat.defined};
}

std::size_t disjoint_support(const WindowList& w) {
  std::size_t count = 0;
  std::size_t last_end = 0;
  for (const Window& win : w.windows) {
    if (count == 0 || win.start > last_end) {
      ++count;
      last_end = win.end;
    }
  }
  return count;
}

}  // namespace episcore
