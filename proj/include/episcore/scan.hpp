#pragma once

#include <cstddef>
#include <vector>

#include "episcore/fsm.hpp"

namespace episcore {

struct Window {
  std::size_t start = 0;  // 1-based, inclusive
  std::size_t end = 0;    // 1-based, inclusive
  std::size_t length() const { return end - start + 1; }
};

/// Minimal windows sorted by end; at most one per start and one per end.
struct WindowList {
  std::vector<Window> windows;
  std::size_t truncated_walks = 0;  // walks stopped by max_len before resolving

  std::size_t size() const { return windows.size(); }
  bool empty() const { return windows.empty(); }
};

/// All minimal windows of length <= max_len: per end position, the backward
/// greedy walk from alpha stops on omega (record), psi (dead) or max_len.
WindowList minimal_windows(const EventSequence& s, const MinimalWindowMachine& mw,
                           std::size_t max_len);

/// n = |w|, r = mean of rho^length. r is meaningless when n == 0
/// (second member false).
std::pair<double, bool> observed_statistic_r(const WindowList& w, double rho);

struct ObservedStatistic {
  double r = 0;
  std::size_t n = 0;
  bool defined = false;
};
ObservedStatistic observed_statistic(const WindowList& w, double rho);

/// Maximum number of pairwise non-overlapping windows (earliest-end greedy;
/// input already end-sorted).
std::size_t disjoint_support(const WindowList& w);

}  // namespace episcore
