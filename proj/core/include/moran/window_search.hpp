#pragma once

#include <cstddef>
#include <vector>

#include "moran/joint_view.hpp"
#include "moran/log_product.hpp"
#include "moran/sequence.hpp"

namespace moran {

/// assouad: windows [k, k+n], n >= 0, ratio log(q_k..q_{k+n}) / log(q_k b_{k+1}..b_{k+n}),
///          feasible when q_k b_{k+1}..b_{k+n} >= N; maximized.
/// lower:   windows with n >= 1, ratio log(q_{k+1}..q_{k+n-1}) / log(b_{k+1}..b_{k+n} / q_{k+n}),
///          feasible when b_{k+1}..b_{k+n} / q_{k+n} >= N; minimized.
enum class WindowFamily { assouad, lower };

struct SearchOptions {
  /// Depths up to this are enumerated exhaustively.
  Index exhaustive_limit = 4096;
  /// Budget of indices expanded one by one inside aperiodic blocks.
  Index expand_limit = 20000;
  /// Upper bound on the edge band kept at each end of a periodic block.
  Index band_cap = 1024;
};

struct WindowValue {
  bool feasible = false;
  Window witness;
  LogProduct num;
  LogProduct den;
  long double value = 0;
};

struct SearchResult {
  /// One entry per threshold, in the order given.
  std::vector<WindowValue> per_threshold;
  bool exhaustive = false;
  /// False when the compressed candidate set rests on the heuristic band
  /// (block increments not proportional, or periods above the cap).
  bool exact_guarantee = true;
  std::size_t positions = 0;
  std::size_t pairs = 0;
};

/// Extremal window for every threshold. Thresholds must be ascending. Ties go
/// to the smallest k, then the smallest n.
SearchResult search_windows(const JointView& view, WindowFamily family, const std::vector<Threshold>& thresholds,
                            const SearchOptions& options = {});

}  // namespace moran
