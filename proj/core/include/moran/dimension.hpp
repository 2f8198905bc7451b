#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "moran/log_product.hpp"
#include "moran/sequence.hpp"
#include "moran/window_search.hpp"

namespace moran {

enum class DimensionKind { assouad, lower, hausdorff, packing };
enum class Monotone { nonincreasing, nondecreasing };

const char* to_string(DimensionKind kind);
const char* to_string(Monotone direction);

struct TracePoint {
  std::string label;      // exact abscissa: threshold "2^20" or an index
  long double abscissa;   // log2 N for threshold traces, the index otherwise
  long double value;
  std::optional<mpq_class> exact;
};

namespace caveat {
inline constexpr const char* q_unbounded = "q_unbounded_shortcut";
inline constexpr const char* b_unbounded = "lower_unbounded_shortcut";
inline constexpr const char* bounded_q_violated = "bounded_q_hypothesis_violated";
inline constexpr const char* horizon_limited = "horizon_limited";
inline constexpr const char* heuristic_candidates = "heuristic_candidates";
inline constexpr const char* periodic_limit = "periodic_limit";
}  // namespace caveat

struct DimensionReport {
  DimensionKind kind = DimensionKind::assouad;
  /// The exact limit when both sequences are eventually periodic, else the
  /// finite-depth extremum.
  long double estimate = 0;
  std::optional<mpq_class> exact;
  /// Extremum at the largest threshold (or over the tail window).
  std::optional<long double> finite_value;
  std::optional<mpq_class> finite_exact;
  /// "N" for threshold traces, "n" for window lengths, "index" for prefixes.
  std::string trace_axis;
  std::vector<TracePoint> trace;
  Monotone direction = Monotone::nonincreasing;
  std::optional<Window> witness;
  std::optional<Index> witness_index;
  std::vector<std::string> caveats;
  /// Raw prefix ratios behind a Hausdorff/packing report.
  std::vector<TracePoint> series;

  bool has_caveat(const std::string& c) const;
};

/// log(q over one joint tail period) and log(b over the same stretch) when
/// both sequences end in a cyclic pattern. Every window or prefix ratio then
/// converges to their quotient, so all four dimensions equal it.
std::optional<std::pair<LogProduct, LogProduct>> periodic_limit(const MoranSpec& spec);

struct EstimateOptions {
  /// Threshold trace N^(j/J), j = 1..J.
  int trace_points = 16;
  SearchOptions search;
};

/// Ascending thresholds N^(1/J), ..., N^(J/J) = N.
std::vector<Threshold> threshold_ladder(const Threshold& n, int points);

DimensionReport assouad_estimate(const MoranSpec& spec, Index depth, const Threshold& n,
                                 const EstimateOptions& options = {});
DimensionReport assouad_bounded_form(const MoranSpec& spec, Index depth, Index n_min);
DimensionReport lower_estimate(const MoranSpec& spec, Index depth, const Threshold& n,
                               const EstimateOptions& options = {});
/// Tail window [tail_begin, depth]; defaults to [max(1, depth/2), depth].
std::pair<DimensionReport, DimensionReport> hausdorff_packing_estimate(const MoranSpec& spec, Index depth,
                                                                       std::optional<Index> tail_begin = {});

struct ShortcutWitness {
  double epsilon;
  Index index;
};
/// Witnesses n with q_n / b_n^(1-eps) < 1e-3 for eps in {0, 0.1, ..., 0.9};
/// empty when b is bounded or some eps has no witness up to the scan limit.
std::optional<std::vector<ShortcutWitness>> lower_shortcut_witnesses(const MoranSpec& spec,
                                                                    Index scan_limit = Index{1} << 20);

}  // namespace moran
