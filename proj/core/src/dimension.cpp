#include "moran/dimension.hpp"

#include <algorithm>
#include <cmath>

#include "moran/error.hpp"
#include "moran/joint_view.hpp"

namespace moran {
namespace {

using ld = long double;
constexpr ld kEps = 8.0L * 1.0842021724855044e-19L;
constexpr Index kPrefixBudget = 20000;
constexpr Index kBoundedFormDepthCap = 4096;

// An exact ratio of two exponent vectors with a long double shadow.
struct Ratio {
  std::vector<Exponent> num, den;
  ld value = 0, err = 0;
};

Ratio make_ratio(const JointView& view, std::vector<Exponent> num, std::vector<Exponent> den) {
  Ratio r;
  const auto [nl, na] = view.log2_of(num.data());
  const auto [dl, da] = view.log2_of(den.data());
  const ld w = static_cast<ld>(view.width() + 1);
  r.value = nl / dl;
  r.err = (kEps * w * na + std::fabs(r.value) * kEps * w * da) / dl;
  r.num = std::move(num);
  r.den = std::move(den);
  return r;
}

int compare(const JointView& view, const Ratio& a, const Ratio& b) {
  if (std::fabs(a.value - b.value) > a.err + b.err) return a.value > b.value ? 1 : -1;
  if (a.num == b.num && a.den == b.den) return 0;
  if (view.width() == 1) {
    const mpz_class lhs = to_mpz(a.num[0]) * to_mpz(b.den[0]);
    const mpz_class rhs = to_mpz(b.num[0]) * to_mpz(a.den[0]);
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  }
  return compare_ratios(view.to_log(a.num.data()), view.to_log(a.den.data()), view.to_log(b.num.data()),
                        view.to_log(b.den.data()));
}

std::optional<mpq_class> exact_of(const JointView& view, const Ratio& r) {
  return exact_ratio(view.to_log(r.num.data()), view.to_log(r.den.data()));
}

ld value_of(const JointView& view, const Ratio& r) {
  if (auto q = exact_of(view, r)) return static_cast<ld>(q->get_d());
  const LogProduct n = view.to_log(r.num.data()), d = view.to_log(r.den.data());
  return n.log2() / d.log2();
}

void finish_threshold_report(DimensionReport& r, const std::vector<Threshold>& ladder, const SearchResult& sr) {
  r.trace_axis = "N";
  for (std::size_t j = 0; j < ladder.size(); ++j) {
    const WindowValue& wv = sr.per_threshold[j];
    if (!wv.feasible) continue;
    r.trace.push_back({ladder[j].to_string(), ladder[j].log2(), wv.value, exact_ratio(wv.num, wv.den)});
  }
  if (!sr.exact_guarantee) r.caveats.emplace_back(caveat::heuristic_candidates);
}

void check_depth(const MoranSpec& spec, Index depth) {
  if (depth < 2) throw Error(ErrorCode::invalid_argument, "depth must be >= 2");
  if (const auto h = spec.horizon(); h && depth > *h) {
    throw Error(ErrorCode::out_of_horizon, "depth " + to_string(depth) + " beyond horizon " + to_string(*h));
  }
}

// log2 of terms a..c, walking the compressed layout.
std::vector<ld> log2_terms(const SequenceSpec& s, Index a, Index c) {
  std::vector<ld> out;
  out.reserve(static_cast<std::size_t>(c - a + 1));
  for (const auto& p : s.pieces(a, c)) {
    const Segment& seg = *p.segment;
    if (seg.type() == Segment::Type::power) {
      const ld lb = std::log2(static_cast<ld>(seg.base()));
      for (Index i = 0; i < p.length; ++i) out.push_back(static_cast<ld>(seg.first_exponent() + p.offset + i) * lb);
      continue;
    }
    Index o = p.offset % seg.period();
    std::size_t run = 0;
    while (o >= seg.runs()[run].count) o -= seg.runs()[run++].count;
    Index left = seg.runs()[run].count - o;
    for (Index i = 0; i < p.length; ++i) {
      out.push_back(std::log2(static_cast<ld>(seg.runs()[run].value)));
      if (--left == 0) {
        run = (run + 1) % seg.runs().size();
        left = seg.runs()[run].count;
      }
    }
  }
  return out;
}

// Replaces the estimate by the exact periodic limit when there is one.
bool apply_limit(DimensionReport& r, const MoranSpec& spec) {
  const auto lim = periodic_limit(spec);
  if (!lim) return false;
  r.exact = exact_ratio(lim->first, lim->second);
  r.estimate = r.exact ? static_cast<ld>(r.exact->get_d()) : lim->first.log2() / lim->second.log2();
  r.caveats.emplace_back(caveat::periodic_limit);
  return true;
}

}  // namespace

std::optional<std::pair<LogProduct, LogProduct>> periodic_limit(const MoranSpec& spec) {
  const auto& tq = spec.q.tail();
  const auto& tb = spec.b.tail();
  if (!tq || !tb || tq->type() != Segment::Type::pattern || tb->type() != Segment::Type::pattern) return std::nullopt;
  // Per-index averages: (log Q_period / Pq) / (log B_period / Pb).
  return std::make_pair(tq->prefix(tq->period()).scaled(tb->period()), tb->prefix(tb->period()).scaled(tq->period()));
}

const char* to_string(DimensionKind kind) {
  switch (kind) {
    case DimensionKind::assouad: return "assouad";
    case DimensionKind::lower: return "lower";
    case DimensionKind::hausdorff: return "hausdorff";
    case DimensionKind::packing: return "packing";
  }
  return "unknown";
}

const char* to_string(Monotone direction) {
  return direction == Monotone::nonincreasing ? "nonincreasing" : "nondecreasing";
}

bool DimensionReport::has_caveat(const std::string& c) const {
  return std::find(caveats.begin(), caveats.end(), c) != caveats.end();
}

std::vector<Threshold> threshold_ladder(const Threshold& n, int points) {
  if (points < 1) throw Error(ErrorCode::invalid_argument, "trace needs at least one point");
  if (!(n.log2() > 0)) throw Error(ErrorCode::invalid_argument, "threshold N must exceed 1");
  std::vector<Threshold> out;
  for (int j = 1; j <= points; ++j) {
    const Index g = gcd128(j, points);
    out.push_back({n.power.scaled(j / g), checked_mul(n.root, points / g)});
  }
  return out;
}

DimensionReport assouad_estimate(const MoranSpec& spec, Index depth, const Threshold& n,
                                 const EstimateOptions& options) {
  check_depth(spec, depth);
  DimensionReport r;
  r.kind = DimensionKind::assouad;
  r.direction = Monotone::nonincreasing;
  if (spec.horizon()) r.caveats.emplace_back(caveat::horizon_limited);
  const JointView view(spec, depth);
  const auto ladder = threshold_ladder(n, options.trace_points);
  const SearchResult sr = search_windows(view, WindowFamily::assouad, ladder, options.search);
  finish_threshold_report(r, ladder, sr);
  const WindowValue& last = sr.per_threshold.back();
  if (last.feasible) {
    r.witness = last.witness;
    r.finite_value = last.value;
    r.finite_exact = exact_ratio(last.num, last.den);
  }
  if (apply_limit(r, spec)) return r;
  if (!spec.q_bounded()) {
    r.estimate = 1;
    r.exact = mpq_class(1);
    r.caveats.emplace_back(caveat::q_unbounded);
    return r;
  }
  if (!last.feasible) {
    throw Error(ErrorCode::no_feasible_window, "no window with q_k b_{k+1}...b_{k+n} >= " + n.to_string() +
                                                   " up to depth " + to_string(depth));
  }
  r.estimate = last.value;
  r.exact = exact_ratio(last.num, last.den);
  return r;
}

DimensionReport lower_estimate(const MoranSpec& spec, Index depth, const Threshold& n, const EstimateOptions& options) {
  check_depth(spec, depth);
  DimensionReport r;
  r.kind = DimensionKind::lower;
  r.direction = Monotone::nondecreasing;
  if (spec.horizon()) r.caveats.emplace_back(caveat::horizon_limited);
  const auto witnesses = lower_shortcut_witnesses(spec);
  const JointView view(spec, depth);
  const auto ladder = threshold_ladder(n, options.trace_points);
  const SearchResult sr = search_windows(view, WindowFamily::lower, ladder, options.search);
  finish_threshold_report(r, ladder, sr);
  const WindowValue& last = sr.per_threshold.back();
  if (last.feasible) {
    r.witness = last.witness;
    r.finite_value = last.value;
    r.finite_exact = exact_ratio(last.num, last.den);
  }
  if (apply_limit(r, spec)) return r;
  if (witnesses) {
    r.estimate = 0;
    r.exact = mpq_class(0);
    r.caveats.emplace_back(caveat::b_unbounded);
    return r;
  }
  if (!last.feasible) {
    throw Error(ErrorCode::no_feasible_window, "no window with b_{k+1}...b_{k+n}/q_{k+n} >= " + n.to_string() +
                                                   " up to depth " + to_string(depth));
  }
  r.estimate = last.value;
  r.exact = exact_ratio(last.num, last.den);
  return r;
}

DimensionReport assouad_bounded_form(const MoranSpec& spec, Index depth, Index n_min) {
  if (!spec.q_bounded()) {
    throw Error(ErrorCode::unbounded_sequence, "bounded-form Assouad formula needs a bounded q sequence");
  }
  if (n_min < 1 || depth < n_min + 1) throw Error(ErrorCode::invalid_argument, "need depth > n_min >= 1");
  check_depth(spec, depth);
  if (depth > kBoundedFormDepthCap) {
    throw Error(ErrorCode::horizon_limited, "bounded-form enumeration is capped at depth " +
                                                to_string(kBoundedFormDepthCap));
  }
  const JointView view(spec, depth);
  const std::size_t w = view.width();
  const auto d = static_cast<std::size_t>(depth);
  std::vector<std::vector<Exponent>> pq(d + 1, std::vector<Exponent>(w)), pb(d + 1, std::vector<Exponent>(w));
  for (std::size_t i = 0; i <= d; ++i) {
    view.prefix_q(static_cast<Index>(i), pq[i].data());
    view.prefix_b(static_cast<Index>(i), pb[i].data());
  }
  std::vector<ld> lq(d + 1), lb(d + 1);
  for (std::size_t i = 0; i <= d; ++i) {
    lq[i] = view.log2_of(pq[i].data()).first;
    lb[i] = view.log2_of(pb[i].data()).first;
  }
  auto window = [&](std::size_t k, std::size_t last) {
    std::vector<Exponent> num(w), den(w);
    for (std::size_t p = 0; p < w; ++p) {
      num[p] = pq[last][p] - pq[k - 1][p];
      den[p] = pb[last][p] - pb[k - 1][p];
    }
    return make_ratio(view, std::move(num), std::move(den));
  };

  DimensionReport r;
  r.kind = DimensionKind::assouad;
  r.direction = Monotone::nonincreasing;
  r.trace_axis = "n";
  if (spec.horizon()) r.caveats.emplace_back(caveat::horizon_limited);
  std::vector<TracePoint> rev;
  std::optional<Ratio> tail;
  for (auto len = d - 1; len >= static_cast<std::size_t>(n_min); --len) {
    std::size_t arg = 1;
    ld bestv = (lq[len + 1] - lq[0]) / (lb[len + 1] - lb[0]);
    Ratio best = window(1, len + 1);
    for (std::size_t k = 2; k + len <= d; ++k) {
      const ld v = (lq[k + len] - lq[k - 1]) / (lb[k + len] - lb[k - 1]);
      if (v < bestv - 1e-12L * std::fabs(bestv)) continue;
      Ratio cand = window(k, k + len);
      if (compare(view, cand, best) > 0) {
        best = std::move(cand);
        bestv = v;
        arg = k;
      }
    }
    if (len + 1 == d) {
      r.witness = Window{static_cast<Index>(arg), static_cast<Index>(len)};
      r.exact = exact_of(view, best);
      r.estimate = value_of(view, best);
    }
    if (!tail || compare(view, best, *tail) > 0) tail = best;
    rev.push_back({std::to_string(len), static_cast<ld>(len), value_of(view, *tail), exact_of(view, *tail)});
    if (len == 0) break;
  }
  r.trace.assign(rev.rbegin(), rev.rend());
  return r;
}

std::pair<DimensionReport, DimensionReport> hausdorff_packing_estimate(const MoranSpec& spec, Index depth,
                                                                       std::optional<Index> tail_begin) {
  check_depth(spec, depth);
  const Index lo = tail_begin.value_or(std::max<Index>(1, depth / 2));
  if (lo < 1 || lo > depth) throw Error(ErrorCode::invalid_argument, "tail window must lie inside [1, depth]");
  const JointView view(spec, depth);

  std::vector<Index> idx;
  if (depth - lo + 1 <= kPrefixBudget) {
    for (Index i = lo; i <= depth; ++i) idx.push_back(i);
  } else {
    Index expanded = 0;
    for (const auto& blk : view.blocks()) {
      const Index a = std::max(lo, blk.start), c = std::min(depth, blk.start + blk.length - 1);
      if (a > c) continue;
      const Index edge = blk.period == 0 ? c - a + 1 : 2 * blk.period;
      if (blk.period == 0) {
        expanded += c - a + 1;
        if (expanded > kPrefixBudget) throw Error(ErrorCode::horizon_limited, "aperiodic stretch too long to expand");
      }
      if (c - a + 1 <= 2 * edge) {
        for (Index i = a; i <= c; ++i) idx.push_back(i);
      } else {
        for (Index i = a; i < a + edge; ++i) idx.push_back(i);
        for (Index i = c - edge + 1; i <= c; ++i) idx.push_back(i);
      }
    }
  }

  const std::size_t w = view.width();
  std::vector<Ratio> ratios;
  ratios.reserve(idx.size());
  for (Index i : idx) {
    std::vector<Exponent> num(w), den(w);
    view.prefix_q(i, num.data());
    view.prefix_b(i, den.data());
    ratios.push_back(make_ratio(view, std::move(num), std::move(den)));
  }

  DimensionReport h, p;
  h.kind = DimensionKind::hausdorff;
  p.kind = DimensionKind::packing;
  h.direction = Monotone::nondecreasing;
  p.direction = Monotone::nonincreasing;
  for (DimensionReport* rep : {&h, &p}) {
    rep->trace_axis = "index";
    if (!spec.q_bounded()) rep->caveats.emplace_back(caveat::bounded_q_violated);
    if (spec.horizon()) rep->caveats.emplace_back(caveat::horizon_limited);
  }
  for (std::size_t t = 0; t < idx.size(); ++t) {
    h.series.push_back({to_string(idx[t]), static_cast<ld>(idx[t]), ratios[t].value, std::nullopt});
  }
  p.series = h.series;

  // Tail extremes: inf / sup over [idx[t], depth]; ties go to the smallest index.
  std::size_t amin = idx.size() - 1, amax = idx.size() - 1;
  std::vector<TracePoint> th(idx.size()), tp(idx.size());
  for (std::size_t t = idx.size(); t-- > 0;) {
    if (compare(view, ratios[t], ratios[amin]) <= 0) amin = t;
    if (compare(view, ratios[t], ratios[amax]) >= 0) amax = t;
    const std::string label = to_string(idx[t]);
    th[t] = {label, static_cast<ld>(idx[t]), value_of(view, ratios[amin]), exact_of(view, ratios[amin])};
    tp[t] = {label, static_cast<ld>(idx[t]), value_of(view, ratios[amax]), exact_of(view, ratios[amax])};
  }
  h.trace = std::move(th);
  p.trace = std::move(tp);
  h.estimate = h.trace.front().value;
  h.exact = h.trace.front().exact;
  h.witness_index = idx[amin];
  p.estimate = p.trace.front().value;
  p.exact = p.trace.front().exact;
  p.witness_index = idx[amax];
  for (DimensionReport* rep : {&h, &p}) {
    rep->finite_value = rep->estimate;
    rep->finite_exact = rep->exact;
    apply_limit(*rep, spec);
  }
  return {std::move(h), std::move(p)};
}

std::optional<std::vector<ShortcutWitness>> lower_shortcut_witnesses(const MoranSpec& spec, Index scan_limit) {
  if (spec.b.bounded()) return std::nullopt;
  Index limit = scan_limit;
  if (const auto h = spec.horizon()) limit = std::min(limit, *h);
  const ld cutoff = std::log2(1e-3L);
  std::vector<std::optional<Index>> found(10);
  std::size_t missing = found.size();
  constexpr Index kChunk = 4096;
  for (Index a = 1; a <= limit && missing > 0; a += kChunk) {
    const Index c = std::min(limit, a + kChunk - 1);
    const auto lq = log2_terms(spec.q, a, c);
    const auto lb = log2_terms(spec.b, a, c);
    for (std::size_t i = 0; i < lq.size() && missing > 0; ++i) {
      for (std::size_t e = 0; e < found.size(); ++e) {
        if (found[e]) continue;
        const ld one_minus = 1.0L - static_cast<ld>(e) / 10.0L;
        if (lq[i] - one_minus * lb[i] < cutoff) {
          found[e] = a + static_cast<Index>(i);
          --missing;
        }
      }
    }
  }
  if (missing > 0) return std::nullopt;
  std::vector<ShortcutWitness> out;
  for (std::size_t e = 0; e < found.size(); ++e) out.push_back({static_cast<double>(e) / 10.0, *found[e]});
  return out;
}

}  // namespace moran
