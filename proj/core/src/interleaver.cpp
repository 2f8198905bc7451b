#include "moran/interleaver.hpp"

#include <algorithm>

#include "moran/error.hpp"
#include "moran/spec_json.hpp"

namespace moran {

const char* to_string(Star star) {
  switch (star) {
    case Star::H: return "H";
    case Star::P: return "P";
    case Star::L: return "L";
    case Star::A: return "A";
  }
  return "?";
}

const mpq_class& Targets::of(Star star) const {
  switch (star) {
    case Star::H: return hausdorff;
    case Star::P: return packing;
    case Star::L: return lower;
    case Star::A: return assouad;
  }
  return lower;
}

void Targets::validate() const {
  if (!(0 <= lower && lower <= hausdorff && hausdorff <= packing && packing <= assouad && assouad <= 1)) {
    throw Error(ErrorCode::invalid_argument, "targets must satisfy 0 <= t_L <= t_H <= t_P <= t_A <= 1");
  }
}

namespace {

// log a <= t log b, exactly, for t = p/q.
bool log_le(std::uint64_t a, const mpq_class& t, std::uint64_t b) {
  return compare(LogProduct::of(a, to_int128(t.get_den())), LogProduct::of(b, to_int128(t.get_num()))) <= 0;
}

}  // namespace

SynthParams shared_params(const Targets& targets, std::uint64_t beta_cap) {
  targets.validate();
  if (targets.assouad == 1) {
    throw Error(ErrorCode::no_parameters,
                "t_A = 1 needs log alpha1 / log beta = 1, which conflicts with alpha1 < beta (approximable only)");
  }
  std::optional<mpq_class> low;
  for (Star s : kStarOrder) {
    const mpq_class& t = targets.of(s);
    if (t > 0 && (!low || t < *low)) low = t;
  }
  if (!low) return {2, 0, 4};
  const mpq_class& high = targets.assouad;
  for (std::uint64_t beta = 3; beta <= beta_cap; ++beta) {
    std::vector<std::uint64_t> divs;
    for (std::uint64_t d = 2; d < beta; ++d) {
      if (beta % d == 0) divs.push_back(d);
    }
    for (auto a1 = divs.rbegin(); a1 != divs.rend(); ++a1) {
      // beta^high <= a1  <=>  high log beta <= log a1
      if (compare(LogProduct::of(beta, to_int128(high.get_num())),
                  LogProduct::of(*a1, to_int128(high.get_den()))) > 0) {
        break;  // smaller alpha1 only gets worse
      }
      // alpha0 ascending: the smallest divisor decides
      if (log_le(divs.front(), *low, beta)) return {divs.front(), *a1, beta};
    }
  }
  throw Error(ErrorCode::no_parameters, "no shared triple with beta <= " + std::to_string(beta_cap));
}

const ScheduleBlock& Schedule::block(Star star, int k) const {
  if (k < 1 || k > super_blocks) throw Error(ErrorCode::invalid_argument, "super-block index out of range");
  return blocks[static_cast<std::size_t>(4 * (k - 1) + static_cast<int>(star))];
}

Schedule build_schedule(int super_blocks) {
  if (super_blocks < 1) throw Error(ErrorCode::invalid_argument, "need at least one super-block");
  Schedule s;
  s.super_blocks = super_blocks;
  Index mh = 1, end = 0;
  for (int k = 1; k <= super_blocks; ++k) {
    const Index K = k;
    if (k > 1) mh = checked_mul(K, checked_mul(s.M[1].back(), s.M[1].back()));
    const Index mp = checked_mul(K, checked_mul(mh, mh));
    const Index ma = isqrt(K);
    const std::array<Index, 4> lengths{mh, mp, ma, ma};
    for (Star star : kStarOrder) {
      const auto i = static_cast<std::size_t>(star);
      const Index first = checked_add(end, 1);
      end = checked_add(end, lengths[i]);
      s.M[i].push_back(lengths[i]);
      s.S[i].push_back(end);
      s.blocks.push_back({star, k, first, end});
    }
  }
  return s;
}

bool schedule_invariants_hold(const Schedule& s) {
  for (int k = 1; k <= s.super_blocks; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    const Index K = k;
    const Index mh = s.M[0][i], mp = s.M[1][i];
    if (s.M[2][i] != isqrt(K) || s.M[3][i] != isqrt(K)) return false;
    if (mp < K * mh * mh) return false;
    if (k < s.super_blocks && s.M[0][i + 1] < (K + 1) * mp * mp) return false;
    for (Star star : kStarOrder) {
      const ScheduleBlock& b = s.block(star, k);
      if (b.last != s.S[static_cast<std::size_t>(star)][i] || b.length() != s.M[static_cast<std::size_t>(star)][i]) {
        return false;
      }
    }
  }
  return true;
}

namespace {

constexpr Index kAperiodicCap = Index{1} << 20;

std::vector<Run> truncate(const std::vector<Run>& runs, Index length) {
  std::vector<Run> out;
  for (const Run& r : runs) {
    if (length <= 0) break;
    out.push_back({r.value, std::min(r.count, length)});
    length -= out.back().count;
  }
  return out;
}

std::vector<Run> to_alphas(const std::vector<Run>& symbols, const SynthParams& p) {
  std::vector<Run> out;
  for (const Run& r : symbols) {
    const std::uint64_t v = r.value ? p.alpha1 : p.alpha0;
    if (!out.empty() && out.back().value == v) {
      out.back().count += r.count;
    } else {
      out.push_back({v, r.count});
    }
  }
  return out;
}

Component make_component(Star star, const mpq_class& t, const SynthParams& params, Index longest) {
  Component c;
  c.star = star;
  c.target = t;
  if (t == 0) {
    c.zero_branch = true;
    c.q_runs = {{params.alpha0, 1}};
    return c;
  }
  const SynthesisResult r = limit_sequence(params, t, std::min(longest, kAperiodicCap), RecursionMode::relaxed);
  if (r.period) {
    c.period = r.period->to_string(r.period->length());
    c.q_runs = to_alphas(r.period->runs(r.period->length()), params);
  } else {
    if (longest > kAperiodicCap) {
      throw Error(ErrorCode::invalid_argument, std::string("component ") + to_string(star) +
                                                   " is aperiodic and its blocks are too long to materialize");
    }
    c.q_runs = to_alphas(r.prefix.runs(longest), params);
  }
  return c;
}

}  // namespace

InterleaveResult interleave(const Targets& targets, const SynthParams& params, int super_blocks) {
  targets.validate();
  Schedule schedule = build_schedule(super_blocks);
  std::array<Component, 4> components;
  for (Star star : kStarOrder) {
    const auto i = static_cast<std::size_t>(star);
    const Index longest = *std::max_element(schedule.M[i].begin(), schedule.M[i].end());
    components[i] = make_component(star, targets.of(star), params, longest);
  }
  std::vector<Segment> qs, bs;
  for (const ScheduleBlock& blk : schedule.blocks) {
    const Component& c = components[static_cast<std::size_t>(blk.star)];
    const Index m = blk.length();
    if (c.zero_branch) {
      qs.push_back(Segment::pattern(c.q_runs, m));
      bs.push_back(Segment::power(params.beta, 1, m));
    } else {
      qs.push_back(Segment::pattern(c.period ? c.q_runs : truncate(c.q_runs, m), m));
      bs.push_back(Segment::pattern({{params.beta, 1}}, m));
    }
  }
  const std::string label = "interleave(" + rational_to_string(targets.lower) + "," +
                            rational_to_string(targets.hausdorff) + "," + rational_to_string(targets.packing) +
                            "," + rational_to_string(targets.assouad) + ";K=" + std::to_string(super_blocks) + ")";
  MoranSpec spec{SequenceSpec::from_segments(std::move(bs), std::nullopt),
                 SequenceSpec::from_segments(std::move(qs), std::nullopt), label};
  spec.validate();
  const Index tail_begin = super_blocks == 1 ? 1 : schedule.block(Star::A, super_blocks - 1).last + 1;
  InterleaveResult res{targets, params, std::move(schedule), std::move(components), std::move(spec), tail_begin};
  return res;
}

long double covered_fraction(const MoranSpec& spec, const Schedule& schedule, Index first, Index last,
                             const LogProduct& R) {
  if (first < 1 || first > last || last > schedule.total()) {
    throw Error(ErrorCode::invalid_argument, "interval outside the schedule");
  }
  const LogProduct whole = spec.b.log_product(first, last);
  if (sign(whole) <= 0) throw Error(ErrorCode::invalid_argument, "interval has lambda(J) = 1");
  long double covered = 0;
  for (const ScheduleBlock& b : schedule.blocks) {
    const Index a = std::max(first, b.first), c = std::min(last, b.last);
    if (a > c) continue;
    const LogProduct part = spec.b.log_product(a, c);
    if (compare(part, R) >= 0) covered += part.log2();
  }
  return covered / whole.log2();
}

DensityReport density_diagnostics(const InterleaveResult& res, const LogProduct& R) {
  const Schedule& s = res.schedule;
  const MoranSpec& spec = res.spec;
  DensityReport out;
  for (int k = 1; k <= s.super_blocks; ++k) {
    for (Star star : kStarOrder) {
      const ScheduleBlock& b = s.block(star, k);
      const LogProduct num = spec.b.log_product(b.first, b.last);
      const LogProduct den = spec.b.prefix_log(b.last);
      out.ratios.push_back({star, k, num.log2() / den.log2(), exact_ratio(num, den)});
    }
    const ScheduleBlock& a = s.block(Star::A, k);
    out.condition_1prime.push_back(
        compare(spec.b.log_product(a.first, a.last), LogProduct::of(res.params.beta, k)) <= 0);
  }
  auto sample = [&](Index first, Index last) {
    if (first < 1 || last > s.total() || first > last) return;
    out.coverage.push_back({first, last, covered_fraction(spec, s, first, last, R)});
  };
  for (int k = 1; k <= s.super_blocks; ++k) {
    const ScheduleBlock& h = s.block(Star::H, k);
    const ScheduleBlock& p = s.block(Star::P, k);
    const ScheduleBlock& a = s.block(Star::A, k);
    for (Star star : kStarOrder) sample(s.block(star, k).first, s.block(star, k).last);
    sample(h.first, a.last);
    sample(1, a.last);
    sample(h.first + h.length() / 2, p.first + p.length() / 2);
    sample(p.first + p.length() / 2, a.last);
    if (k < s.super_blocks) sample(p.last, s.block(Star::H, k + 1).first);
  }
  return out;
}

}  // namespace moran
