#include "moran/sequence.hpp"

#include <algorithm>

#include "moran/error.hpp"

namespace moran {
namespace {

constexpr Index kValidationStepCap = 50'000'000;

mpz_class pow_mpz(std::uint64_t base, Index exponent) {
  if (exponent > static_cast<Index>(1) << 40) throw Error(ErrorCode::overflow, "term too large to materialize");
  mpz_class out;
  mpz_class b(static_cast<unsigned long>(base));
  mpz_pow_ui(out.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(exponent));
  return out;
}

// Walks the runs of a pattern segment starting at an arbitrary offset.
class RunCursor {
 public:
  RunCursor(const Segment& s, Index offset) : s_(s) {
    Index o = floor_mod(offset, s.period());
    idx_ = 0;
    while (o >= s.runs()[idx_].count) {
      o -= s.runs()[idx_].count;
      ++idx_;
    }
    left_ = s.runs()[idx_].count - o;
  }
  std::uint64_t value() const { return s_.runs()[idx_].value; }
  Index left() const { return left_; }
  void advance(Index m) {
    left_ -= m;
    if (left_ == 0) {
      idx_ = (idx_ + 1) % s_.runs().size();
      left_ = s_.runs()[idx_].count;
    }
  }

 private:
  const Segment& s_;
  std::size_t idx_;
  Index left_;
};

[[noreturn]] void fail_order(Index n) {
  throw Error(ErrorCode::invalid_spec, "2 <= q_n < b_n violated at n = " + to_string(n));
}

// Checks q_i < b_i on `len` consecutive indices starting at global index `at`.
void check_pair(const Segment& qs, Index oq, const Segment& bs, Index ob, Index len, Index at) {
  using T = Segment::Type;
  if (qs.type() == T::pattern && bs.type() == T::pattern) {
    const Index span = std::min(len, lcm_capped(qs.period(), bs.period(), len));
    RunCursor cq(qs, oq), cb(bs, ob);
    Index done = 0, steps = 0;
    while (done < span) {
      if (++steps > kValidationStepCap) throw Error(ErrorCode::invalid_spec, "sequence layout too irregular to validate");
      if (cq.value() >= cb.value()) fail_order(at + done);
      const Index m = std::min({cq.left(), cb.left(), span - done});
      cq.advance(m);
      cb.advance(m);
      done += m;
    }
    return;
  }
  if (qs.type() == T::pattern) {
    // b increases, so each q value only needs checking at its first occurrence.
    RunCursor cq(qs, oq);
    const Index span = std::min(len, qs.period());
    for (Index done = 0; done < span;) {
      if (mpz_class(static_cast<unsigned long>(cq.value())) >= bs.term(ob + done)) fail_order(at + done);
      const Index m = std::min(cq.left(), span - done);
      cq.advance(m);
      done += m;
    }
    return;
  }
  if (bs.type() == T::pattern) {
    RunCursor cb(bs, ob);
    Index steps = 0;
    for (Index done = 0; done < len;) {
      if (++steps > kValidationStepCap) throw Error(ErrorCode::invalid_spec, "sequence layout too irregular to validate");
      const Index m = std::min(cb.left(), len - done);
      if (compare(qs.log_term(oq + done + m - 1), LogProduct::of(cb.value())) >= 0) fail_order(at + done + m - 1);
      cb.advance(m);
      done += m;
    }
    return;
  }
  // Both powers: log q_i - log b_i is affine in i.
  if (compare(qs.log_term(oq), bs.log_term(ob)) >= 0) fail_order(at);
  if (compare(qs.log_term(oq + len - 1), bs.log_term(ob + len - 1)) >= 0) fail_order(at + len - 1);
}

}  // namespace

Segment Segment::pattern(std::vector<Run> runs, Index length) {
  if (runs.empty()) throw Error(ErrorCode::invalid_spec, "pattern segment needs at least one run");
  if (length < 0) throw Error(ErrorCode::invalid_spec, "negative segment length");
  Segment s;
  s.type_ = Type::pattern;
  s.length_ = length;
  Index pos = 0;
  s.run_prefix_.push_back(LogProduct{});
  for (const Run& r : runs) {
    if (r.value < 2) throw Error(ErrorCode::invalid_spec, "sequence terms must be >= 2");
    if (r.count < 1) throw Error(ErrorCode::invalid_spec, "run counts must be >= 1");
    s.run_starts_.push_back(pos);
    pos = checked_add(pos, r.count);
    s.run_prefix_.push_back(s.run_prefix_.back() + LogProduct::of(r.value, r.count));
  }
  s.period_ = pos;
  s.period_log_ = s.run_prefix_.back();
  s.runs_ = std::move(runs);
  return s;
}

Segment Segment::power(std::uint64_t base, Index first_exponent, Index length) {
  if (base < 2) throw Error(ErrorCode::invalid_spec, "power base must be >= 2");
  if (first_exponent < 1) throw Error(ErrorCode::invalid_spec, "power exponents must start at >= 1");
  if (length < 0) throw Error(ErrorCode::invalid_spec, "negative segment length");
  Segment s;
  s.type_ = Type::power;
  s.base_ = base;
  s.first_exponent_ = first_exponent;
  s.length_ = length;
  s.period_ = 1;
  return s;
}

Segment Segment::with_length(Index length) const {
  Segment s = *this;
  s.length_ = length;
  return s;
}

std::size_t Segment::run_at(Index o) const {
  auto it = std::upper_bound(run_starts_.begin(), run_starts_.end(), o);
  return static_cast<std::size_t>(it - run_starts_.begin()) - 1;
}

mpz_class Segment::term(Index i) const {
  if (type_ == Type::power) return pow_mpz(base_, checked_add(first_exponent_, i));
  return mpz_class(static_cast<unsigned long>(runs_[run_at(floor_mod(i, period_))].value));
}

LogProduct Segment::log_term(Index i) const {
  if (type_ == Type::power) return LogProduct::of(base_, checked_add(first_exponent_, i));
  return LogProduct::of(runs_[run_at(floor_mod(i, period_))].value);
}

LogProduct Segment::prefix(Index m) const {
  if (m <= 0) return {};
  if (type_ == Type::power) {
    // sum_{i<m} (e0 + i) = m*e0 + m(m-1)/2
    const Index half = (m % 2 == 0) ? checked_mul(m / 2, m - 1) : checked_mul(m, (m - 1) / 2);
    return LogProduct::of(base_, checked_add(checked_mul(m, first_exponent_), half));
  }
  const Index full = m / period_;
  const Index rem = m % period_;
  LogProduct out = period_log_.scaled(full);
  if (rem > 0) {
    const std::size_t r = run_at(rem - 1);
    out += run_prefix_[r];
    out += LogProduct::of(runs_[r].value, rem - run_starts_[r]);
  }
  return out;
}

std::uint64_t Segment::min_value() const {
  if (type_ == Type::power) return base_;
  std::uint64_t v = runs_.front().value;
  for (const Run& r : runs_) v = std::min(v, r.value);
  return v;
}

std::uint64_t Segment::max_value() const {
  if (type_ == Type::power) return 0;
  std::uint64_t v = 0;
  for (const Run& r : runs_) v = std::max(v, r.value);
  return v;
}

const char* to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::constant: return "constant";
    case SequenceKind::explicit_list: return "explicit";
    case SequenceKind::geometric: return "geometric";
    case SequenceKind::blocks: return "blocks";
    case SequenceKind::synthesized: return "synthesized";
    case SequenceKind::segments: return "segments";
  }
  return "unknown";
}

SequenceSpec SequenceSpec::constant(std::uint64_t value) {
  SequenceSpec s;
  s.kind_ = SequenceKind::constant;
  s.tail_ = Segment::pattern({{value, 1}}, 0);
  s.finalize();
  return s;
}

SequenceSpec SequenceSpec::explicit_list(const std::vector<std::uint64_t>& values) {
  if (values.empty()) throw Error(ErrorCode::invalid_spec, "explicit sequence is empty");
  std::vector<Run> runs;
  runs.reserve(values.size());
  for (std::uint64_t v : values) runs.push_back({v, 1});
  SequenceSpec s;
  s.kind_ = SequenceKind::explicit_list;
  s.segments_.push_back(Segment::pattern(std::move(runs), static_cast<Index>(values.size())));
  s.finalize();
  return s;
}

SequenceSpec SequenceSpec::geometric(std::uint64_t base) {
  SequenceSpec s;
  s.kind_ = SequenceKind::geometric;
  s.tail_ = Segment::power(base, 1, 0);
  s.finalize();
  return s;
}

SequenceSpec SequenceSpec::blocks(std::vector<Run> runs, std::vector<Run> cycle) {
  if (runs.empty() && cycle.empty()) throw Error(ErrorCode::invalid_spec, "blocks sequence is empty");
  SequenceSpec s;
  s.kind_ = SequenceKind::blocks;
  if (!runs.empty()) {
    Segment seg = Segment::pattern(std::move(runs), 0);
    s.segments_.push_back(seg.with_length(seg.period()));
  }
  if (!cycle.empty()) s.tail_ = Segment::pattern(std::move(cycle), 0);
  s.finalize();
  return s;
}

SequenceSpec SequenceSpec::synthesized(std::vector<Run> runs, std::vector<Run> cycle, std::string provenance) {
  SequenceSpec s = blocks(std::move(runs), std::move(cycle));
  s.kind_ = SequenceKind::synthesized;
  s.provenance_ = std::move(provenance);
  return s;
}

SequenceSpec SequenceSpec::from_segments(std::vector<Segment> segments, std::optional<Segment> tail) {
  std::erase_if(segments, [](const Segment& seg) { return seg.length() == 0; });
  if (segments.empty() && !tail) throw Error(ErrorCode::invalid_spec, "segments sequence is empty");
  SequenceSpec s;
  s.kind_ = SequenceKind::segments;
  s.segments_ = std::move(segments);
  s.tail_ = std::move(tail);
  s.finalize();
  return s;
}

SequenceSpec SequenceSpec::compress(const std::vector<std::uint64_t>& values) {
  std::vector<Run> runs;
  for (std::uint64_t v : values) {
    if (!runs.empty() && runs.back().value == v) {
      ++runs.back().count;
    } else {
      runs.push_back({v, 1});
    }
  }
  return blocks(std::move(runs));
}

void SequenceSpec::finalize() {
  starts_.clear();
  cumulative_.clear();
  Index pos = 0;
  LogProduct acc;
  for (const Segment& seg : segments_) {
    starts_.push_back(pos + 1);
    cumulative_.push_back(acc);
    acc += seg.prefix(seg.length());
    pos = checked_add(pos, seg.length());
  }
  cumulative_.push_back(acc);
  finite_length_ = pos;
}

std::optional<Index> SequenceSpec::horizon() const {
  if (tail_) return std::nullopt;
  return finite_length_;
}

bool SequenceSpec::bounded() const { return !(tail_ && tail_->type() == Segment::Type::power); }

void SequenceSpec::check_index(Index n) const {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "sequence index must be >= 1");
  if (!tail_ && n > finite_length_) {
    throw Error(ErrorCode::out_of_horizon, "index " + to_string(n) + " beyond horizon " + to_string(finite_length_));
  }
}

mpz_class SequenceSpec::term(Index n) const {
  check_index(n);
  if (n > finite_length_) return tail_->term(n - finite_length_ - 1);
  const std::size_t s = static_cast<std::size_t>(std::upper_bound(starts_.begin(), starts_.end(), n) - starts_.begin()) - 1;
  return segments_[s].term(n - starts_[s]);
}

LogProduct SequenceSpec::log_term(Index n) const {
  check_index(n);
  if (n > finite_length_) return tail_->log_term(n - finite_length_ - 1);
  const std::size_t s = static_cast<std::size_t>(std::upper_bound(starts_.begin(), starts_.end(), n) - starts_.begin()) - 1;
  return segments_[s].log_term(n - starts_[s]);
}

LogProduct SequenceSpec::prefix_log(Index n) const {
  if (n == 0) return {};
  check_index(n);
  if (n > finite_length_) return cumulative_.back() + tail_->prefix(n - finite_length_);
  const std::size_t s = static_cast<std::size_t>(std::upper_bound(starts_.begin(), starts_.end(), n) - starts_.begin()) - 1;
  return cumulative_[s] + segments_[s].prefix(n - starts_[s] + 1);
}

LogProduct SequenceSpec::log_product(Index a, Index c) const {
  if (a < 1 || c < a) throw Error(ErrorCode::invalid_argument, "log_product needs 1 <= a <= c");
  check_index(c);
  return prefix_log(c) - prefix_log(a - 1);
}

std::vector<std::uint64_t> SequenceSpec::expand(Index n) const {
  std::vector<std::uint64_t> out;
  if (n <= 0) return out;
  check_index(n);
  out.reserve(static_cast<std::size_t>(n));
  for (const Piece& p : pieces(1, n)) {
    for (Index i = 0; i < p.length; ++i) {
      const mpz_class t = p.segment->term(p.offset + i);
      if (!t.fits_ulong_p()) throw Error(ErrorCode::overflow, "term does not fit in 64 bits");
      out.push_back(t.get_ui());
    }
  }
  return out;
}

std::vector<SequenceSpec::Piece> SequenceSpec::pieces(Index a, Index c) const {
  std::vector<Piece> out;
  if (c < a) return out;
  check_index(a);
  check_index(c);
  for (std::size_t s = 0; s < segments_.size(); ++s) {
    const Index lo = std::max(a, starts_[s]);
    const Index hi = std::min(c, starts_[s] + segments_[s].length() - 1);
    if (lo <= hi) out.push_back({lo, hi - lo + 1, &segments_[s], lo - starts_[s]});
  }
  if (tail_ && c > finite_length_) {
    const Index lo = std::max(a, finite_length_ + 1);
    out.push_back({lo, c - lo + 1, &*tail_, lo - finite_length_ - 1});
  }
  return out;
}

std::optional<Index> MoranSpec::horizon() const {
  const auto hb = b.horizon(), hq = q.horizon();
  if (hb && hq) return std::min(*hb, *hq);
  return hb ? hb : hq;
}

void MoranSpec::validate() const {
  const auto h = horizon();
  Index end = std::max(b.tail_start(), q.tail_start()) - 1;
  Index check_to = 0;
  if (h) {
    check_to = *h;
  } else {
    // Past the finite parts both tails are periodic or monotone; one joint
    // period settles the pattern case, slopes settle the power case.
    const Segment& tq = *q.tail();
    const Segment& tb = *b.tail();
    if (tq.type() == Segment::Type::power && tb.type() == Segment::Type::pattern) {
      throw Error(ErrorCode::invalid_spec, "unbounded q against bounded b eventually violates q_n < b_n");
    }
    if (tq.type() == Segment::Type::power && tb.type() == Segment::Type::power && tq.base() > tb.base()) {
      throw Error(ErrorCode::invalid_spec, "q grows faster than b; q_n < b_n eventually fails");
    }
    const Index cap = static_cast<Index>(1) << 40;
    const Index span = lcm_capped(tq.period(), tb.period(), cap);
    if (span >= cap) throw Error(ErrorCode::invalid_spec, "tail periods too large to validate");
    check_to = checked_add(end, span);
  }
  if (check_to < 1) throw Error(ErrorCode::invalid_spec, "empty Moran spec");
  const auto pq = q.pieces(1, check_to);
  const auto pb = b.pieces(1, check_to);
  std::size_t i = 0, j = 0;
  Index pos = 1;
  while (pos <= check_to) {
    while (pq[i].start + pq[i].length <= pos) ++i;
    while (pb[j].start + pb[j].length <= pos) ++j;
    const Index stop = std::min(pq[i].start + pq[i].length, pb[j].start + pb[j].length);
    check_pair(*pq[i].segment, pq[i].offset + (pos - pq[i].start), *pb[j].segment, pb[j].offset + (pos - pb[j].start),
               stop - pos, pos);
    pos = stop;
  }
}

}  // namespace moran
