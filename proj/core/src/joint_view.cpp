#include "moran/joint_view.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "moran/error.hpp"
#include "moran/primes.hpp"

namespace moran {

JointView::JointView(const MoranSpec& spec, Index depth) : spec_(spec), depth_(depth) {
  if (depth < 1) throw Error(ErrorCode::invalid_argument, "depth must be >= 1");
  if (const auto h = spec.horizon(); h && depth > *h) {
    throw Error(ErrorCode::out_of_horizon, "depth " + to_string(depth) + " beyond horizon " + to_string(*h));
  }
  const auto pq = spec.q.pieces(1, depth);
  const auto pb = spec.b.pieces(1, depth);

  std::set<std::uint64_t> values;
  for (const auto* list : {&pq, &pb}) {
    for (const auto& p : *list) {
      if (p.segment->type() == Segment::Type::power) {
        values.insert(p.segment->base());
      } else {
        for (const Run& r : p.segment->runs()) values.insert(r.value);
      }
    }
  }
  std::set<std::uint64_t> primes;
  for (std::uint64_t v : values) {
    for (const auto& [p, m] : factorize(v)) primes.insert(p);
  }
  basis_.assign(primes.begin(), primes.end());
  for (std::uint64_t p : basis_) log2_basis_.push_back(std::log2(static_cast<long double>(p)));

  std::size_t i = 0, j = 0;
  Index pos = 1;
  while (pos <= depth) {
    while (pq[i].start + pq[i].length <= pos) ++i;
    while (pb[j].start + pb[j].length <= pos) ++j;
    const Index stop = std::min(pq[i].start + pq[i].length, pb[j].start + pb[j].length);
    Block blk{pos, stop - pos, 0};
    const Segment& sq = *pq[i].segment;
    const Segment& sb = *pb[j].segment;
    if (sq.type() == Segment::Type::pattern && sb.type() == Segment::Type::pattern) {
      const Index l = lcm_capped(sq.period(), sb.period(), kPeriodCap + 1);
      if (l <= kPeriodCap) blk.period = l;
    }
    blocks_.push_back(blk);
    pos = stop;
  }
}

void JointView::scatter(const LogProduct& lp, Exponent* out) const {
  std::fill(out, out + width(), Exponent{0});
  for (const auto& [p, e] : lp.factors()) {
    const auto it = std::lower_bound(basis_.begin(), basis_.end(), p);
    out[it - basis_.begin()] = e;
  }
}

void JointView::prefix_q(Index i, Exponent* out) const { scatter(spec_.q.prefix_log(i), out); }
void JointView::prefix_b(Index i, Exponent* out) const { scatter(spec_.b.prefix_log(i), out); }
void JointView::term_q(Index i, Exponent* out) const { scatter(spec_.q.log_term(i), out); }
void JointView::term_b(Index i, Exponent* out) const { scatter(spec_.b.log_term(i), out); }

LogProduct JointView::to_log(const Exponent* v) const {
  std::vector<LogProduct::Factor> f;
  for (std::size_t i = 0; i < width(); ++i) {
    if (v[i] != 0) f.emplace_back(basis_[i], v[i]);
  }
  return LogProduct::from_factors(std::move(f));
}

std::pair<long double, long double> JointView::log2_of(const Exponent* v) const {
  long double s = 0, a = 0;
  for (std::size_t i = 0; i < width(); ++i) {
    const long double t = static_cast<long double>(v[i]) * log2_basis_[i];
    s += t;
    a += std::fabs(t);
  }
  return {s, a};
}

}  // namespace moran
