#include "moran/window_search.hpp"

#include <algorithm>
#include <cmath>

#include "moran/error.hpp"

namespace moran {
namespace {

using ld = long double;

// Generous bound on the relative rounding of one long double operation.
constexpr ld kEps = 8.0L * 1.0842021724855044e-19L;
constexpr Index kSmallExponent = static_cast<Index>(1) << 40;

struct Row {
  Index i = 0;
  std::vector<Exponent> u, v, x, y;
  ld ul = 0, ua = 0, vl = 0, va = 0, xl = 0, xa = 0, yl = 0, ya = 0;
};

struct Best {
  bool set = false;
  Index k = 0, c = 0;
  ld value = 0, err = 0;
  std::vector<Exponent> num, den;
};

Index gcd_vec(const std::vector<Exponent>& v) {
  Index g = 0;
  for (Exponent e : v) g = gcd128(g, e < 0 ? -e : e);
  return g;
}

class Searcher {
 public:
  Searcher(const JointView& view, WindowFamily family, const std::vector<Threshold>& thresholds,
           const SearchOptions& options)
      : view_(view),
        family_(family),
        thresholds_(thresholds),
        options_(options),
        w_(view.width()),
        min_n_(family == WindowFamily::assouad ? 0 : 1),
        maximize_(family == WindowFamily::assouad) {
    for (std::size_t j = 0; j < thresholds_.size(); ++j) {
      if (j > 0 && compare(thresholds_[j - 1], thresholds_[j]) > 0) {
        throw Error(ErrorCode::invalid_argument, "thresholds must be ascending");
      }
      tl_.push_back(thresholds_[j].log2());
      if (!(tl_.back() > 0)) throw Error(ErrorCode::invalid_argument, "thresholds must exceed 1");
    }
    best_.resize(thresholds_.size());
    nd_.resize(w_);
    dd_.resize(w_);
  }

  SearchResult run() {
    SearchResult out;
    if (thresholds_.empty()) return out;
    const Index depth = view_.depth();
    out.exhaustive = depth <= options_.exhaustive_limit;
    std::vector<Index> idx;
    Index band = 0;
    if (out.exhaustive) {
      for (Index i = 1; i <= depth; ++i) idx.push_back(i);
    } else {
      band = compute_band(out.exact_guarantee);
      Index expanded = 0;
      for (const auto& blk : view_.blocks()) {
        const Index end = blk.start + blk.length - 1;
        if (blk.period == 0) {
          expanded += blk.length;
          if (expanded > options_.expand_limit) {
            throw Error(ErrorCode::horizon_limited, "aperiodic stretch exceeds the expansion budget of " +
                                                        to_string(options_.expand_limit) + " indices");
          }
        }
        if (blk.period == 0 || blk.length <= 2 * band + blk.period) {
          for (Index i = blk.start; i <= end; ++i) idx.push_back(i);
        } else {
          for (Index i = blk.start; i < blk.start + band; ++i) idx.push_back(i);
          for (Index i = end - band + 1; i <= end; ++i) idx.push_back(i);
        }
      }
    }
    rows_.reserve(idx.size());
    for (Index i : idx) rows_.push_back(make_row(i));
    small_ = true;
    for (const Row* r : {&rows_.front(), &rows_.back()}) {
      for (const auto* vec : {&r->u, &r->v, &r->x, &r->y}) {
        for (Exponent e : *vec) small_ = small_ && (e < kSmallExponent && e > -kSmallExponent);
      }
    }

    for (const Row& kr : rows_) {
      auto it = std::lower_bound(idx.begin(), idx.end(), kr.i + min_n_);
      for (auto p = static_cast<std::size_t>(it - idx.begin()); p < rows_.size(); ++p) consider(kr, rows_[p]);
    }

    if (!out.exhaustive) {
      auto in_set = [&](Index i) { return std::binary_search(idx.begin(), idx.end(), i); };
      // Short windows starting at a candidate.
      for (const Row& kr : rows_) {
        const Index stop = std::min(depth, kr.i + 2 * band);
        for (Index c = kr.i + min_n_; c <= stop; ++c) {
          if (!in_set(c)) consider(kr, make_row(c));
        }
      }
      // Feasibility frontier: minimal ends for candidate starts.
      for (const Row& kr : rows_) {
        const Index lo = kr.i + min_n_;
        const auto first = static_cast<std::size_t>(std::lower_bound(idx.begin(), idx.end(), lo) - idx.begin());
        if (first == rows_.size()) continue;
        for (std::size_t j = 0; j < tl_.size(); ++j) {
          std::size_t a = first, b = rows_.size();
          while (a < b) {
            const std::size_t m = (a + b) / 2;
            if (feasible(kr, rows_[m], j)) b = m; else a = m + 1;
          }
          if (a == rows_.size()) break;
          const Index cs = idx[a];
          const Index prev = a > first ? idx[a - 1] : lo - 1;
          if (cs == prev + 1) continue;
          Index l = prev + 1, h = cs;
          while (l < h) {
            const Index m = l + (h - l) / 2;
            if (feasible(kr, make_row(m), j)) h = m; else l = m + 1;
          }
          for (Index c = l; c < std::min(cs, l + band); ++c) consider(kr, make_row(c));
        }
      }
      // Feasibility frontier: maximal starts for candidate ends.
      for (const Row& cr : rows_) {
        const Index hi = cr.i - min_n_;
        if (hi < 1) continue;
        const auto cnt = static_cast<std::size_t>(std::upper_bound(idx.begin(), idx.end(), hi) - idx.begin());
        if (cnt == 0) continue;
        for (std::size_t j = 0; j < tl_.size(); ++j) {
          // Largest feasible position among idx[0..cnt).
          std::size_t a = 0, b = cnt;
          while (a < b) {
            const std::size_t m = (a + b) / 2;
            if (feasible(rows_[m], cr, j)) a = m + 1; else b = m;
          }
          if (a == 0) break;
          const Index ks = idx[a - 1];
          const Index next = a < cnt ? idx[a] : hi + 1;
          if (next == ks + 1) continue;
          Index l = ks, h = next - 1;
          while (l < h) {
            const Index m = h - (h - l) / 2;
            if (feasible(make_row(m), cr, j)) l = m; else h = m - 1;
          }
          for (Index k = l; k > std::max(ks, l - band); --k) consider(make_row(k), cr);
        }
      }
    }

    out.positions = rows_.size();
    out.pairs = pairs_;
    out.per_threshold.resize(tl_.size());
    Best acc;
    for (std::size_t jj = tl_.size(); jj-- > 0;) {
      if (best_[jj].set && (!acc.set || prefer(best_[jj], acc))) acc = best_[jj];
      if (!acc.set) continue;
      WindowValue& wv = out.per_threshold[jj];
      wv.feasible = true;
      wv.witness = Window{acc.k, acc.c - acc.k};
      wv.num = view_.to_log(acc.num.data());
      wv.den = view_.to_log(acc.den.data());
      wv.value = wv.num.log2() / wv.den.log2();
      if (auto r = exact_ratio(wv.num, wv.den)) wv.value = static_cast<ld>(r->get_d());
    }
    return out;
  }

 private:
  Index compute_band(bool& exact) {
    const auto& blocks = view_.blocks();
    Index g = 1;
    Index max_period = 1;
    for (const auto& blk : blocks) {
      if (blk.period == 0) continue;
      max_period = std::max(max_period, blk.period);
      g = lcm_capped(g, blk.period, options_.band_cap + 1);
    }
    if (g > options_.band_cap) {
      exact = false;
      g = max_period;
    }
    // Increments of log b over g indices; proportional increments make the
    // constant-denominator set a lattice line, which pins optima to block edges.
    std::vector<std::vector<Exponent>> prim;
    std::vector<Index> mult;
    std::vector<Exponent> a(w_), b(w_);
    for (const auto& blk : blocks) {
      if (blk.period == 0 || blk.length < g) continue;
      view_.prefix_b(blk.start - 1, a.data());
      view_.prefix_b(blk.start + g - 1, b.data());
      std::vector<Exponent> d(w_);
      for (std::size_t p = 0; p < w_; ++p) d[p] = b[p] - a[p];
      const Index gd = gcd_vec(d);
      for (auto& e : d) e /= gd;
      prim.push_back(std::move(d));
      mult.push_back(gd);
    }
    Index f = 1;
    if (!prim.empty()) {
      bool proportional = std::all_of(prim.begin(), prim.end(), [&](const auto& d) { return d == prim.front(); });
      if (proportional) {
        Index gm = 0, mx = 0;
        for (Index m : mult) {
          gm = gcd128(gm, m);
          mx = std::max(mx, m);
        }
        f = mx / gm;
      } else {
        exact = false;
      }
    }
    Index band = 2 * g * f + 2 * g;
    if (band > options_.band_cap) {
      exact = false;
      band = options_.band_cap;
    }
    return band;
  }

  Row make_row(Index i) const {
    Row r;
    r.i = i;
    std::vector<Exponent> pq(w_), pb(w_), lq(w_);
    view_.prefix_q(i, pq.data());
    view_.prefix_b(i, pb.data());
    view_.term_q(i, lq.data());
    r.u = pq;
    r.v = pb;
    r.x = pq;
    r.y = pb;
    for (std::size_t p = 0; p < w_; ++p) {
      if (family_ == WindowFamily::assouad) {
        r.u[p] -= lq[p];
        r.v[p] -= lq[p];
      } else {
        r.x[p] -= lq[p];
        r.y[p] -= lq[p];
      }
    }
    std::tie(r.ul, r.ua) = view_.log2_of(r.u.data());
    std::tie(r.vl, r.va) = view_.log2_of(r.v.data());
    std::tie(r.xl, r.xa) = view_.log2_of(r.x.data());
    std::tie(r.yl, r.ya) = view_.log2_of(r.y.data());
    return r;
  }

  void fill_den(const Row& kr, const Row& cr) {
    for (std::size_t p = 0; p < w_; ++p) dd_[p] = cr.y[p] - kr.v[p];
  }
  void fill_num(const Row& kr, const Row& cr) {
    for (std::size_t p = 0; p < w_; ++p) nd_[p] = cr.x[p] - kr.u[p];
  }

  // Denominator log2 and its error bound.
  std::pair<ld, ld> den_of(const Row& kr, const Row& cr) {
    if (small_) return {cr.yl - kr.vl, kEps * (cr.ya + kr.va)};
    fill_den(kr, cr);
    const auto [s, a] = view_.log2_of(dd_.data());
    return {s, kEps * a * static_cast<ld>(w_ + 1)};
  }
  std::pair<ld, ld> num_of(const Row& kr, const Row& cr) {
    if (small_) return {cr.xl - kr.ul, kEps * (cr.xa + kr.ua)};
    fill_num(kr, cr);
    const auto [s, a] = view_.log2_of(nd_.data());
    return {s, kEps * a * static_cast<ld>(w_ + 1)};
  }

  bool near(ld dl, ld derr, std::size_t j) const {
    return std::fabs(dl - tl_[j]) <= derr + kEps * std::fabs(tl_[j]) * 4;
  }

  bool reached_exact(const Row& kr, const Row& cr, std::size_t j) {
    fill_den(kr, cr);
    return thresholds_[j].reached_by(view_.to_log(dd_.data()));
  }

  bool feasible(const Row& kr, const Row& cr, std::size_t j) {
    if (cr.i - kr.i < min_n_) return false;
    const auto [dl, derr] = den_of(kr, cr);
    if (!near(dl, derr, j)) return dl > tl_[j];
    return reached_exact(kr, cr, j);
  }

  int bucket(const Row& kr, const Row& cr, ld dl, ld derr) {
    int j = static_cast<int>(std::upper_bound(tl_.begin(), tl_.end(), dl) - tl_.begin()) - 1;
    while (j + 1 < static_cast<int>(tl_.size()) && near(dl, derr, j + 1) && reached_exact(kr, cr, j + 1)) ++j;
    while (j >= 0 && near(dl, derr, j) && !reached_exact(kr, cr, j)) --j;
    return j;
  }

  // Exact sign of n1/d1 - n2/d2 on exponent vectors.
  int exact_cmp(const std::vector<Exponent>& n1, const std::vector<Exponent>& d1, const std::vector<Exponent>& n2,
                const std::vector<Exponent>& d2) const {
    if (n1 == n2 && d1 == d2) return 0;
    if (w_ == 1) {
      const mpz_class lhs = to_mpz(n1[0]) * to_mpz(d2[0]);
      const mpz_class rhs = to_mpz(n2[0]) * to_mpz(d1[0]);
      return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
    }
    return compare_ratios(view_.to_log(n1.data()), view_.to_log(d1.data()), view_.to_log(n2.data()),
                          view_.to_log(d2.data()));
  }

  // a strictly preferable to b under the extremum and tie-break rules.
  bool prefer(const Best& a, const Best& b) const {
    int s;
    if (std::fabs(a.value - b.value) > a.err + b.err) {
      s = a.value > b.value ? 1 : -1;
    } else {
      s = exact_cmp(a.num, a.den, b.num, b.den);
    }
    if (s != 0) return maximize_ ? s > 0 : s < 0;
    if (a.k != b.k) return a.k < b.k;
    return a.c < b.c;
  }

  void consider(const Row& kr, const Row& cr) {
    if (kr.i < 1 || cr.i - kr.i < min_n_) return;
    ++pairs_;
    const auto [dl, derr] = den_of(kr, cr);
    if (dl + derr < tl_.front()) return;
    const int j = bucket(kr, cr, dl, derr);
    if (j < 0) return;
    const auto [nl, nerr] = num_of(kr, cr);
    const ld value = nl / dl;
    const ld err = (nerr + std::fabs(value) * derr) / dl;
    Best& b = best_[static_cast<std::size_t>(j)];
    if (b.set) {
      int s;
      if (std::fabs(value - b.value) > err + b.err) {
        s = value > b.value ? 1 : -1;
      } else {
        fill_num(kr, cr);
        fill_den(kr, cr);
        s = exact_cmp(nd_, dd_, b.num, b.den);
      }
      bool better = s != 0 ? (maximize_ ? s > 0 : s < 0) : (kr.i < b.k || (kr.i == b.k && cr.i < b.c));
      if (!better) return;
    }
    fill_num(kr, cr);
    fill_den(kr, cr);
    b.set = true;
    b.k = kr.i;
    b.c = cr.i;
    b.value = value;
    b.err = err;
    b.num = nd_;
    b.den = dd_;
  }

  const JointView& view_;
  WindowFamily family_;
  const std::vector<Threshold>& thresholds_;
  SearchOptions options_;
  std::size_t w_;
  Index min_n_;
  bool maximize_;
  bool small_ = true;
  std::vector<ld> tl_;
  std::vector<Best> best_;
  std::vector<Row> rows_;
  std::vector<Exponent> nd_, dd_;
  std::size_t pairs_ = 0;
};

}  // namespace

SearchResult search_windows(const JointView& view, WindowFamily family, const std::vector<Threshold>& thresholds,
                            const SearchOptions& options) {
  return Searcher(view, family, thresholds, options).run();
}

}  // namespace moran
