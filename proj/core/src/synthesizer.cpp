#include "moran/synthesizer.hpp"

#include <algorithm>
#include <cmath>

#include "moran/error.hpp"
#include "moran/spec_json.hpp"

namespace moran {

// ---------------------------------------------------------------- words

struct Word::Node {
  enum class Kind { symbol, concat, power } kind = Kind::symbol;
  int sym = 0;
  std::shared_ptr<const Node> a, b;
  Index times = 0;
  Index length = 1;
  Index zeros = 0;
};

Word Word::symbol(int s) {
  if (s != 0 && s != 1) throw Error(ErrorCode::invalid_argument, "symbols are 0 and 1");
  auto n = std::make_shared<Node>();
  n->sym = s;
  n->zeros = s == 0 ? 1 : 0;
  return Word(std::move(n));
}

Word Word::concat(const Word& a, const Word& b) {
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::concat;
  n->a = a.node_;
  n->b = b.node_;
  n->length = checked_add(a.length(), b.length());
  n->zeros = a.zeros() + b.zeros();
  return Word(std::move(n));
}

Word Word::power(const Word& a, Index times) {
  if (times < 1) throw Error(ErrorCode::invalid_argument, "word power needs times >= 1");
  if (times == 1) return a;
  auto n = std::make_shared<Node>();
  n->kind = Node::Kind::power;
  n->a = a.node_;
  n->times = times;
  n->length = checked_mul(a.length(), times);
  n->zeros = checked_mul(a.zeros(), times);
  return Word(std::move(n));
}

Word Word::from_string(const std::string& text) {
  if (text.empty()) throw Error(ErrorCode::invalid_argument, "empty word");
  std::optional<Word> out;
  for (char c : text) {
    if (c != '0' && c != '1') throw Error(ErrorCode::parse_error, "word characters must be 0 or 1");
    Word s = symbol(c - '0');
    out = out ? concat(*out, s) : s;
  }
  return *out;
}

Index Word::length() const { return node_->length; }
Index Word::zeros() const { return node_->zeros; }
Index Word::ones() const { return node_->length - node_->zeros; }

namespace {

void push_run(std::vector<Run>& out, std::uint64_t value, Index count) {
  if (count <= 0) return;
  if (!out.empty() && out.back().value == value) {
    out.back().count += count;
  } else {
    out.push_back({value, count});
  }
}

}  // namespace

std::vector<Run> Word::runs(Index limit) const {
  std::vector<Run> out;
  Index left = std::min(limit, length());
  // Explicit recursion; depth stays small since stages nest a few levels each.
  auto emit = [&](auto&& self, const Node& n) -> void {
    if (left <= 0) return;
    switch (n.kind) {
      case Node::Kind::symbol:
        push_run(out, static_cast<std::uint64_t>(n.sym), 1);
        --left;
        return;
      case Node::Kind::concat:
        self(self, *n.a);
        self(self, *n.b);
        return;
      case Node::Kind::power:
        if (n.a->kind == Node::Kind::symbol) {
          const Index take = std::min(left, n.times);
          push_run(out, static_cast<std::uint64_t>(n.a->sym), take);
          left -= take;
          return;
        }
        for (Index i = 0; i < n.times && left > 0; ++i) self(self, *n.a);
        return;
    }
  };
  emit(emit, *node_);
  return out;
}

std::string Word::to_string(Index limit) const {
  std::string s;
  for (const Run& r : runs(limit)) s.append(static_cast<std::size_t>(r.count), r.value ? '1' : '0');
  return s;
}

// ---------------------------------------------------------------- phi

namespace {

struct Gamma {
  Exponent p, q;
};

Gamma split(const mpq_class& gamma) {
  mpq_class g = gamma;
  g.canonicalize();
  return {to_int128(g.get_num()), to_int128(g.get_den())};
}

void check_gamma(const mpq_class& gamma) {
  if (gamma <= 0 || gamma > 1) throw Error(ErrorCode::invalid_argument, "gamma must lie in (0, 1]");
}

struct SymbolRatios {
  std::optional<mpq_class> a0, a1;  // log alpha_i / log beta
  long double f0, f1;
};

SymbolRatios ratios(const SynthParams& p) {
  const auto lb = LogProduct::of(p.beta);
  const auto l0 = LogProduct::of(p.alpha0), l1 = LogProduct::of(p.alpha1);
  return {exact_ratio(l0, lb), exact_ratio(l1, lb), l0.log2() / lb.log2(), l1.log2() / lb.log2()};
}

}  // namespace

PhiValue phi(const Word& word, const SynthParams& params) {
  PhiValue v;
  v.zeros = word.zeros();
  v.ones = word.ones();
  const SymbolRatios r = ratios(params);
  const long double n = static_cast<long double>(word.length());
  v.value = (static_cast<long double>(v.zeros) * r.f0 + static_cast<long double>(v.ones) * r.f1) / n;
  if (r.a0 && r.a1) {
    mpq_class e = (*r.a0 * mpq_class(to_mpz(v.zeros)) + *r.a1 * mpq_class(to_mpz(v.ones))) /
                  mpq_class(to_mpz(word.length()));
    e.canonicalize();
    v.exact = e;
  }
  return v;
}

LogProduct phi_excess(const Word& word, const SynthParams& params, const mpq_class& gamma) {
  const Gamma g = split(gamma);
  return LogProduct::of(params.alpha0, checked_mul(g.q, word.zeros())) +
         LogProduct::of(params.alpha1, checked_mul(g.q, word.ones())) -
         LogProduct::of(params.beta, checked_mul(g.p, word.length()));
}

// ---------------------------------------------------------------- params

void validate_params(const SynthParams& params, const mpq_class& gamma, RecursionMode mode) {
  check_gamma(gamma);
  const auto [a0, a1, beta] = params;
  if (a0 < 2 || a1 < 2 || beta < 2) throw Error(ErrorCode::no_parameters, "alpha0, alpha1, beta must be >= 2");
  if (beta % a0 != 0 || beta % a1 != 0) {
    throw Error(ErrorCode::divisibility, "alpha0 and alpha1 must divide beta");
  }
  if (a0 >= beta || a1 >= beta) throw Error(ErrorCode::no_parameters, "constraint alpha < beta violated");
  const Gamma g = split(gamma);
  const auto top = LogProduct::of(beta, g.p);
  if (compare(top, LogProduct::of(a1, g.q)) > 0) {
    throw Error(ErrorCode::no_parameters, "constraint gamma <= log alpha1 / log beta violated");
  }
  if (mode == RecursionMode::relaxed) {
    if (compare(LogProduct::of(a0, g.q), top) > 0) {
      throw Error(ErrorCode::no_parameters, "constraint log alpha0 / log beta <= gamma violated");
    }
    return;
  }
  if (a0 >= a1) throw Error(ErrorCode::no_parameters, "constraint alpha0 < alpha1 violated");
  if (compare(LogProduct::of(a0, g.q) + LogProduct::of(a1, g.q), top.scaled(2)) >= 0) {
    throw Error(ErrorCode::no_parameters, "constraint midpoint < gamma violated");
  }
}

SynthParams pick_params(const mpq_class& gamma, std::uint64_t beta_cap) {
  check_gamma(gamma);
  if (gamma == 1) {
    throw Error(ErrorCode::no_parameters, "gamma = 1 is unreachable: constraint alpha1 < beta forces log alpha1 / log beta < 1");
  }
  bool reach = false;  // some alpha1 reached gamma
  for (std::uint64_t beta = beta_cap; beta >= 3; --beta) {
    std::vector<std::uint64_t> divs;
    for (std::uint64_t d = 2; d < beta; ++d) {
      if (beta % d == 0) divs.push_back(d);
    }
    for (auto i1 = divs.rbegin(); i1 != divs.rend(); ++i1) {
      for (std::uint64_t a0 : divs) {
        if (a0 >= *i1) break;
        const SynthParams p{a0, *i1, beta};
        try {
          validate_params(p, gamma, RecursionMode::strict);
          return p;
        } catch (const Error& e) {
          if (std::string(e.what()).find("midpoint") != std::string::npos) reach = true;
        }
      }
    }
  }
  throw Error(ErrorCode::no_parameters,
              "no triple with beta <= " + std::to_string(beta_cap) + "; binding constraint: " +
                  (reach ? "midpoint < gamma" : "gamma <= log alpha1 / log beta"));
}

// ---------------------------------------------------------------- recursion

WordPair initial_pair(const SynthParams& params, const mpq_class& gamma) {
  WordPair w;
  w.k = 0;
  w.u = Word::symbol(0);
  w.v = Word::symbol(1);
  w.n_k = 1;
  w.excess_u = phi_excess(w.u, params, gamma);
  w.excess_v = phi_excess(w.v, params, gamma);
  return w;
}

namespace {

// Largest m >= 0 with sign(step * m + base) on the allowed side; step has the
// opposite sign of the requirement so the set of valid m is an initial segment.
Index max_multiplier(const LogProduct& step, const LogProduct& base, bool want_nonpositive) {
  auto ok = [&](Index m) {
    const int s = sign(step.scaled(m) + base);
    return want_nonpositive ? s <= 0 : s >= 0;
  };
  long double est = std::fabs(base.log2() / step.log2());
  if (!std::isfinite(est) || est > 1e30L) throw Error(ErrorCode::overflow, "multiplier out of range");
  Index m = static_cast<Index>(std::floor(est));
  while (m > 0 && !ok(m)) --m;
  while (ok(m + 1)) ++m;
  return m;
}

}  // namespace

WordPair next_pair(const WordPair& prev, const mpq_class&, const SynthParams&, RecursionMode mode) {
  const int k = prev.k + 1;
  const LogProduct& eu = prev.excess_u;
  const LogProduct& ev = prev.excess_v;
  if (sign(eu) > 0 || sign(ev) < 0) {
    throw Error(ErrorCode::no_parameters, "stage " + std::to_string(prev.k) + " does not bracket gamma");
  }
  WordPair out;
  out.k = k;
  const bool odd = k % 2 == 1;
  const Word& fixed = odd ? prev.v : prev.u;
  if ((odd ? ev : eu).is_zero()) {
    out.equality_branch = true;
    out.u = out.v = Word::power(fixed, 2);
    out.excess_u = out.excess_v = (odd ? ev : eu).scaled(2);
    return out;
  }
  const Index m = odd ? max_multiplier(ev, eu, true) : max_multiplier(eu, ev, false);
  const Index n = m + 1;
  if (mode == RecursionMode::strict && n < 2) {
    throw Error(ErrorCode::no_parameters,
                "n_" + std::to_string(k) + " = 1: parameter invariant violated upstream");
  }
  out.n_k = n;
  if (odd) {
    out.u = m > 0 ? Word::concat(Word::power(prev.v, m), prev.u) : prev.u;
    out.v = Word::power(prev.v, n);
    out.excess_u = ev.scaled(m) + eu;
    out.excess_v = ev.scaled(n);
  } else {
    out.u = Word::power(prev.u, n);
    out.v = m > 0 ? Word::concat(Word::power(prev.u, m), prev.v) : prev.v;
    out.excess_u = eu.scaled(n);
    out.excess_v = eu.scaled(m) + ev;
  }
  return out;
}

namespace {

constexpr Index kMaterializeCap = Index{1} << 22;

// Smallest p dividing |w| with w = (w[0,p))^(|w|/p); w itself when too long.
Word primitive_root(const Word& w) {
  if (w.length() > kMaterializeCap) return w;
  const std::string s = w.to_string(w.length());
  std::vector<std::size_t> pi(s.size(), 0);
  for (std::size_t i = 1; i < s.size(); ++i) {
    std::size_t j = pi[i - 1];
    while (j > 0 && s[i] != s[j]) j = pi[j - 1];
    if (s[i] == s[j]) ++j;
    pi[i] = j;
  }
  const std::size_t p = s.size() - pi.back();
  return s.size() % p == 0 ? Word::from_string(s.substr(0, p)) : w;
}

}  // namespace

SynthesisResult limit_sequence(const SynthParams& params, const mpq_class& gamma, Index length, RecursionMode mode) {
  if (length < 1) throw Error(ErrorCode::invalid_argument, "prefix length must be >= 1");
  validate_params(params, gamma, mode);
  SynthesisResult res;
  res.params = params;
  res.gamma = gamma;
  res.stages.push_back(initial_pair(params, gamma));
  while (true) {
    const WordPair& last = res.stages.back();
    if (last.equality_branch) {
      res.period = primitive_root(last.u);
      break;
    }
    if (last.k % 2 == 0 && last.k > 0 && last.v.length() >= length) break;
    res.stages.push_back(next_pair(last, gamma, params, mode));
  }
  if (res.period) {
    // x = period^inf
    const Word& p = *res.period;
    const Index reps = (std::min(length, kMaterializeCap) + p.length() - 1) / p.length();
    res.prefix = Word::power(p, std::max<Index>(reps, 1));
  } else {
    res.prefix = res.stages.back().v;
  }
  res.length = length;
  return res;
}

std::vector<Run> limit_sequence_prefix(const SynthParams& params, const mpq_class& gamma, Index length,
                                       RecursionMode mode) {
  const SynthesisResult r = limit_sequence(params, gamma, length, mode);
  if (length > kMaterializeCap && !r.period) {
    throw Error(ErrorCode::invalid_argument, "prefix too long to materialize");
  }
  if (r.period && length > kMaterializeCap) {
    throw Error(ErrorCode::invalid_argument, "prefix too long to materialize; use the period");
  }
  return r.prefix.runs(length);
}

// ---------------------------------------------------------------- specs

namespace {

std::vector<Run> to_alphas(const std::vector<Run>& symbols, const SynthParams& p) {
  std::vector<Run> out;
  for (const Run& r : symbols) push_run(out, r.value ? p.alpha1 : p.alpha0, r.count);
  return out;
}

}  // namespace

MoranSpec moran_from_sequence(const SynthesisResult& s) {
  Json prov;
  prov["construction"] = "symbolic";
  prov["alpha0"] = s.params.alpha0;
  prov["alpha1"] = s.params.alpha1;
  prov["beta"] = s.params.beta;
  prov["gamma"] = rational_to_string(s.gamma);
  prov["stages"] = s.stages.size() - 1;
  std::optional<SequenceSpec> q;
  if (s.period) {
    const Word& p = *s.period;
    prov["period"] = p.to_string(p.length());
    q = SequenceSpec::synthesized({}, to_alphas(p.runs(p.length()), s.params), prov.dump());
  } else {
    if (s.length > kMaterializeCap) throw Error(ErrorCode::invalid_argument, "aperiodic prefix too long");
    prov["period"] = nullptr;
    q = SequenceSpec::synthesized(to_alphas(s.prefix.runs(s.length), s.params), {}, prov.dump());
  }
  MoranSpec spec{SequenceSpec::constant(s.params.beta), *q, ""};
  spec.label = "gamma=" + rational_to_string(s.gamma);
  spec.validate();
  return spec;
}

MoranSpec zero_dimension_spec(std::uint64_t alpha, std::uint64_t beta) {
  if (alpha < 2 || alpha >= beta) throw Error(ErrorCode::invalid_argument, "need 2 <= alpha < beta");
  MoranSpec spec{SequenceSpec::geometric(beta), SequenceSpec::constant(alpha), "gamma=0"};
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------- checks

std::vector<LemmaReport> check_lemmas(const SynthesisResult& s) {
  std::vector<LemmaReport> out;
  const WordPair& w0 = s.stages.front();
  const LogProduct d_lit = w0.excess_v;
  const LogProduct d_max = compare(w0.excess_v, LogProduct() - w0.excess_u) >= 0 ? w0.excess_v
                                                                                   : LogProduct() - w0.excess_u;
  for (std::size_t i = 0; i < s.stages.size(); ++i) {
    const WordPair& w = s.stages[i];
    LemmaReport r;
    r.k = w.k;
    const LogProduct& eu = w.excess_u;
    const LogProduct& ev = w.excess_v;
    if (w.equality_branch) {
      r.sandwich = eu.is_zero() && ev.is_zero();
    } else if (w.k == 0) {
      r.sandwich = sign(eu) <= 0 && sign(ev) >= 0;
    } else if (w.k % 2 == 1) {
      r.sandwich = sign(eu) <= 0 && sign(eu.scaled(*w.n_k) + ev) >= 0;
    } else {
      r.sandwich = sign(ev) >= 0 && sign(ev.scaled(*w.n_k) + eu) <= 0;
    }
    r.n_at_least_two = w.k == 0 || !w.n_k || *w.n_k >= 2;
    if (w.k == 0) {
      r.prefix_property = true;
    } else {
      const WordPair& p = s.stages[i - 1];
      const Word& shared = w.k % 2 == 1 ? p.v : p.u;
      const Index lim = std::min<Index>(shared.length(), 4096);
      const auto want = shared.runs(lim);
      r.prefix_property = w.u.runs(lim) == want && w.v.runs(lim) == want;
    }
    // gap_k * 2^k <= D * N_k, all scaled by q log beta
    const LogProduct gap = compare(ev, LogProduct() - eu) >= 0 ? ev : LogProduct() - eu;
    const Index nk = w.u.length();
    if (w.k < 120) {
      const Exponent two_k = Exponent{1} << w.k;
      r.rate_literal = compare(gap.scaled(two_k), d_lit.scaled(nk)) <= 0;
      const Exponent two_k1 = w.k == 0 ? 1 : Exponent{1} << (w.k - 1);
      r.rate_corrected = w.k == 0 ? compare(gap, d_max) <= 0
                                  : compare(gap.scaled(two_k1), d_max.scaled(nk)) <= 0;
    }
    out.push_back(r);
  }
  return out;
}

namespace {

// Extreme counts of ones over windows of r + 1 symbols.
std::pair<Index, Index> ones_range(const SynthesisResult& s, Index r) {
  const Index m = r + 1;
  const Index len = std::min(s.length, s.prefix.length());
  if (r < 1 || m > len) throw Error(ErrorCode::invalid_argument, "window length must satisfy 1 <= r < L");
  if (len > kMaterializeCap) throw Error(ErrorCode::invalid_argument, "prefix too long for window scan");
  const std::string x = s.prefix.to_string(len);
  Index ones = 0;
  for (Index i = 0; i < m; ++i) ones += x[static_cast<std::size_t>(i)] == '1';
  Index lo = ones, hi = ones;
  for (Index i = m; i < len; ++i) {
    ones += (x[static_cast<std::size_t>(i)] == '1') - (x[static_cast<std::size_t>(i - m)] == '1');
    lo = std::min(lo, ones);
    hi = std::max(hi, ones);
  }
  return {lo, hi};
}

}  // namespace

long double window_deviation(const SynthesisResult& s, Index r) {
  const auto [lo, hi] = ones_range(s, r);
  const SymbolRatios q = ratios(s.params);
  const long double g = s.gamma.get_d(), m = static_cast<long double>(r + 1);
  auto dev = [&](Index ones) {
    const long double o = static_cast<long double>(ones);
    return std::fabs(((m - o) * q.f0 + o * q.f1) / m - g);
  };
  return std::max(dev(lo), dev(hi));
}

std::optional<mpq_class> window_deviation_exact(const SynthesisResult& s, Index r) {
  const SymbolRatios q = ratios(s.params);
  if (!q.a0 || !q.a1) return std::nullopt;
  const auto [lo, hi] = ones_range(s, r);
  const mpq_class m(to_mpz(r + 1));
  auto dev = [&](Index ones) -> mpq_class {
    const mpq_class o(to_mpz(ones));
    mpq_class d = ((m - o) * *q.a0 + o * *q.a1) / m - s.gamma;
    d.canonicalize();
    return abs(d);
  };
  const mpq_class a = dev(lo), b = dev(hi);
  return a > b ? a : b;
}

long double window_bound(const SynthesisResult& s, Index r) {
  const SymbolRatios q = ratios(s.params);
  const long double g = s.gamma.get_d();
  const long double d = std::max(q.f1 - g, g - q.f0);
  long double best = INFINITY;
  for (const WordPair& w : s.stages) {
    const long double gap = std::max(phi(w.v, s.params).value - g, g - phi(w.u, s.params).value);
    const long double bound = std::max(gap, 0.0L) +
                              2.0L * static_cast<long double>(w.u.length()) * d / static_cast<long double>(r + 1);
    best = std::min(best, bound);
  }
  return best;
}

}  // namespace moran
