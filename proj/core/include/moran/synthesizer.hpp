#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "moran/log_product.hpp"
#include "moran/sequence.hpp"

namespace moran {

struct SynthParams {
  std::uint64_t alpha0 = 0;
  std::uint64_t alpha1 = 0;
  std::uint64_t beta = 0;
};

/// Strict: the pick_params chain log a0 < (log a0 + log a1)/2 < gamma <= log a1
/// (all over log beta). Relaxed: log a0 <= gamma <= log a1 only, as used for
/// interleaver components sharing one triple.
enum class RecursionMode { strict, relaxed };

/// Throws no_parameters naming the first violated condition.
void validate_params(const SynthParams& params, const mpq_class& gamma, RecursionMode mode);

/// First triple with beta <= beta_cap satisfying the strict chain, divisibility
/// and alpha1 < beta. Order: beta descending from the cap, alpha1 descending,
/// alpha0 ascending.
SynthParams pick_params(const mpq_class& gamma, std::uint64_t beta_cap = 64);

/// Immutable word over {0, 1}, stored as a DAG of symbols, powers and
/// concatenations so that lengths far beyond memory stay cheap.
class Word {
 public:
  static Word symbol(int s);
  static Word concat(const Word& a, const Word& b);
  static Word power(const Word& a, Index times);
  /// Parses "0110".
  static Word from_string(const std::string& text);

  Index length() const;
  Index zeros() const;
  Index ones() const;
  /// Run-length encoding of the first min(limit, length) symbols.
  std::vector<Run> runs(Index limit) const;
  std::string to_string(Index limit = 64) const;

 private:
  struct Node;
  explicit Word(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Phi(w) = (#0 log a0 + #1 log a1) / (|w| log beta).
struct PhiValue {
  Index zeros = 0;
  Index ones = 0;
  long double value = 0;
  /// Present when log a0 / log beta and log a1 / log beta are rational.
  std::optional<mpq_class> exact;
};

PhiValue phi(const Word& word, const SynthParams& params);

/// |w| * q * log(beta) * (Phi(w) - gamma) for gamma = p/q, as an exact log.
/// Additive under concatenation; its sign is the sign of Phi(w) - gamma.
LogProduct phi_excess(const Word& word, const SynthParams& params, const mpq_class& gamma);

struct WordPair {
  int k = 0;
  Word u = Word::symbol(0);
  Word v = Word::symbol(1);
  /// Empty when the equality branch fired ("infinite").
  std::optional<Index> n_k;
  bool equality_branch = false;
  LogProduct excess_u;
  LogProduct excess_v;
};

WordPair initial_pair(const SynthParams& params, const mpq_class& gamma);
/// Stage k from stage k - 1; parity of k selects the branch.
WordPair next_pair(const WordPair& prev, const mpq_class& gamma, const SynthParams& params,
                   RecursionMode mode = RecursionMode::strict);

struct SynthesisResult {
  SynthParams params;
  mpq_class gamma;
  std::vector<WordPair> stages;
  /// Primitive period of x when the equality branch fired (x = period^inf).
  std::optional<Word> period;
  /// A prefix of x at least `length` long (capped for periodic x).
  Word prefix = Word::symbol(0);
  Index length = 0;
};

/// Runs the recursion until N_{2k} >= length (or until x is periodic) and
/// returns the prefix x_[1, length].
SynthesisResult limit_sequence(const SynthParams& params, const mpq_class& gamma, Index length,
                               RecursionMode mode = RecursionMode::strict);
std::vector<Run> limit_sequence_prefix(const SynthParams& params, const mpq_class& gamma, Index length,
                                       RecursionMode mode = RecursionMode::strict);

/// b constant beta, q_n = alpha_{x_n}; cyclic q when x is periodic, otherwise
/// a finite horizon equal to the prefix length.
MoranSpec moran_from_sequence(const SynthesisResult& synthesis);

/// The gamma = 0 construction: q constant alpha, b_n = beta^n.
MoranSpec zero_dimension_spec(std::uint64_t alpha = 2, std::uint64_t beta = 4);

struct LemmaReport {
  int k = 0;
  bool sandwich = false;         // Phi(u_k) <= gamma <= Phi(v_k), or the reverse
  bool n_at_least_two = true;    // vacuous for k = 0
  bool prefix_property = false;  // u_{k-1} or v_{k-1} is a prefix of both words
  bool rate_literal = false;     // gap <= 2^-k (Phi(v_0) - gamma)
  bool rate_corrected = false;   // gap <= 2^-(k-1) times the larger stage-0 gap
};

std::vector<LemmaReport> check_lemmas(const SynthesisResult& synthesis);

/// max over n of |Phi(x_[n, n+r]) - gamma| on the prefix (r + 1 symbols per window).
long double window_deviation(const SynthesisResult& synthesis, Index r);
/// Same, as an exact rational when Phi is rational.
std::optional<mpq_class> window_deviation_exact(const SynthesisResult& synthesis, Index r);

/// Best bound over completed stages k: gap_k + 2 N_k D / (r + 1), with gap_k the
/// stage-k distance of Phi(u), Phi(v) to gamma and D the largest symbol deviation.
long double window_bound(const SynthesisResult& synthesis, Index r);

}  // namespace moran
