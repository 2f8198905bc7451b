#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "moran/int128.hpp"
#include "moran/log_product.hpp"

namespace moran {

/// `count` consecutive copies of `value`.
struct Run {
  std::uint64_t value = 0;
  Index count = 0;

  friend bool operator==(const Run&, const Run&) = default;
};

/// A homogeneous stretch of a sequence. A pattern segment repeats its runs
/// cyclically (truncated to `length`); a power segment has terms
/// base^(first_exponent + i) for i = 0, 1, ...
class Segment {
 public:
  enum class Type { pattern, power };

  static Segment pattern(std::vector<Run> runs, Index length);
  static Segment power(std::uint64_t base, Index first_exponent, Index length);

  Type type() const noexcept { return type_; }
  const std::vector<Run>& runs() const noexcept { return runs_; }
  std::uint64_t base() const noexcept { return base_; }
  Index first_exponent() const noexcept { return first_exponent_; }
  /// Number of terms; ignored for a tail, which is infinite.
  Index length() const noexcept { return length_; }
  /// Sum of run counts for a pattern, 1 for a power segment.
  Index period() const noexcept { return period_; }

  /// Term at 0-based offset i.
  mpz_class term(Index i) const;
  LogProduct log_term(Index i) const;
  /// Product of the first m terms.
  LogProduct prefix(Index m) const;

  std::uint64_t min_value() const;
  /// Largest pattern value; power segments report 0 (unbounded growth).
  std::uint64_t max_value() const;

  Segment with_length(Index length) const;

  friend bool operator==(const Segment& a, const Segment& b) {
    return a.type_ == b.type_ && a.runs_ == b.runs_ && a.base_ == b.base_ &&
           a.first_exponent_ == b.first_exponent_ && a.length_ == b.length_;
  }

 private:
  Segment() = default;
  std::size_t run_at(Index offset_in_period) const;

  Type type_ = Type::pattern;
  std::vector<Run> runs_;
  std::vector<Index> run_starts_;
  std::vector<LogProduct> run_prefix_;
  LogProduct period_log_;
  std::uint64_t base_ = 0;
  Index first_exponent_ = 0;
  Index length_ = 0;
  Index period_ = 1;
};

enum class SequenceKind { constant, explicit_list, geometric, blocks, synthesized, segments };

const char* to_string(SequenceKind kind);

/// Block-compressed integer sequence indexed from 1: finite segments followed
/// by an optional infinite tail.
class SequenceSpec {
 public:
  static SequenceSpec constant(std::uint64_t value);
  static SequenceSpec explicit_list(const std::vector<std::uint64_t>& values);
  /// term_n = base^n.
  static SequenceSpec geometric(std::uint64_t base);
  static SequenceSpec blocks(std::vector<Run> runs, std::vector<Run> cycle = {});
  /// Same layout as blocks, tagged with the JSON text describing its origin.
  static SequenceSpec synthesized(std::vector<Run> runs, std::vector<Run> cycle, std::string provenance);
  static SequenceSpec from_segments(std::vector<Segment> segments, std::optional<Segment> tail);
  /// Run-length encodes a finite list.
  static SequenceSpec compress(const std::vector<std::uint64_t>& values);

  SequenceKind kind() const noexcept { return kind_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }
  const std::optional<Segment>& tail() const noexcept { return tail_; }
  const std::string& provenance() const noexcept { return provenance_; }

  /// Last evaluable index; empty when the sequence is infinite.
  std::optional<Index> horizon() const;
  /// Decided from the layout: unbounded iff the tail is a power segment.
  bool bounded() const;
  /// Index where the tail begins (one past the finite part).
  Index tail_start() const noexcept { return finite_length_ + 1; }

  mpz_class term(Index n) const;
  LogProduct log_term(Index n) const;
  /// log of the product of terms 1..n (n = 0 gives the empty product).
  LogProduct prefix_log(Index n) const;
  /// log of the product of terms a..c, 1 <= a <= c.
  LogProduct log_product(Index a, Index c) const;
  /// Terms 1..n; throws when a term does not fit in 64 bits.
  std::vector<std::uint64_t> expand(Index n) const;

  struct Piece {
    Index start = 0;   // first index covered
    Index length = 0;  // number of indices covered
    const Segment* segment = nullptr;
    Index offset = 0;  // offset of `start` inside the segment
  };
  /// Maximal homogeneous pieces covering [a, c].
  std::vector<Piece> pieces(Index a, Index c) const;

 private:
  SequenceSpec() = default;
  void finalize();
  void check_index(Index n) const;

  SequenceKind kind_ = SequenceKind::segments;
  std::vector<Segment> segments_;
  std::optional<Segment> tail_;
  std::vector<Index> starts_;
  std::vector<LogProduct> cumulative_;
  Index finite_length_ = 0;
  std::string provenance_;
};

/// The pair (b, q) of a Moran measure.
struct MoranSpec {
  SequenceSpec b;
  SequenceSpec q;
  std::string label;

  /// Throws invalid_spec unless 2 <= q_n < b_n on the whole horizon.
  void validate() const;
  std::optional<Index> horizon() const;
  bool q_bounded() const { return q.bounded(); }
  bool b_bounded() const { return b.bounded(); }
};

/// The index range [k, k + n].
struct Window {
  Index k = 1;
  Index n = 0;

  Index last() const { return k + n; }
  friend bool operator==(const Window&, const Window&) = default;
};

}  // namespace moran
