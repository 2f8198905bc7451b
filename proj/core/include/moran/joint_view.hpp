#pragma once

#include <cstdint>
#include <vector>

#include "moran/int128.hpp"
#include "moran/log_product.hpp"
#include "moran/sequence.hpp"

namespace moran {

/// A Moran spec truncated at `depth`, seen through a common prime basis.
/// Products of terms become exponent vectors, so differences of prefixes
/// are exact integers no matter how long the prefix is.
class JointView {
 public:
  /// Periods beyond this are treated as aperiodic.
  static constexpr Index kPeriodCap = 4096;

  /// A maximal stretch where both q and b are homogeneous. `period` is the
  /// joint period, or 0 when the stretch has no usable period.
  struct Block {
    Index start = 0;
    Index length = 0;
    Index period = 0;
  };

  JointView(const MoranSpec& spec, Index depth);

  const MoranSpec& spec() const noexcept { return spec_; }
  Index depth() const noexcept { return depth_; }
  const std::vector<std::uint64_t>& basis() const noexcept { return basis_; }
  std::size_t width() const noexcept { return basis_.size(); }
  const std::vector<long double>& log2_basis() const noexcept { return log2_basis_; }
  const std::vector<Block>& blocks() const noexcept { return blocks_; }

  /// Exponents of q_1...q_i (i = 0 allowed) written to out[0..width).
  void prefix_q(Index i, Exponent* out) const;
  void prefix_b(Index i, Exponent* out) const;
  void term_q(Index i, Exponent* out) const;
  void term_b(Index i, Exponent* out) const;

  LogProduct to_log(const Exponent* v) const;
  /// sum_p v_p log2 p together with sum_p |v_p| log2 p (an error scale).
  std::pair<long double, long double> log2_of(const Exponent* v) const;

 private:
  void scatter(const LogProduct& lp, Exponent* out) const;

  const MoranSpec& spec_;
  Index depth_;
  std::vector<std::uint64_t> basis_;
  std::vector<long double> log2_basis_;
  std::vector<Block> blocks_;
};

}  // namespace moran
