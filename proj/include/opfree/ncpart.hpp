#pragma once

#include <cstdint>
#include <vector>

#include "opfree/common.hpp"

namespace opfree::ncpart {

// Non-crossing set partition of {1..d}. Canonical form: blocks sorted by
// least element, elements inside a block ascending.
struct NCPartition {
  int d = 0;
  std::vector<std::vector<int>> blocks;

  bool operator==(const NCPartition& o) const { return d == o.d && blocks == o.blocks; }
  bool operator<(const NCPartition& o) const { return blocks < o.blocks; }

  bool is_pair_partition() const {
    for (const auto& b : blocks)
      if (b.size() != 2) return false;
    return true;
  }
};

// Enumeration cap; |NC(14)| = Catalan(14) = 2674440 keeps memory under 1 GB.
inline constexpr int kMaxEnumerationSize = 14;

std::int64_t catalan(int d);

// True iff `blocks` is a set partition of {1..d}.
bool is_partition(int d, const std::vector<std::vector<int>>& blocks);

// Crossing test. Throws ValidationError if `blocks` is not a partition of {1..d}.
bool is_noncrossing(int d, const std::vector<std::vector<int>>& blocks);

// Canonicalizes block order and validates partition + non-crossing structure.
NCPartition make_partition(int d, std::vector<std::vector<int>> blocks);

// All of NC(d), canonical and sorted lexicographically by block structure.
std::vector<NCPartition> enumerate_nc(int d);

// Non-crossing pair partitions only (empty for odd d).
std::vector<NCPartition> enumerate_nc_pairings(int d);

struct IntervalSplit {
  int k = 0;         // interval block [k,l], 1-based, smallest k among interval blocks
  int l = 0;
  NCPartition rest;  // remaining partition relabeled to {1..d-(l-k+1)}
};

// Peels off the interval block with the smallest starting index. A non-crossing
// partition always contains one, so this never fails for valid input.
IntervalSplit split_interval_block(const NCPartition& pi);

// Peels off a chosen block, which must be an interval.
IntervalSplit split_on_block(const NCPartition& pi, std::size_t block_index);

}  // namespace opfree::ncpart
