#include "opfree/ncpart.hpp"

#include <algorithm>
#include <functional>
#include <stack>

namespace opfree::ncpart {

std::int64_t catalan(int d) {
  if (d < 0) throw ValidationError("catalan: negative argument");
  std::vector<std::int64_t> c(static_cast<size_t>(d) + 1, 0);
  c[0] = 1;
  for (int n = 0; n < d; ++n) {
    std::int64_t acc = 0;
    for (int i = 0; i <= n; ++i) acc += c[i] * c[n - i];
    c[n + 1] = acc;
  }
  return c[d];
}

bool is_partition(int d, const std::vector<std::vector<int>>& blocks) {
  if (d < 0) return false;
  std::vector<char> seen(static_cast<size_t>(d) + 1, 0);
  int count = 0;
  for (const auto& b : blocks) {
    if (b.empty()) return false;
    for (int x : b) {
      if (x < 1 || x > d || seen[x]) return false;
      seen[x] = 1;
      ++count;
    }
  }
  return count == d;
}

bool is_noncrossing(int d, const std::vector<std::vector<int>>& blocks) {
  if (!is_partition(d, blocks))
    throw ValidationError("is_noncrossing: input is not a set partition of {1..d}");

  std::vector<int> block_of(static_cast<size_t>(d) + 1, -1);
  std::vector<int> first(blocks.size()), last(blocks.size());
  for (size_t bi = 0; bi < blocks.size(); ++bi) {
    auto [mn, mx] = std::minmax_element(blocks[bi].begin(), blocks[bi].end());
    first[bi] = *mn;
    last[bi] = *mx;
    for (int x : blocks[bi]) block_of[x] = static_cast<int>(bi);
  }

  // Proper nesting scan: a partition is non-crossing iff, walking 1..d, the
  // currently open block is always the most recently opened one.
  std::stack<int> open;
  for (int p = 1; p <= d; ++p) {
    const int b = block_of[p];
    if (p == first[b]) open.push(b);
    if (open.empty() || open.top() != b) return false;
    if (p == last[b]) open.pop();
  }
  return true;
}

NCPartition make_partition(int d, std::vector<std::vector<int>> blocks) {
  if (!is_partition(d, blocks))
    throw ValidationError("make_partition: input is not a set partition of {1..d}");
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  if (!is_noncrossing(d, blocks))
    throw ValidationError("make_partition: partition has a crossing");
  return NCPartition{d, std::move(blocks)};
}

namespace {

using Blocks = std::vector<std::vector<int>>;

// All non-crossing partitions of an ordered label set, via the block of the
// first label: the gaps between consecutive chosen labels and the tail after
// the last one are independent non-crossing regions.
std::vector<Blocks> nc_blocks(const std::vector<int>& labels) {
  if (labels.empty()) return {Blocks{}};
  const int n = static_cast<int>(labels.size());
  std::vector<Blocks> out;
  std::vector<int> block{labels[0]};

  std::function<void(int, const std::vector<Blocks>&)> extend =
      [&](int pos, const std::vector<Blocks>& partial) {
        {  // close the block at `pos`; everything after it is a free region
          std::vector<int> tail(labels.begin() + pos + 1, labels.end());
          for (const auto& t : nc_blocks(tail)) {
            for (const auto& a : partial) {
              Blocks result;
              result.push_back(block);
              result.insert(result.end(), a.begin(), a.end());
              result.insert(result.end(), t.begin(), t.end());
              out.push_back(std::move(result));
            }
          }
        }
        for (int q = pos + 1; q < n; ++q) {
          std::vector<int> gap(labels.begin() + pos + 1, labels.begin() + q);
          std::vector<Blocks> combined;
          for (const auto& g : nc_blocks(gap)) {
            for (const auto& a : partial) {
              Blocks merged = a;
              merged.insert(merged.end(), g.begin(), g.end());
              combined.push_back(std::move(merged));
            }
          }
          block.push_back(labels[q]);
          extend(q, combined);
          block.pop_back();
        }
      };

  extend(0, {Blocks{}});
  return out;
}

NCPartition canonicalize(int d, Blocks blocks) {
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return NCPartition{d, std::move(blocks)};
}

}  // namespace

std::vector<NCPartition> enumerate_nc(int d) {
  if (d < 1 || d > kMaxEnumerationSize)
    throw SizeLimitError("enumerate_nc: d must be in [1, " +
                         std::to_string(kMaxEnumerationSize) + "]");
  std::vector<int> labels(static_cast<size_t>(d));
  for (int i = 0; i < d; ++i) labels[i] = i + 1;
  std::vector<NCPartition> out;
  for (auto& b : nc_blocks(labels)) out.push_back(canonicalize(d, std::move(b)));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NCPartition> enumerate_nc_pairings(int d) {
  if (d % 2 != 0) return {};
  std::vector<NCPartition> out;
  for (auto& pi : enumerate_nc(d))
    if (pi.is_pair_partition()) out.push_back(std::move(pi));
  return out;
}

IntervalSplit split_on_block(const NCPartition& pi, std::size_t block_index) {
  if (pi.d < 1) throw ValidationError("split_on_block: empty partition");
  if (block_index >= pi.blocks.size()) throw ValidationError("split_on_block: bad block index");
  const std::vector<int>& chosen = pi.blocks[block_index];
  if (chosen.back() - chosen.front() + 1 != static_cast<int>(chosen.size()))
    throw ValidationError("split_on_block: chosen block is not an interval");

  const int k = chosen.front();
  const int l = chosen.back();
  const int removed = l - k + 1;

  // Relabel the surviving points 1..d-removed, preserving order.
  std::vector<int> relabel(static_cast<size_t>(pi.d) + 1, 0);
  int next = 1;
  for (int p = 1; p <= pi.d; ++p)
    if (p < k || p > l) relabel[p] = next++;

  std::vector<std::vector<int>> rest;
  for (size_t bi = 0; bi < pi.blocks.size(); ++bi) {
    if (bi == block_index) continue;
    std::vector<int> nb;
    nb.reserve(pi.blocks[bi].size());
    for (int x : pi.blocks[bi]) nb.push_back(relabel[x]);
    rest.push_back(std::move(nb));
  }
  return IntervalSplit{k, l, NCPartition{pi.d - removed, std::move(rest)}};
}

IntervalSplit split_interval_block(const NCPartition& pi) {
  if (pi.d < 1) throw ValidationError("split_interval_block: empty partition");
  for (size_t bi = 0; bi < pi.blocks.size(); ++bi) {
    const auto& b = pi.blocks[bi];
    if (b.back() - b.front() + 1 == static_cast<int>(b.size()))
      return split_on_block(pi, bi);  // blocks sorted by least element: first hit has smallest k
  }
  throw ValidationError("split_interval_block: no interval block (crossing input?)");
}

}  // namespace opfree::ncpart
