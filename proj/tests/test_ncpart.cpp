#include <doctest.h>

#include <algorithm>
#include <set>

#include "opfree/ncpart.hpp"

using namespace opfree;
using namespace opfree::ncpart;

namespace {

using Blocks = std::vector<std::vector<int>>;

// Independent oracle: enumerate every set partition via restricted growth
// strings and test crossings with the naive quadruple loop.
std::vector<Blocks> all_set_partitions(int d) {
  std::vector<Blocks> out;
  std::vector<int> assign(static_cast<size_t>(d), 0);
  auto emit = [&]() {
    int nblocks = *std::max_element(assign.begin(), assign.end()) + 1;
    Blocks b(static_cast<size_t>(nblocks));
    for (int p = 0; p < d; ++p) b[assign[p]].push_back(p + 1);
    out.push_back(std::move(b));
  };
  std::function<void(int, int)> rec = [&](int pos, int maxused) {
    if (pos == d) {
      emit();
      return;
    }
    for (int b = 0; b <= maxused + 1; ++b) {
      assign[pos] = b;
      rec(pos + 1, std::max(maxused, b));
    }
  };
  rec(0, -1);
  return out;
}

bool naive_noncrossing(int d, const Blocks& blocks) {
  std::vector<int> bid(static_cast<size_t>(d) + 1, -1);
  for (size_t i = 0; i < blocks.size(); ++i)
    for (int x : blocks[i]) bid[x] = static_cast<int>(i);
  for (int a = 1; a <= d; ++a)
    for (int b = a + 1; b <= d; ++b)
      for (int c = b + 1; c <= d; ++c)
        for (int e = c + 1; e <= d; ++e)
          if (bid[a] == bid[c] && bid[b] == bid[e] && bid[a] != bid[b]) return false;
  return true;
}

}  // namespace

TEST_CASE("catalan numbers") {
  CHECK(catalan(0) == 1);
  CHECK(catalan(1) == 1);
  CHECK(catalan(4) == 14);
  CHECK(catalan(10) == 16796);
  CHECK(catalan(14) == 2674440);
}

TEST_CASE("enumerate_nc small cases") {
  auto one = enumerate_nc(1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].blocks == Blocks{{1}});

  auto two = enumerate_nc(2);
  REQUIRE(two.size() == 2);
  CHECK(two[0].blocks == Blocks{{1}, {2}});
  CHECK(two[1].blocks == Blocks{{1, 2}});

  CHECK(enumerate_nc(3).size() == 5);
  CHECK(enumerate_nc(4).size() == 14);
}

TEST_CASE("enumerate_nc counts match catalan and brute-force filter") {
  for (int d = 1; d <= 10; ++d) {
    auto nc = enumerate_nc(d);
    CHECK(static_cast<std::int64_t>(nc.size()) == catalan(d));
    for (const auto& pi : nc) CHECK(is_noncrossing(d, pi.blocks));
    CHECK(std::is_sorted(nc.begin(), nc.end()));
    // Canonical form and uniqueness
    std::set<Blocks> seen;
    for (const auto& pi : nc) {
      CHECK(pi.d == d);
      for (const auto& b : pi.blocks) CHECK(std::is_sorted(b.begin(), b.end()));
      for (size_t i = 1; i < pi.blocks.size(); ++i)
        CHECK(pi.blocks[i - 1].front() < pi.blocks[i].front());
      CHECK(seen.insert(pi.blocks).second);
    }
  }
  for (int d = 1; d <= 8; ++d) {
    std::set<Blocks> brute;
    for (const auto& b : all_set_partitions(d))
      if (naive_noncrossing(d, b)) brute.insert(b);
    std::set<Blocks> fast;
    for (const auto& pi : enumerate_nc(d)) fast.insert(pi.blocks);
    CHECK(brute == fast);
  }
}

TEST_CASE("enumerate_nc range errors") {
  CHECK_THROWS_AS(enumerate_nc(0), SizeLimitError);
  CHECK_THROWS_AS(enumerate_nc(kMaxEnumerationSize + 1), SizeLimitError);
}

TEST_CASE("is_noncrossing examples") {
  CHECK_FALSE(is_noncrossing(4, {{1, 3}, {2, 4}}));
  CHECK(is_noncrossing(4, {{1, 4}, {2, 3}}));
  CHECK(is_noncrossing(3, {{1, 2, 3}}));
  CHECK_THROWS_AS(is_noncrossing(3, {{1, 2}}), ValidationError);
  CHECK_THROWS_AS(is_noncrossing(3, {{1, 2}, {2, 3}}), ValidationError);
}

TEST_CASE("is_noncrossing agrees with the naive oracle") {
  for (int d = 1; d <= 7; ++d)
    for (const auto& b : all_set_partitions(d))
      CHECK(is_noncrossing(d, b) == naive_noncrossing(d, b));
}

TEST_CASE("split_interval_block examples") {
  {
    auto pi = make_partition(4, {{1, 4}, {2, 3}});
    auto s = split_interval_block(pi);
    CHECK(s.k == 2);
    CHECK(s.l == 3);
    CHECK(s.rest.blocks == Blocks{{1, 2}});
  }
  {
    auto pi = make_partition(3, {{1, 2, 3}});
    auto s = split_interval_block(pi);
    CHECK(s.k == 1);
    CHECK(s.l == 3);
    CHECK(s.rest.blocks.empty());
  }
  {
    auto pi = make_partition(3, {{1}, {2, 3}});
    auto s = split_interval_block(pi);
    CHECK(s.k == 1);
    CHECK(s.l == 1);
    CHECK(s.rest.blocks == Blocks{{1, 2}});
  }
}

TEST_CASE("repeated splits terminate in block count steps and reconstruct") {
  for (int d = 1; d <= 8; ++d) {
    for (const auto& pi : enumerate_nc(d)) {
      // Peel intervals, tracking original labels of the shrinking ground set.
      std::vector<int> labels(static_cast<size_t>(d));
      for (int i = 0; i < d; ++i) labels[i] = i + 1;
      NCPartition cur = pi;
      Blocks rebuilt;
      size_t steps = 0;
      while (cur.d > 0) {
        auto s = split_interval_block(cur);
        std::vector<int> original;
        for (int p = s.k; p <= s.l; ++p) original.push_back(labels[p - 1]);
        rebuilt.push_back(original);
        labels.erase(labels.begin() + (s.k - 1), labels.begin() + s.l);
        cur = s.rest;
        ++steps;
        REQUIRE(steps <= pi.blocks.size());
      }
      CHECK(steps == pi.blocks.size());
      std::sort(rebuilt.begin(), rebuilt.end(),
                [](const auto& a, const auto& b) { return a.front() < b.front(); });
      CHECK(rebuilt == pi.blocks);
    }
  }
}

TEST_CASE("pair partition enumeration") {
  CHECK(enumerate_nc_pairings(3).empty());
  CHECK(enumerate_nc_pairings(2).size() == 1);
  CHECK(enumerate_nc_pairings(4).size() == 2);
  CHECK(enumerate_nc_pairings(6).size() == 5);
  CHECK(enumerate_nc_pairings(8).size() == 14);
}
