#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "voxelgraph/metrics.hpp"
#include "voxelgraph/parallel.hpp"

using namespace voxelgraph;

namespace {

Mask3 voxels(Dims d, std::initializer_list<Coord> on) {
  Mask3 m(d, {1, 1, 1});
  for (const Coord& c : on) m.set(m.index(c), true);
  return m;
}

}  // namespace

TEST_CASE("dice conventions") {
  const Mask3 empty({2, 2, 2}, {1, 1, 1});
  const Mask3 a = voxels({2, 2, 2}, {{0, 0, 0}, {1, 1, 1}});
  const Mask3 b = voxels({2, 2, 2}, {{0, 0, 0}});
  CHECK(dice(empty, empty) == 1.0);
  CHECK(dice(empty, a) == 0.0);
  CHECK(dice(a, a) == 1.0);
  CHECK(dice(a, b) == 2.0 / 3.0);
  CHECK_THROWS_AS(dice(a, Mask3({1, 2, 2}, {1, 1, 1})), Error);
}

TEST_CASE("single voxels three apart") {
  const Mask3 a = voxels({1, 1, 8}, {{0, 0, 1}});
  const Mask3 b = voxels({1, 1, 8}, {{0, 0, 4}});
  CHECK(hd95(a, b, {1, 1, 1}) == 3.0);
  CHECK(assd(a, b, {1, 1, 1}) == 3.0);
  CHECK(hd95(a, b, {1, 1, 2.5}) == 7.5);
}

TEST_CASE("identical masks have zero distance") {
  SplitMix64 rng(2);
  const Mask3 m = fixture::random_mask(rng, {6, 7, 8}, {1, 1, 1});
  if (m.count() > 0) {
    CHECK(hd95(m, m, {1, 2, 3}) == 0.0);
    CHECK(assd(m, m, {1, 2, 3}) == 0.0);
  }
}

TEST_CASE("distances are undefined for empty masks") {
  const Mask3 empty({3, 3, 3}, {1, 1, 1});
  const Mask3 a = voxels({3, 3, 3}, {{1, 1, 1}});
  try {
    hd95(empty, a, {1, 1, 1});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::metric_undefined);
  }
  const MetricsReport r = evaluate(empty, a, {1, 1, 1});
  CHECK(r.dice == 0.0);
  CHECK_FALSE(r.hd95.has_value());
  CHECK_FALSE(r.assd.has_value());
  CHECK(r.surface_gt == 1);
}

TEST_CASE("percentile uses linear interpolation between order statistics") {
  CHECK(percentile({1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(percentile({5}, 0.95) == 5.0);
  CHECK(percentile({0, 10}, 0.95) == 9.5);
  std::vector<double> v;
  for (int i = 0; i <= 100; ++i) v.push_back(100 - i);
  CHECK(percentile(v, 0.95) == 95.0);
  CHECK_THROWS_AS(percentile({}, 0.5), Error);
}

TEST_CASE("metrics match the brute-force oracle on random masks") {
  SplitMix64 rng(1234);
  for (int trial = 0; trial < 30; ++trial) {
    const Dims d = fixture::random_dims(rng, 10);
    const Spacing s = fixture::random_spacing(rng);
    const Mask3 a = fixture::random_mask(rng, d, s);
    const Mask3 b = fixture::random_mask(rng, d, s);
    const MetricsReport r = evaluate(a, b, s);
    CHECK(r.dice == oracle::dice(a, b));
    const auto sa = oracle::surface(a), sb = oracle::surface(b);
    if (sa.empty() || sb.empty()) {
      CHECK_FALSE(r.hd95.has_value());
      continue;
    }
    const auto ab = oracle::directed(sa, sb, s), ba = oracle::directed(sb, sa, s);
    const double want_hd = std::max(oracle::percentile(ab, 0.95), oracle::percentile(ba, 0.95));
    double sum = 0.0;
    for (double v : ab) sum += v;
    for (double v : ba) sum += v;
    const double want_assd = sum / static_cast<double>(ab.size() + ba.size());
    REQUIRE(r.hd95.has_value());
    CHECK(std::abs(*r.hd95 - want_hd) <= 1e-12);
    CHECK(std::abs(*r.assd - want_assd) <= 1e-12);
  }
}

TEST_CASE("distance transform is thread-count independent") {
  SplitMix64 rng(77);
  const Mask3 a = fixture::random_mask(rng, {20, 20, 20}, {1, 1, 1});
  const Mask3 b = fixture::random_mask(rng, {20, 20, 20}, {1, 1, 1});
  if (a.count() == 0 || b.count() == 0) return;
  set_thread_count(1);
  const auto one = surface_distances(a, b, {1.5, 1, 0.7});
  set_thread_count(4);
  const auto four = surface_distances(a, b, {1.5, 1, 0.7});
  set_thread_count(0);
  CHECK(one.a_to_b == four.a_to_b);
  CHECK(one.b_to_a == four.b_to_a);
}
