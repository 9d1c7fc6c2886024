#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "voxelgraph/graph.hpp"
#include "voxelgraph/parallel.hpp"

using namespace voxelgraph;

namespace {

Selection phantom_like_selection() {
  // Two bright cubes plus an uncertain slab in a 12 x 12 x 12 volume.
  std::vector<double> p(12 * 12 * 12, 0.02);
  const auto at = [](int z, int y, int x) { return (z * 12 + y) * 12 + x; };
  for (int z = 2; z < 5; ++z)
    for (int y = 2; y < 5; ++y)
      for (int x = 2; x < 5; ++x) p[at(z, y, x)] = 0.97;
  for (int z = 7; z < 10; ++z)
    for (int y = 7; y < 10; ++y)
      for (int x = 7; x < 10; ++x) p[at(z, y, x)] = 0.97;
  for (int y = 0; y < 12; ++y) p[at(6, y, 1)] = 0.6;
  return select_nodes(Volume3({12, 12, 12}, {1, 1, 1}, DType::float64, std::move(p)), {});
}

}  // namespace

TEST_CASE("csr multiply and dense products") {
  const std::vector<Edge> path{{0, 1, EdgeSource::neighborhood}, {1, 2, EdgeSource::neighborhood}};
  const SparseGraph g = normalize_adjacency(path, 3);
  DenseMatrix x(3, 2);
  for (std::size_t i = 0; i < 6; ++i) x.data[i] = static_cast<double>(i + 1);
  const DenseMatrix y = g.normalized.multiply(x);
  const auto want = oracle::multiply(oracle::normalized_adjacency({{0, 1}, {1, 2}}, 3),
                                     oracle::to_dense(x));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(y(i, j) == doctest::Approx(want[i][j]).epsilon(1e-14));

  DenseMatrix a(2, 3), b(3, 2);
  for (std::size_t i = 0; i < 6; ++i) {
    a.data[i] = static_cast<double>(i) - 2.0;
    b.data[i] = 0.5 * static_cast<double>(i);
  }
  const auto ab = matmul(a, b);
  const auto ab_want = oracle::multiply(oracle::to_dense(a), oracle::to_dense(b));
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(ab(i, j) == ab_want[i][j]);
  const auto atb = matmul_tn(b, b);  // 2 x 2
  const auto abt = matmul_nt(a, a);  // 2 x 2
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      double s1 = 0, s2 = 0;
      for (std::size_t k = 0; k < 3; ++k) {
        s1 += b(k, i) * b(k, j);
        s2 += a(i, k) * a(j, k);
      }
      CHECK(atb(i, j) == s1);
      CHECK(abt(i, j) == s2);
    }
  }
}

TEST_CASE("normalized adjacency on small graphs") {
  const SparseGraph one = normalize_adjacency({}, 1);
  CHECK(one.normalized.at(0, 0) == 1.0);

  const std::vector<Edge> pair{{0, 1, EdgeSource::neighborhood}};
  const SparseGraph two = normalize_adjacency(pair, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(two.normalized.at(i, j) == 0.5);

  const std::vector<Edge> path{{0, 1, EdgeSource::neighborhood}, {1, 2, EdgeSource::neighborhood}};
  const SparseGraph three = normalize_adjacency(path, 3);
  CHECK(std::abs(three.normalized.at(0, 0) - 1.0 / 2.0) < 1e-15);
  CHECK(std::abs(three.normalized.at(1, 1) - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(three.normalized.at(0, 1) - 1.0 / std::sqrt(6.0)) < 1e-15);
  CHECK(three.normalized.at(0, 2) == 0.0);
  CHECK(three.augmented_degree == std::vector<double>{2, 3, 2});
}

TEST_CASE("normalization rejects bad edges") {
  const std::vector<Edge> loop{{1, 1, EdgeSource::neighborhood}};
  CHECK_THROWS_AS(normalize_adjacency(loop, 3), Error);
  const std::vector<Edge> out_of_range{{0, 5, EdgeSource::neighborhood}};
  CHECK_THROWS_AS(normalize_adjacency(out_of_range, 3), Error);
}

TEST_CASE("normalized matrix is symmetric with spectrum in [-1, 1]") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    const auto edges = fixture::random_edges(rng, n, 0.2);
    const SparseGraph g = normalize_adjacency(edges, n);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = g.normalized.row_ptr[i]; k < g.normalized.row_ptr[i + 1]; ++k) {
        const std::size_t j = g.normalized.cols[k];
        CHECK(g.normalized.at(j, i) == g.normalized.values[k]);
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g.normalized.values[k];
      }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    CHECK(es.eigenvalues().minCoeff() >= -1.0 - 1e-10);
    CHECK(es.eigenvalues().maxCoeff() <= 1.0 + 1e-10);
  }
}

TEST_CASE("partition follows components of e_b") {
  const Selection s = phantom_like_selection();
  const PartAssignment parts = partition_parts(s.e_b, s.nodes, Connectivity::full26);
  CHECK(parts.count == 3);  // two cubes and the slab, which is above beta
  std::set<std::int32_t> seen;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const bool in_e = s.e_b.test(s.nodes[i].voxel);
    CHECK((parts.part[i] != 0) == in_e);
    seen.insert(parts.part[i]);
  }
  CHECK(seen == std::set<std::int32_t>{0, 1, 2, 3});
}

TEST_CASE("edge list invariants") {
  const Selection s = phantom_like_selection();
  const PartAssignment parts = partition_parts(s.e_b, s.nodes, Connectivity::full26);
  EdgeConfig cfg;
  cfg.seed = 4;
  const EdgeList el = build_edges(s.nodes, parts, cfg);
  std::size_t counts[3] = {0, 0, 0};
  for (std::size_t k = 0; k < el.edges.size(); ++k) {
    const Edge& e = el.edges[k];
    CHECK(e.a < e.b);
    CHECK(e.b < s.nodes.size());
    if (k > 0) CHECK(std::pair{el.edges[k - 1].a, el.edges[k - 1].b} < std::pair{e.a, e.b});
    ++counts[static_cast<std::size_t>(e.source)];
  }
  for (std::size_t k = 0; k < 3; ++k) CHECK(counts[k] == el.by_source[k]);

  // Every face-adjacent node pair is a neighborhood edge.
  std::size_t adjacent = 0;
  const Dims d = s.nodes.dims();
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const Coord c = s.e_b.coord(s.nodes[i].voxel);
    for (const Coord& o : neighbor_offsets(Connectivity::face6)) {
      const Coord q{c.z + o.z, c.y + o.y, c.x + o.x};
      if (q.z < 0 || q.y < 0 || q.x < 0 || q.z >= d.nz || q.y >= d.ny || q.x >= d.nx) continue;
      const auto j = s.nodes.node_at(s.e_b.index(q));
      if (j != NodeSet::kNone && static_cast<std::size_t>(j) > i) ++adjacent;
    }
  }
  CHECK(el.count(EdgeSource::neighborhood) == adjacent);
}

TEST_CASE("global edges reach other parts") {
  const Selection s = phantom_like_selection();
  const PartAssignment parts = partition_parts(s.e_b, s.nodes, Connectivity::full26);
  EdgeConfig cfg;
  cfg.k_uncer = 0;
  cfg.seed = 1;
  const EdgeList el = build_edges(s.nodes, parts, cfg);
  // Every global partner of a node inside e_b lies in another part.
  std::vector<std::set<NodeId>> cross(s.nodes.size());
  for (const Edge& e : el.edges) {
    if (parts.part[e.a] != 0 && parts.part[e.b] != 0 && parts.part[e.a] != parts.part[e.b]) {
      cross[e.a].insert(e.b);
      cross[e.b].insert(e.a);
    }
  }
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    if (parts.part[i] != 0) CHECK(cross[i].size() >= 16);
  }
}

TEST_CASE("single part falls back to uniform draws; saturation is counted") {
  const NodeSet nodes = fixture::strip_nodes({Role::train_positive, Role::train_negative,
                                              Role::test, Role::train_negative});
  PartAssignment parts{{1, 0, 0, 0}, 1};
  EdgeConfig cfg;  // k_rand 16 > n - 1
  const EdgeList el = build_edges(nodes, parts, cfg);
  CHECK(el.edges.size() == 6);  // complete graph on 4 nodes
  CHECK(el.saturated_nodes == 5);  // 4 global draws + 1 uncertain draw fell short
}

TEST_CASE("uncertain edge modes") {
  const Selection s = phantom_like_selection();
  const PartAssignment parts = partition_parts(s.e_b, s.nodes, Connectivity::full26);
  EdgeConfig cfg;
  cfg.k_rand = 0;
  cfg.uncer_mode = UncertainMode::none;
  const EdgeList none = build_edges(s.nodes, parts, cfg);
  CHECK(none.count(EdgeSource::uncertain) == 0);
  CHECK(none.count(EdgeSource::global) == 0);

  cfg.uncer_mode = UncertainMode::to_certain;
  const EdgeList certain = build_edges(s.nodes, parts, cfg);
  for (const Edge& e : certain.edges) {
    if (e.source != EdgeSource::uncertain) continue;
    const bool a_test = s.nodes[e.a].role == Role::test;
    const bool b_test = s.nodes[e.b].role == Role::test;
    CHECK(a_test != b_test);
  }
  const std::size_t tests = s.nodes.count(Role::test);
  CHECK(certain.count(EdgeSource::uncertain) <= tests * cfg.k_uncer);
  CHECK(certain.count(EdgeSource::uncertain) > 0);

  cfg.uncer_mode = UncertainMode::to_random;
  const EdgeList random = build_edges(s.nodes, parts, cfg);
  CHECK(random.count(EdgeSource::uncertain) > 0);
  CHECK(uncertain_mode_from_string("to_certain") == UncertainMode::to_certain);
  CHECK_THROWS_AS(uncertain_mode_from_string("both"), Error);
}

TEST_CASE("edge construction is deterministic and thread-count independent") {
  const Selection s = phantom_like_selection();
  const PartAssignment parts = partition_parts(s.e_b, s.nodes, Connectivity::full26);
  EdgeConfig cfg;
  cfg.seed = 77;
  set_thread_count(1);
  const EdgeList a = build_edges(s.nodes, parts, cfg);
  set_thread_count(4);
  const EdgeList b = build_edges(s.nodes, parts, cfg);
  set_thread_count(0);
  CHECK(a.edges == b.edges);
  cfg.seed = 78;
  CHECK_FALSE(build_edges(s.nodes, parts, cfg).edges == a.edges);
}

TEST_CASE("features: z-scored ct and pet, raw prob and entropy") {
  const Dims d{1, 1, 4};
  const NodeSet nodes = fixture::strip_nodes({Role::train_positive, Role::train_negative,
                                              Role::test, Role::train_negative});
  const Volume3 ct(d, {1, 1, 1}, DType::float64, std::vector<double>{1, 2, 3, 4});
  const Volume3 pet(d, {1, 1, 1}, DType::float64, 5.0);
  const Volume3 prob(d, {1, 1, 1}, DType::float64, std::vector<double>{0.9, 0.1, 0.6, 0.0});
  const Volume3 ent = entropy_map(prob);
  const FeatureMatrix x = assemble_features(nodes, ct, pet, prob, ent);
  const double sd = std::sqrt(1.25);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(x(i, 0) == doctest::Approx((static_cast<double>(i) + 1 - 2.5) / sd).epsilon(1e-14));
    CHECK(x(i, 1) == 0.0);
    CHECK(x(i, 2) == prob[i]);
    CHECK(x(i, 3) == ent[i]);
  }
  Volume3 bad = ct;
  bad.set(2, std::nan(""));
  CHECK_THROWS_AS(assemble_features(nodes, bad, pet, prob, ent), Error);
}
