#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "dcw/graph.hpp"
#include "dcw/params.hpp"

using namespace dcw;

TEST_SUITE("graph") {

TEST_CASE("SplitMix64 known-answer sequence from seed 0") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.next() == 0x06C45D188009454FULL);
}

TEST_CASE("SplitMix64 doubles land in [0, 1)") {
  SplitMix64 rng(42);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    double u = rng.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // mean 1/2, sd of the mean ~ 1/sqrt(12 * 1e5) ~ 9.1e-4; allow 5 sigma
  CHECK(std::abs(sum / 100000.0 - 0.5) < 5e-3);
}

TEST_CASE("SplitMix64 bounded draws are in range and roughly uniform") {
  SplitMix64 rng(7);
  int counts[10] = {0};
  for (int i = 0; i < 100000; ++i) {
    std::uint64_t v = rng.next_below(10);
    REQUIRE(v < 10);
    ++counts[v];
  }
  for (int b = 0; b < 10; ++b) {
    CHECK(counts[b] > 9000);
    CHECK(counts[b] < 11000);
  }
}

TEST_CASE("seed derivation is deterministic and collision-free") {
  CHECK(derive_replica_seed(123, 5) == derive_replica_seed(123, 5));
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 1000; ++r) seen.insert(derive_replica_seed(99, r));
  CHECK(seen.size() == 1000);

  ReplicaPlan plan{20260823ULL, 8};
  CHECK(plan.stream(3, 1) == derive_replica_seed(20260823ULL, 3 * 8 + 1));
  CHECK(plan.stream(0, 0) != plan.stream(0, 1));
  CHECK(plan.stream(0, 0) != plan.stream(1, 0));
}

TEST_CASE("complete graph has every ordered pair including the diagonal") {
  GraphSample g = GraphSample::complete_with_self_loops(4);
  CHECK(g.size() == 4);
  CHECK(g.edge_count() == 16);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(g.has_edge(i, j));
  CHECK(g.row_mask(2) == 0xFULL);
  CHECK(g.col_mask(1) == 0xFULL);
}

TEST_CASE("from_edges builds exactly the listed edges") {
  GraphSample g = GraphSample::from_edges(3, {{0, 1}, {2, 2}, {1, 0}});
  CHECK(g.edge_count() == 3);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(2, 2));
  CHECK(g.has_edge(1, 0));
  CHECK(!g.has_edge(0, 0));
  CHECK(!g.has_edge(1, 2));
  CHECK(g.out_degree(0) == 1);
  CHECK(g.in_degree(0) == 1);
  CHECK(g.out_degree(2) == 1);
}

TEST_CASE("add_edge is idempotent") {
  GraphSample g(3);
  g.add_edge(1, 2);
  g.add_edge(1, 2);
  CHECK(g.edge_count() == 1);
  CHECK_THROWS_AS(g.add_edge(3, 0), std::out_of_range);
}

TEST_CASE("row and column masks are transposes of each other") {
  ModelParams params(12, 0.5, 0.4);
  GraphSample g = sample_graph(params, 555);
  long long degree_total = 0;
  for (int i = 0; i < 12; ++i) {
    degree_total += g.out_degree(i);
    for (int j = 0; j < 12; ++j) {
      CHECK(((g.row_mask(i) >> j) & 1ULL) == static_cast<std::uint64_t>(g.has_edge(i, j)));
      CHECK(((g.col_mask(j) >> i) & 1ULL) == static_cast<std::uint64_t>(g.has_edge(i, j)));
    }
  }
  CHECK(degree_total == g.edge_count());
}

TEST_CASE("text round trip preserves the graph") {
  ModelParams params(9, 0.5, 0.35);
  GraphSample g = sample_graph(params, 2024);
  std::ostringstream os;
  g.write_text(os);
  std::istringstream is(os.str());
  GraphSample back = GraphSample::read_text(is);
  CHECK(back == g);
  CHECK(back.edge_count() == g.edge_count());
}

TEST_CASE("read_text rejects malformed input") {
  std::istringstream dup("2 2\n0 1\n0 1\n");
  CHECK_THROWS_AS(GraphSample::read_text(dup), std::runtime_error);
  std::istringstream trunc("2 2\n0 1\n");
  CHECK_THROWS_AS(GraphSample::read_text(trunc), std::runtime_error);
}

TEST_CASE("sample_graph is seed-deterministic") {
  ModelParams params(40, 0.5, 0.25);
  GraphSample a = sample_graph(params, 17);
  GraphSample b = sample_graph(params, 17);
  GraphSample c = sample_graph(params, 18);
  CHECK(a == b);
  CHECK(!(a == c));
}

TEST_CASE("sample_graph at p=1 is the complete graph with self-loops") {
  ModelParams params(30, 0.5, 1.0);
  GraphSample g = sample_graph(params, 3);
  CHECK(g == GraphSample::complete_with_self_loops(30));
}

TEST_CASE("sampled edge count concentrates near N^2 p") {
  // Binomial(N^2, p): mean 12000, sd = sqrt(40000 * 0.3 * 0.7) ~ 91.7
  ModelParams params(200, 0.5, 0.3);
  GraphSample g = sample_graph(params, 91);
  double mean = 200.0 * 200.0 * 0.3;
  double sd = std::sqrt(200.0 * 200.0 * 0.3 * 0.7);
  CHECK(std::abs(static_cast<double>(g.edge_count()) - mean) < 4.0 * sd);
}

}  // TEST_SUITE
