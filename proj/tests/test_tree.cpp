#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <map>
#include <sstream>
#include <vector>

#include "urt/errors.hpp"
#include "urt/statistics.hpp"
#include "urt/tree.hpp"

using namespace urt;
using V = std::vector<std::uint32_t>;

namespace {

V to_vec(std::span<const std::uint32_t> s) { return V(s.begin(), s.end()); }

RecursiveTree tampered(const RecursiveTree& t, V degree, V level) {
  return RecursiveTree::from_arrays(t.model(), t.seed(), to_vec(t.parents()), std::move(degree),
                                    std::move(level));
}

std::size_t count_kind(const std::vector<Diagnostic>& d, InvariantKind kind) {
  return std::count_if(d.begin(), d.end(), [&](const Diagnostic& x) { return x.kind == kind; });
}

}  // namespace

TEST_CASE("small uniform trees") {
  auto one = grow(GrowthModel::Uniform, 1, 7);
  CHECK(one.size() == 1);
  CHECK(to_vec(one.degrees()) == V{0});
  CHECK(to_vec(one.levels()) == V{0});
  CHECK(validate(one).empty());

  auto two = grow(GrowthModel::Uniform, 2, 7);
  CHECK(two.parent(1) == 0);
  CHECK(to_vec(two.degrees()) == V{1, 1});
  CHECK(to_vec(two.levels()) == V{0, 1});
}

TEST_CASE("node 2 of a three-node tree picks each parent half the time") {
  constexpr int kSeeds = 100000;
  int root = 0;
  for (int s = 0; s < kSeeds; ++s) root += grow(GrowthModel::Uniform, 3, s).parent(2) == 0;
  const double p = double(root) / kSeeds;
  const double se = std::sqrt(0.25 / kSeeds);
  CHECK(std::abs(p - 0.5) < 4 * se);
}

TEST_CASE("four-node attachment sequences are uniform") {
  constexpr int kReps = 100000;
  std::map<V, int> freq;
  for (int s = 0; s < kReps; ++s) ++freq[grow(GrowthModel::Uniform, 4, derive_seed(11, s)).attachment_sequence()];
  REQUIRE(freq.size() == 6);
  double chi2 = 0;
  const double expected = kReps / 6.0;
  for (auto& [seq, c] : freq) chi2 += (c - expected) * (c - expected) / expected;
  // chi-square(5) upper 1e-6 quantile
  CHECK(chi2 < 35.89);
}

TEST_CASE("below-minimum sizes are rejected") {
  CHECK_THROWS_AS(grow(GrowthModel::Uniform, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(grow(GrowthModel::Preferential, 1, 1), std::invalid_argument);
  CHECK(grow(GrowthModel::Preferential, 2, 1).parent(1) == 0);
}

TEST_CASE("trees from explicit sequences") {
  auto a = grow_from_sequence(V{0});
  CHECK(a.size() == 2);
  CHECK(to_vec(a.degrees()) == V{1, 1});
  CHECK_FALSE(a.seed().has_value());

  auto star = grow_from_sequence(V{0, 0, 0});
  CHECK(to_vec(star.degrees()) == V{3, 1, 1, 1});

  auto path = grow_from_sequence(V{0, 1, 2});
  CHECK(to_vec(path.levels()) == V{0, 1, 2, 3});

  CHECK_THROWS_AS(grow_from_sequence(V{1}), std::invalid_argument);
  CHECK_THROWS_AS(grow_from_sequence(V{0, 0, 3}), std::invalid_argument);
}

TEST_CASE("validate reports each broken invariant once") {
  auto star = grow_from_sequence(V{0, 0, 0});
  CHECK(validate(star).empty());

  auto bad_level = tampered(star, to_vec(star.degrees()), V{0, 1, 5, 1});
  auto d = validate(bad_level);
  REQUIRE(d.size() == 1);
  CHECK(d[0].kind == InvariantKind::LevelConsistency);

  auto bad_sum = tampered(star, V{4, 1, 1, 1}, to_vec(star.levels()));
  d = validate(bad_sum);
  CHECK(count_kind(d, InvariantKind::Handshake) == 1);
  CHECK(count_kind(d, InvariantKind::LevelConsistency) == 0);

  auto swapped_degrees = tampered(grow_from_sequence(V{0, 1}), V{2, 1, 1}, V{0, 1, 2});
  CHECK(count_kind(validate(swapped_degrees), InvariantKind::ChildCount) == 1);

  auto out_of_order = RecursiveTree::from_arrays(GrowthModel::Uniform, std::nullopt,
                                                 V{kNoParent, 2, 0}, V{1, 1, 2}, V{0, 2, 1});
  d = validate(out_of_order);
  REQUIRE(d.size() == 1);
  CHECK(d[0].kind == InvariantKind::ParentOrder);

  auto short_arrays = RecursiveTree::from_arrays(GrowthModel::Uniform, std::nullopt,
                                                 V{kNoParent, 0}, V{1}, V{0, 1});
  d = validate(short_arrays);
  REQUIRE(d.size() == 1);
  CHECK(d[0].kind == InvariantKind::ArrayShape);
}

TEST_CASE("grown trees are valid") {
  Xoshiro256pp rng(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const auto n = static_cast<std::uint32_t>(1 + uniform_below(rng, 10000));
    const auto seed = rng();
    auto t = grow(GrowthModel::Uniform, n, seed);
    REQUIRE(t.size() == n);
    CHECK(validate(t).empty());
    if (n >= 2) CHECK(validate(grow(GrowthModel::Preferential, n, seed)).empty());
  }
}

TEST_CASE("growth is deterministic in its seed") {
  for (auto model : {GrowthModel::Uniform, GrowthModel::Preferential}) {
    auto a = grow(model, 5000, 77);
    auto b = grow(model, 5000, 77, grow(model, 10, 1));
    CHECK(a == b);
    CHECK(a.seed() == std::optional<std::uint64_t>(77));
    CHECK(a.attachment_sequence() != grow(model, 5000, 78).attachment_sequence());
  }
}

TEST_CASE("endpoint list holds both ends of every edge") {
  TreeGrower g(GrowthModel::Preferential, 5);
  CHECK(g.endpoint_list_size() == 2 * g.edge_count());
  for (int i = 0; i < 2000; ++i) {
    g.step();
    REQUIRE(g.endpoint_list_size() == 2 * g.edge_count());
  }
  CHECK(g.node_count() == 2002);
}

TEST_CASE("preferential node 2 picks each endpoint half the time") {
  constexpr int kSeeds = 100000;
  int root = 0;
  for (int s = 0; s < kSeeds; ++s) root += grow(GrowthModel::Preferential, 3, s).parent(2) == 0;
  CHECK(std::abs(double(root) / kSeeds - 0.5) < 4 * std::sqrt(0.25 / kSeeds));

  // Node 3 attaches to the degree-2 node of a path with probability 1/2.
  int centre = 0, total = 0;
  for (int s = 0; s < kSeeds; ++s) {
    auto t = grow(GrowthModel::Preferential, 4, s);
    const auto hub = t.parent(2);  // 0 or 1, now of degree 2
    centre += t.parent(3) == hub;
    ++total;
  }
  CHECK(std::abs(double(centre) / total - 0.5) < 4 * std::sqrt(0.25 / total));
}

TEST_CASE("first-level fast path matches full growth") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const std::uint32_t n = 1 + static_cast<std::uint32_t>(s * 397 % 5000);
    auto t = grow(GrowthModel::Uniform, n, s);
    V expected;
    for (std::uint32_t i = 1; i < n; ++i)
      if (t.parent(i) == 0) expected.push_back(t.degree(i));
    CHECK(grow_first_level(n, s) == expected);
  }
}

TEST_CASE("binary dump round trip") {
  for (auto model : {GrowthModel::Uniform, GrowthModel::Preferential}) {
    for (std::uint32_t n : {2u, 3u, 100u, 4097u}) {
      auto t = grow(model, n, n * 31);
      std::stringstream buf;
      write_binary(buf, t);
      CHECK(buf.str().size() == 4 + 8 + 1 + 8 + 4 * (n - 1));
      CHECK(read_binary(buf) == t);
    }
  }
  auto det = grow_from_sequence(V{0, 1, 1});
  std::stringstream buf;
  write_binary(buf, det);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "URT1");
  CHECK(static_cast<unsigned char>(bytes[12]) == 0x80);
  auto back = read_binary(buf);
  CHECK(back == det);
  CHECK_FALSE(back.seed().has_value());
}

TEST_CASE("malformed dumps are rejected") {
  std::stringstream bad_magic("URT2xxxxxxxxxxxxxxxxxxxxx");
  CHECK_THROWS_AS(read_binary(bad_magic), FormatError);

  std::stringstream buf;
  write_binary(buf, grow(GrowthModel::Uniform, 50, 3));
  std::string s = buf.str();
  std::stringstream cut(s.substr(0, s.size() - 3));
  CHECK_THROWS_AS(read_binary(cut), FormatError);

  std::stringstream full;
  write_binary(full, grow_from_sequence(V{0, 1}));
  std::string bytes = full.str();
  bytes[bytes.size() - 4] = 7;  // node 2 attached to node 7
  std::stringstream forward(bytes);
  CHECK_THROWS_AS(read_binary(forward), FormatError);
}

TEST_CASE("model names") {
  CHECK(parse_growth_model("uniform") == GrowthModel::Uniform);
  CHECK(parse_growth_model("port") == GrowthModel::Preferential);
  CHECK(to_string(GrowthModel::Preferential) == "preferential");
  CHECK_THROWS_AS(parse_growth_model("ba"), std::invalid_argument);
}
