#include <doctest.h>

#include <nlohmann/json.hpp>

#include "motiq/motif.hpp"
#include "support.hpp"

using namespace motiq;

TEST_CASE("append forms a two-child tuple with concatenated flattening") {
  Motif a = qconv(1), b = qpool(0, FilterSpec{"right"});
  Motif c = append(a, b);
  CHECK(!c.is_primitive());
  CHECK(c.children().size() == 2);
  CHECK(c.level() == 2);
  auto seq = c.flatten();
  REQUIRE(seq.size() == 2);
  CHECK(seq[0].kind == PrimitiveKind::Qconv);
  CHECK(seq[1].kind == PrimitiveKind::Qpool);
}

TEST_CASE("flattening of composed motifs equals concatenation of parts") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    Motif a = test::random_motif(rng, 3);
    Motif b = test::random_motif(rng, 3);
    Motif c = test::random_motif(rng, 3);
    auto expected = a.flatten();
    for (const auto& p : b.flatten()) expected.push_back(p);
    for (const auto& p : c.flatten()) expected.push_back(p);
    CHECK(append(append(a, b), c).flatten() == expected);
    CHECK(append(a, append(b, c)).flatten() == expected);
  }
}

TEST_CASE("repeat") {
  Motif m = qconv(2) + qpool(1, FilterSpec{"odd"});
  Motif r = repeat(m, 3);
  REQUIRE(r.children().size() == 3);
  for (const auto& c : r.children()) CHECK(c == m);
  auto seq = r.flatten();
  CHECK(seq.size() == 3 * m.flatten().size());

  Motif once = repeat(m, 1);
  CHECK(once.children().size() == 1);
  CHECK(once.flatten() == m.flatten());

  CHECK_THROWS_AS(repeat(m, 0), ConfigError);
}

TEST_CASE("repeat flattening length property") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    Motif m = test::random_motif(rng, 4);
    const size_t base = m.flatten().size();
    for (int k = 1; k <= 5; ++k) CHECK(repeat(m, k).flatten().size() == k * base);
  }
}

TEST_CASE("the reverse binary tree flattens to seven primitives at eight qubits") {
  Motif tree = qfree(8) + (qconv(1) + qpool(0, FilterSpec{"right"})) * 3;
  auto seq = tree.flatten();
  REQUIRE(seq.size() == 7);
  CHECK(seq[0].kind == PrimitiveKind::Qfree);
  CHECK(seq[0].params.free_count == 8);
  for (int unit = 0; unit < 3; ++unit) {
    CHECK(seq[1 + 2 * unit].kind == PrimitiveKind::Qconv);
    CHECK(seq[2 + 2 * unit].kind == PrimitiveKind::Qpool);
  }
}

TEST_CASE("nesting shape does not change the flattening") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 1000; ++trial) {
    Motif a = test::random_motif(rng, 2);
    Motif b = test::random_motif(rng, 2);
    Motif c = test::random_motif(rng, 2);
    CHECK(append(append(a, b), c).flatten() == append(a, append(b, c)).flatten());
  }
}

TEST_CASE("levels") {
  Motif p = qdense();
  CHECK(p.level() == 1);
  Motif l2 = p + qconv(1);
  CHECK(l2.level() == 2);
  Motif l3 = l2 + p;  // max child level 2
  CHECK(l3.level() == 3);
  Motif deep = repeat(l3, 2);
  CHECK(deep.level() == 4);
}

TEST_CASE("composites need children and composition is non-destructive") {
  CHECK_THROWS_AS(Motif::make_composite({}), ConfigError);
  Motif a = qconv(3);
  Motif b = a + a;
  CHECK(a.is_primitive());  // untouched by composition
  CHECK(b.children()[0] == a);
}

TEST_CASE("json round trip is lossless") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 1000; ++trial) {
    Motif m = test::random_motif(rng, 4);
    CHECK(Motif::from_json(m.to_json()) == m);
  }

  // explicit label sets, edge order and open boundaries survive too
  Hyperparams h;
  h.stride = 2;
  h.boundary = Boundary::Open;
  h.qpu = 3;
  h.edge_order = std::vector<int>{2, 1, 3};
  h.mapping = "u_gm3";
  Motif odd = qfree({2, 5, 9}) + qconv(h) + qpool(1, FilterSpec{"0110"});
  CHECK(Motif::from_json(odd.to_json()) == odd);
}

TEST_CASE("json matches the documented field layout") {
  auto j = nlohmann::json::parse(
      R"({"kind":"qconv","stride":1,"step":1,"offset":0,"qpu":2,"boundary":"periodic","mapping":"u_ttn"})");
  Motif m = Motif::from_json(j);
  CHECK(m == qconv(1));
  CHECK(m.to_json() == j);

  auto comp = nlohmann::json::parse(R"({"seq":[{"kind":"qfree","n":4},{"kind":"qdense",
      "step":1,"offset":0,"qpu":2,"boundary":"periodic","mapping":"u_ttn"}]})");
  CHECK(Motif::from_json(comp) == qfree(4) + qdense());
}

TEST_CASE("invalid primitives are rejected") {
  CHECK_THROWS_AS(qconv(-1), ConfigError);
  Hyperparams h;
  h.step = 0;
  CHECK_THROWS_AS(qconv(h), ConfigError);
  CHECK_THROWS_AS(qpool(0, FilterSpec{"bogus"}), ConfigError);
  CHECK_THROWS_AS(qfree(-2), ConfigError);
  CHECK_THROWS_AS(kind_from_string("qmagic"), ConfigError);
}
