// Copyright 2026 The lgcert Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <set>

#include "lgcert/io.hpp"
#include "lgcert/structures.hpp"

namespace lgcert {
namespace {

std::set<std::vector<Subset>> matchings(const CertificateStructure& c) {
  std::set<std::vector<Subset>> out;
  for (const auto& m : c.certificates()) out.insert(m.canonical());
  return out;
}

std::uint64_t factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

TEST(Subset, MaskLayout) {
  Subset s = Subset::of({1, 3});
  EXPECT_EQ(s.mask(), 0b101u);
  EXPECT_EQ(s.size(), 2);
  EXPECT_TRUE(s.contains(3));
  EXPECT_FALSE(s.contains(2));
  EXPECT_EQ(s.with(2).mask(), 0b111u);
  EXPECT_EQ(s.to_string(), "{1,3}");
  EXPECT_EQ(Subset::full(4).mask(), 15u);
  EXPECT_EQ(Subset::full(32).mask(), ~std::uint32_t{0});
  EXPECT_THROW(Subset::of({0}), ParameterError);
  EXPECT_THROW(Subset::of({33}), ParameterError);
}

TEST(Builders, KSubsetSmallest) {
  auto c = build_ksubset(2, 1);
  ASSERT_EQ(c.size(), 2);
  EXPECT_EQ(c[0].minimal_sets(), std::vector<Subset>{Subset::of({1})});
  EXPECT_EQ(c[1].minimal_sets(), std::vector<Subset>{Subset::of({2})});
}

TEST(Builders, TriangleFourVertices) {
  auto c = build_triangle(4);
  EXPECT_EQ(c.n(), 6);
  ASSERT_EQ(c.size(), 4);
  for (const auto& m : c.certificates()) {
    ASSERT_EQ(m.generator_count(), 1);
    EXPECT_EQ(m.minimal_sets()[0].size(), 3);
  }
}

TEST(Builders, TriangleEdgeIndexIsLexicographic) {
  TriangleEdges e(5);
  int expect = 1;
  for (int u = 1; u <= 5; ++u) {
    for (int v = u + 1; v <= 5; ++v) {
      EXPECT_EQ(e.index(u, v), expect);
      EXPECT_EQ(e.index(v, u), expect);
      EXPECT_EQ(e.endpoints(expect), std::make_pair(u, v));
      ++expect;
    }
  }
}

TEST(Builders, HiddenShiftTwo) {
  auto c = build_hidden_shift(2);
  ASSERT_EQ(c.size(), 2);
  EXPECT_EQ(c[0].canonical(), Certificate({Subset::of({1, 3}), Subset::of({2, 4})}).canonical());
  EXPECT_EQ(c[1].canonical(), Certificate({Subset::of({1, 4}), Subset::of({2, 3})}).canonical());
}

TEST(Builders, CollisionTwo) {
  auto c = build_collision(2);
  ASSERT_EQ(c.size(), 3);
  for (const auto& m : c.certificates()) EXPECT_EQ(m.generator_count(), 2);
}

TEST(Builders, CountsMatchClosedForms) {
  for (int n : {4, 5}) {
    EXPECT_EQ(build_ksubset(n, 2).size(), static_cast<int>(binomial(n, 2)));
    EXPECT_EQ(build_triangle(n).size(), static_cast<int>(binomial(n, 3)));
  }
  for (int n : {1, 2, 3}) {
    EXPECT_EQ(build_hidden_shift(n).size(), n);
    EXPECT_EQ(build_collision(n).size(),
              static_cast<int>(factorial(2 * n) / ((std::uint64_t{1} << n) * factorial(n))));
    EXPECT_EQ(build_set_equality(n).size(), static_cast<int>(factorial(n)));
  }
}

TEST(Builders, MatchingFamiliesNest) {
  for (int n : {2, 3}) {
    auto hs = matchings(build_hidden_shift(n));
    auto se = matchings(build_set_equality(n));
    auto co = matchings(build_collision(n));
    for (const auto& m : hs) EXPECT_TRUE(se.count(m)) << "n=" << n;
    for (const auto& m : se) EXPECT_TRUE(co.count(m)) << "n=" << n;
  }
}

TEST(Builders, InvalidParameters) {
  EXPECT_THROW(build_ksubset(3, 4), ParameterError);
  EXPECT_THROW(build_ksubset(0, 1), ParameterError);
  EXPECT_THROW(build_triangle(2), ParameterError);
  EXPECT_THROW(build_triangle(9), CapacityError);
  EXPECT_THROW(build_set_equality(6), CapacityError);
  EXPECT_THROW(build_named_structure(StructureKind::ksubset, {3}), ParameterError);
}

TEST(Builders, TriangleCapacityMessageNamesLattice) {
  try {
    build_triangle(20);
    FAIL();
  } catch (const CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("2^190"), std::string::npos);
  }
}

TEST(Certificate, RejectsComparableGenerators) {
  EXPECT_THROW(Certificate({Subset::of({1}), Subset::of({1, 2})}), InvariantError);
  EXPECT_THROW(Certificate(std::vector<Subset>{}), InvariantError);
}

TEST(Certificate, Membership) {
  auto tri = build_triangle(3);
  EXPECT_TRUE(contains(tri[0], Subset::full(3)));
  EXPECT_FALSE(contains(tri[0], Subset{}));
  auto ks = build_ksubset(4, 2);
  EXPECT_TRUE(contains(ks[0], Subset::of({1, 2, 3})));
  EXPECT_FALSE(contains(ks[0], Subset::of({1, 3, 4})));
}

TEST(Certificate, UpwardClosureExhaustive) {
  std::vector<CertificateStructure> all = {build_ksubset(6, 2), build_triangle(4), build_hidden_shift(3),
                                           build_collision(3), build_set_equality(3)};
  for (const auto& c : all) {
    ASSERT_LE(c.n(), 12);
    const std::uint32_t top = std::uint32_t{1} << c.n();
    for (const auto& m : c.certificates()) {
      for (std::uint32_t s = 0; s < top; ++s) {
        if (!m.contains(Subset::from_mask(s))) continue;
        for (int j = 1; j <= c.n(); ++j) {
          EXPECT_TRUE(m.contains(Subset::from_mask(s).with(j)));
        }
      }
    }
  }
}

TEST(MinimalProfile, BoundedGeneration) {
  auto p = minimal_profile(build_ksubset(5, 2));
  EXPECT_EQ(p.max_count, 1);
  ASSERT_TRUE(p.bounded_size);
  EXPECT_EQ(*p.bounded_size, 2);
  auto h = minimal_profile(build_hidden_shift(2));
  EXPECT_EQ(h.counts, (std::vector<int>{2, 2}));
  EXPECT_FALSE(h.bounded_size);
}

TEST(Lattice, ArcCounts) {
  auto one = lattice_arcs(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].source, Subset{});
  EXPECT_EQ(one[0].target, Subset::of({1}));
  for (int n = 1; n <= 10; ++n) {
    EXPECT_EQ(lattice_arcs(n).size(), static_cast<std::size_t>(n) << (n - 1));
  }
  EXPECT_THROW(lattice_arcs(kLatticeCap + 1), CapacityError);
}

TEST(Lattice, ArcIndexMatchesEnumeration) {
  for (int n = 1; n <= 8; ++n) {
    auto arcs = lattice_arcs(n);
    ArcIndex idx(n);
    ASSERT_EQ(idx.size(), arcs.size());
    for (std::size_t e = 0; e < arcs.size(); ++e) {
      EXPECT_EQ(idx(arcs[e]), e);
      EXPECT_EQ(arcs[e].target.mask() & ~arcs[e].source.mask(), Subset::bit(arcs[e].variable()));
    }
  }
}

TEST(Serialization, RoundTripAndStableHash) {
  for (const auto& c : {build_ksubset(4, 2), build_hidden_shift(3), build_triangle(4)}) {
    auto j = structure_to_json(c);
    auto back = structure_from_json(j);
    EXPECT_EQ(back.n(), c.n());
    EXPECT_EQ(back.kind(), c.kind());
    ASSERT_EQ(back.size(), c.size());
    for (int m = 0; m < c.size(); ++m) EXPECT_EQ(back[m].minimal_sets(), c[m].minimal_sets());
    EXPECT_EQ(structure_hash(back), structure_hash(c));
    EXPECT_EQ(structure_to_json(back).dump(), j.dump());
  }
  EXPECT_NE(structure_hash(build_ksubset(4, 2)), structure_hash(build_ksubset(4, 1)));
}

TEST(Serialization, FieldOrder) {
  auto j = structure_to_json(build_ksubset(2, 1));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"kind", "params", "n", "certificates"}));
}

}  // namespace
}  // namespace lgcert
