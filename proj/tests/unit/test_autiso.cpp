#include <doctest.h>

#include <set>

#include "../oracles.hpp"
#include "schurpower/autiso.hpp"
#include "schurpower/sring.hpp"
#include "schurpower/verify.hpp"

using namespace schurpower;

namespace {

Partition from(const std::vector<std::uint32_t>& l) { return Partition::from_labels(l); }

std::vector<std::string> order_le(std::size_t cap) {
  std::vector<std::string> out;
  for (const char* name : {"Z1", "Z2", "Z3", "Z4", "Z2^2", "Z5", "Z6", "S3", "Z7", "Z8", "Z2xZ4", "Z2^3", "D8",
                           "Q8", "Z9", "Z3^2", "Z10", "D10", "Z12", "Z2xZ6", "D12", "Z3xS3", "Z16", "Z4^2",
                           "Z2^4", "D16", "Z2xD8", "Z2xQ8"})
    if (group_by_name(name).order() <= cap) out.push_back(name);
  return out;
}

}  // namespace

TEST_CASE("automorphism group orders") {
  CHECK(automorphism_group(monochrome(cyclic_group(2))).order() == 1);
  CHECK(automorphism_group(monochrome(group_by_name("Z2^2"))).order() == 6);
  CHECK(automorphism_group(monochrome(symmetric_group(3))).order() == 6);
  for (const auto& name : order_le(8)) {
    auto G = group_by_name(name);
    std::vector<std::uint32_t> mono(G.order(), 0);
    auto brute = oracle::brute_automorphisms(G.table(), mono);
    auto A = automorphism_group(monochrome(G));
    CAPTURE(name);
    CHECK(A.order() == brute.size());
    std::set<Perm> got(A.elements.begin(), A.elements.end()), want(brute.begin(), brute.end());
    CHECK(got == want);
    auto CG = individualize(monochrome(G), G.order() - 1);
    CHECK(automorphism_group(CG).order() == oracle::brute_automorphisms(G.table(), CG.coloring).size());
  }
}

TEST_CASE("permutation groups from generators") {
  Perm r{1, 2, 3, 0}, s{0, 3, 2, 1};
  auto D = permutation_group_from_generators(4, {r, s});
  CHECK(D.order() == 8);
  CHECK(D.elements[0] == Perm{0, 1, 2, 3});
  CHECK_THROWS_AS(permutation_group_from_generators(4, {r, s}, 5), BudgetExceeded);
}

TEST_CASE("cyc_m examples and orbit oracle") {
  CHECK(cyc_m(cyclic_group(2), 1).rank() == 2);
  CHECK(cyc_m(cyclic_group(4), 1).partition() == from({0, 1, 2, 1}));
  auto S3 = symmetric_group(3);
  auto c = cyc_m(S3, 1);
  CHECK(c.rank() == 3);
  for (Element a = 1; a < 6; ++a)
    for (Element b = 1; b < 6; ++b)
      CHECK((c.class_of(a) == c.class_of(b)) == (S3.element_order(a) == S3.element_order(b)));
  for (const auto& name : order_le(8)) {
    auto G = group_by_name(name);
    auto T = G.table();
    auto auts = oracle::brute_automorphisms(T, std::vector<std::uint32_t>(G.order(), 0));
    for (std::size_t m : {1, 2}) {
      auto C = cyc_m(G, m);
      CAPTURE(name);
      CHECK(C.partition().labels() == oracle::orbit_labels(T, m, auts));
      CHECK(verify_axioms(C.carrier(), C.partition()).ok());
    }
  }
}

TEST_CASE("hol_m orders") {
  auto order_of = [](const FiniteGroup& G, std::size_t m) {
    auto h = hol_m_generators(G, m);
    CHECK(h.order_ok);
    auto P = permutation_group_from_generators(power(G, m)->size(), h.generators);
    CHECK(P.order() == h.expected_order);
    return P.order();
  };
  CHECK(order_of(cyclic_group(2), 1) == 2);
  CHECK(order_of(cyclic_group(4), 1) == 8);
  CHECK(order_of(cyclic_group(3), 2) == 18);
  CHECK(order_of(group_by_name("Z2^2"), 1) == 24);
  CHECK(order_of(symmetric_group(3), 1) == 36);
}

TEST_CASE("is_sring_automorphism") {
  auto A = compute_Am(cyclic_group(4), 2);
  const auto& ctx = A.carrier();
  Perm id(ctx.size());
  for (Code x = 0; x < ctx.size(); ++x) id[x] = x;
  CHECK(is_sring_automorphism(id, A));
  for (Code y = 0; y < ctx.size(); ++y) {
    Perm r(ctx.size());
    for (Code x = 0; x < ctx.size(); ++x) r[x] = ctx.mul(x, y);
    CHECK(is_sring_automorphism(r, A));
  }
  auto c = power(cyclic_group(5), 1);
  SRing ZG(c, Partition::discrete(5));
  CHECK(!is_sring_automorphism(Perm{0, 2, 1, 3, 4}, ZG));
  // hol_2 generators preserve A_2
  for (const char* name : {"Z3", "Z4", "Z2^2", "S3", "Q8", "D8"}) {
    auto G = group_by_name(name);
    auto B = compute_Am(G, 2);
    for (const auto& g : hol_m_generators(G, 2).generators) CHECK(is_sring_automorphism(g, B));
  }
}

TEST_CASE("combinatorial isomorphism search") {
  auto A = compute_Am(cyclic_group(4), 2);
  auto f = combinatorial_iso_search(A, A);
  REQUIRE(f);
  auto cls = verify_combinatorial_iso(A, A, *f);
  REQUIRE(cls);
  CHECK(verify_algebraic_iso(A, A, *cls));

  auto Z4 = compute_Am(cyclic_group(4), 3), V4 = compute_Am(group_by_name("Z2^2"), 3);
  SearchStats st;
  CHECK(!combinatorial_iso_search(Z4, V4, true, {}, &st));

  for (const char* pair : {"Z4", "Z6"}) {
    auto G = group_by_name(pair);
    auto H = group_by_name(std::string(pair) == "Z4" ? "Z2^2" : "S3");
    auto cg = power(G, 1), ch = power(H, 1);
    SRing TG(cg, tensor_power_partition(*cg)), TH(ch, tensor_power_partition(*ch));
    auto g = combinatorial_iso_search(TG, TH);
    REQUIRE(g);
    CHECK(verify_combinatorial_iso(TG, TH, *g));
  }
  for (const char* name : {"Z2", "Z3", "Z4", "Z2^2", "S3"}) {
    auto B = compute_Am(group_by_name(name), 2);
    auto w = combinatorial_iso_search(B, B);
    REQUIRE(w);
    auto m = verify_combinatorial_iso(B, B, *w);
    REQUIRE(m);
    CHECK(verify_algebraic_iso(B, B, *m));  // combinatorial implies algebraic
  }
}

TEST_CASE("algebraic isomorphism search") {
  auto A = compute_Am(group_by_name("S3"), 2);
  auto id = algebraic_iso_search(A, A);
  REQUIRE(id);
  for (ClassId c = 0; c < A.rank(); ++c) CHECK(verify_algebraic_iso(A, A, id->map));

  auto Z4 = compute_Am(cyclic_group(4), 2), V4 = compute_Am(group_by_name("Z2^2"), 2);
  auto r = algebraic_iso_search(Z4, V4);
  if (r) CHECK(verify_algebraic_iso(Z4, V4, r->map));
  MESSAGE("algebraic iso A_2(Z4) -> A_2(Z2^2): " << (r ? "found" : "none"));

  CHECK(!algebraic_iso_search(cyc_m(cyclic_group(4), 1), cyc_m(group_by_name("Z2^2"), 1)));
  // a wrong class map is rejected
  std::vector<ClassId> swap(A.rank());
  for (ClassId c = 0; c < A.rank(); ++c) swap[c] = c;
  std::swap(swap[0], swap[1]);
  CHECK(!verify_algebraic_iso(A, A, swap));
}

TEST_CASE("colored group isomorphism examples") {
  auto Z4 = monochrome(cyclic_group(4)), V4 = monochrome(group_by_name("Z2^2"));
  for (auto o : {IsoOracle::direct, IsoOracle::via_aut, IsoOracle::via_cyc1}) {
    auto f = iso_colored_groups(Z4, Z4, o);
    REQUIRE(f);
    CHECK(is_colored_group_iso(Z4, Z4, *f));
    CHECK(!iso_colored_groups(Z4, V4, o));
    auto gen = individualize_with(Z4, 1, 1), inv = individualize_with(Z4, 2, 1);
    CHECK(!iso_colored_groups(gen, inv, o));
  }
}

TEST_CASE("the three oracles agree with each other and with brute force") {
  auto names = order_le(16);
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i; j < names.size(); ++j) {
      auto A = group_by_name(names[i]), B = group_by_name(names[j]);
      if (A.order() != B.order()) continue;
      std::vector<std::pair<ColoredGroup, ColoredGroup>> inputs{{monochrome(A), monochrome(B)}};
      if (A.order() <= 8)
        for (Element x = 1; x < A.order(); ++x)
          for (Element y = 1; y < B.order(); ++y)
            inputs.push_back({individualize_with(monochrome(A), x, 1), individualize_with(monochrome(B), y, 1)});
      for (const auto& [a, b] : inputs) {
        CAPTURE(names[i]);
        CAPTURE(names[j]);
        auto d = iso_colored_groups(a, b, IsoOracle::direct);
        auto v = iso_colored_groups(a, b, IsoOracle::via_aut);
        auto c = iso_colored_groups(a, b, IsoOracle::via_cyc1);
        CHECK(bool(d) == bool(v));
        CHECK(bool(d) == bool(c));
        for (const auto* w : {&d, &v, &c})
          if (*w) {
            CHECK(is_colored_group_iso(a, b, **w));
            for (Element g = 0; g < a.group.order(); ++g) CHECK(a.coloring[g] == b.coloring[(**w)[g]]);
          }
        if (A.order() <= 7 || (A.order() == 8 && a.num_colors() == 1))
          CHECK(bool(d) == !oracle::brute_isomorphisms(A.table(), a.coloring, B.table(), b.coloring).empty());
      }
    }
}
