#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "../oracles.hpp"
#include "schurpower/groups.hpp"
#include "schurpower/verify.hpp"

using namespace schurpower;

namespace {

std::vector<FiniteGroup> zoo() {
  std::vector<FiniteGroup> out;
  for (const auto& g : default_grid()) out.push_back(g.group);
  for (const char* name : {"Z1", "Z7", "Z8", "D10", "D12", "Z2xZ6", "Z3^2", "S4", "Z4xZ4", "Z2xQ8"})
    out.push_back(group_by_name(name));
  return out;
}

std::size_t brute_min_generators(const FiniteGroup& G) {
  const std::size_t n = G.order();
  if (n == 1) return 0;
  auto closure_size = [&](std::vector<Element> gens) {
    std::set<Element> s{0};
    std::vector<Element> frontier{0};
    while (!frontier.empty()) {
      auto x = frontier.back();
      frontier.pop_back();
      for (auto g : gens)
        if (s.insert(G.mul(x, g)).second) frontier.push_back(G.mul(x, g));
    }
    return s.size();
  };
  for (std::size_t d = 1;; ++d) {
    std::vector<Element> pick(d, 0);
    // all d-tuples of elements; n and d are small in the tests
    std::function<bool(std::size_t)> rec = [&](std::size_t i) {
      if (i == d) return closure_size(pick) == n;
      for (Element a = 0; a < n; ++a) {
        pick[i] = a;
        if (rec(i + 1)) return true;
      }
      return false;
    };
    if (rec(0)) return d;
  }
}

}  // namespace

TEST_CASE("make_group examples") {
  auto T = make_group(GroupFamily::cyclic, {1});
  CHECK(T.order() == 1);
  auto Z4 = make_group(GroupFamily::cyclic, {4});
  CHECK(Z4.mul(1, 1) == 2);
  CHECK(Z4.mul(1, 3) == 0);
  auto S3 = make_group(GroupFamily::symmetric, {3});
  CHECK(S3.order() == 6);
  std::size_t invol = 0;
  for (Element a = 0; a < 6; ++a) invol += S3.element_order(a) == 2;
  CHECK(invol == 3);
  CHECK(make_group(GroupFamily::quaternion8, {}).order() == 8);
  CHECK(make_group(GroupFamily::elementary_abelian, {2, 3}).order() == 8);
  CHECK(make_group(GroupFamily::dihedral, {8}).order() == 8);
}

TEST_CASE("group axioms hold exhaustively for every constructed group") {
  for (const auto& G : zoo()) {
    const std::size_t n = G.order();
    for (Element a = 0; a < n; ++a) {
      CHECK(G.mul(0, a) == a);
      CHECK(G.mul(a, G.inv(a)) == 0);
      for (Element b = 0; b < n; ++b)
        for (Element c = 0; c < n; ++c) REQUIRE(G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c)));
    }
  }
}

TEST_CASE("from_table rejects broken tables with the violated invariant") {
  CHECK_THROWS_AS(FiniteGroup::from_table({{0, 1}, {1, 1}}), InvalidInput);
  CHECK_THROWS_AS(FiniteGroup::from_table({{1, 0}, {0, 1}}), InvalidInput);  // identity not 0
  CHECK_THROWS_AS(FiniteGroup::from_table({{0, 1, 2}, {1, 2}, {2, 0, 1}}), InvalidInput);
  // a Latin square that is not associative
  std::vector<std::vector<Element>> q = {
      {0, 1, 2, 3, 4}, {1, 0, 3, 4, 2}, {2, 4, 0, 1, 3}, {3, 2, 4, 0, 1}, {4, 3, 1, 2, 0}};
  try {
    FiniteGroup::from_table(q);
    FAIL("accepted a non-associative loop");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("assoc") != std::string::npos);
  }
  CHECK_THROWS_AS(group_by_name("Z0x"), InvalidInput);
  CHECK_THROWS_AS(group_by_name("Foo"), InvalidInput);
}

TEST_CASE("group_by_name and direct products") {
  auto G = group_by_name("Z2xZ3");
  CHECK(G.order() == 6);
  CHECK(is_cyclic(G));
  CHECK(!is_cyclic(group_by_name("Z2^2")));
  CHECK(group_by_name("E2^3").order() == 8);
  // factor 0 is the least significant digit
  auto P = direct_product({cyclic_group(2), cyclic_group(3)});
  CHECK(P.mul(1, 2) == 3);  // (1,0)+(0,1)
}

TEST_CASE("power codec and componentwise product") {
  auto c = power(cyclic_group(2), 3);
  CHECK(c->size() == 8);
  std::vector<Element> t{1, 0, 1};
  CHECK(c->encode(t) == 5);
  auto z3 = power(cyclic_group(3), 2);
  CHECK(z3->size() == 9);
  std::vector<Element> a{1, 2}, b{2, 2}, r{0, 1};
  CHECK(z3->mul(z3->encode(a), z3->encode(b)) == z3->encode(r));
  CHECK(power(symmetric_group(3), 3)->size() == 216);

  auto s = power(symmetric_group(3), 3);
  std::mt19937 rng(7);
  for (int i = 0; i < 1000; ++i) {
    Code x = rng() % s->size();
    CHECK(s->encode(s->decode(x)) == x);
  }
  CHECK_THROWS_AS(power(cyclic_group(4), 11, 1u << 20), CapExceeded);
}

TEST_CASE("tuple_profile examples") {
  auto c = power(cyclic_group(3), 3);
  std::vector<Element> x{1, 1, 2};
  auto p = tuple_profile(*c, c->encode(x));
  CHECK(p.rho == std::vector<std::uint8_t>{0, 0, 1});

  auto z4 = power(cyclic_group(4), 3);
  std::vector<Element> y{1, 3, 0};
  auto q = tuple_profile(*z4, z4->encode(y));
  std::array<std::uint8_t, 3> t{0, 1, 2};
  CHECK(std::find(q.mu.begin(), q.mu.end(), t) != q.mu.end());
  std::vector<Element> w{1, 1, 2};
  auto r = tuple_profile(*z4, z4->encode(w));
  std::array<std::uint8_t, 3> u{0, 0, 2};
  CHECK(std::find(r.mu.begin(), r.mu.end(), u) != r.mu.end());
}

TEST_CASE("tuple_profile: equal coordinates give swap-stable product triples") {
  for (const char* name : {"Z3", "Z4", "Z2^2", "S3"}) {
    auto G = group_by_name(name);
    for (std::size_t m : {2, 3}) {
      auto c = power(G, m);
      if (c->size() > 4096) continue;
      for (Code x = 0; x < c->size(); ++x) {
        auto p = tuple_profile(*c, x);
        std::set<std::array<std::uint8_t, 3>> mu(p.mu.begin(), p.mu.end());
        for (std::uint8_t i = 0; i < m; ++i)
          for (std::uint8_t j = 0; j < m; ++j) {
            if (p.rho[i] != p.rho[j]) continue;
            for (auto t : p.mu)
              for (int slot = 0; slot < 3; ++slot) {
                auto s = t;
                if (s[slot] == i) s[slot] = j;
                else if (s[slot] == j) s[slot] = i;
                REQUIRE(mu.count(s) == 1);
              }
          }
      }
    }
  }
}

TEST_CASE("minimal generating number") {
  CHECK(minimal_generating_number(cyclic_group(6)) == 1);
  CHECK(minimal_generating_number(group_by_name("Z2^2")) == 2);
  CHECK(minimal_generating_number(symmetric_group(3)) == 2);
  for (const auto& G : zoo()) {
    if (G.order() > 16) continue;
    CHECK(minimal_generating_number(G) == brute_min_generators(G));
    std::size_t max_order = 0;
    for (Element a = 0; a < G.order(); ++a) max_order = std::max(max_order, G.element_order(a));
    CHECK(is_cyclic(G) == (max_order == G.order()));
    CHECK((minimal_generating_number(G) <= 1) == is_cyclic(G));
  }
}

TEST_CASE("individualize examples") {
  auto Z4 = monochrome(cyclic_group(4));
  auto I = individualize(Z4, 1);
  std::map<std::uint32_t, int> sizes;
  for (auto c : I.coloring) ++sizes[c];
  CHECK(sizes.size() == 2);
  std::multiset<int> ss;
  for (auto [c, s] : sizes) ss.insert(s);
  CHECK(ss == std::multiset<int>{1, 3});
  CHECK(individualize(I, 1).coloring == I.coloring);

  std::vector<std::uint32_t> disc{0, 1, 2, 3};
  ColoredGroup D(cyclic_group(4), disc);
  CHECK(normalize_colors(individualize(D, 2).coloring) == normalize_colors(disc));
}

TEST_CASE("product_coloring examples") {
  auto Z2 = monochrome(cyclic_group(2));
  auto P = product_coloring(Z2, Z2);
  CHECK(P.num_colors() == 3);
  CHECK(P.coloring[0] == P.coloring[3]);  // identity and (a,a)
  CHECK(P.coloring[1] != P.coloring[2]);

  auto T = monochrome(cyclic_group(1));
  CHECK(product_coloring(T, T).coloring.size() == 1);

  auto Q = product_coloring(monochrome(cyclic_group(3)), Z2);
  std::map<std::uint32_t, int> sizes;
  for (auto c : Q.coloring) ++sizes[c];
  std::multiset<int> ss;
  for (auto [c, s] : sizes) ss.insert(s);
  CHECK(ss == std::multiset<int>{1, 2, 3});

  // shared alphabet keeps equal input colors equal
  auto S = product_coloring(Z2, Z2, ColorMerge::shared);
  CHECK(S.coloring[1] == S.coloring[2]);
}

TEST_CASE("renumber gives an isomorphic table") {
  auto G = symmetric_group(3);
  std::vector<Element> perm{0, 5, 4, 3, 2, 1};
  auto H = renumber(G, perm);
  for (Element a = 0; a < 6; ++a)
    for (Element b = 0; b < 6; ++b) CHECK(H.mul(perm[a], perm[b]) == perm[G.mul(a, b)]);
}

TEST_CASE("group json round trip") {
  auto CG = individualize(monochrome(group_by_name("Q8")), 3);
  auto back = colored_group_from_json(colored_group_to_json(CG));
  CHECK(back.group == CG.group);
  CHECK(back.coloring == CG.coloring);
  auto mono = colored_group_from_json(group_to_json(cyclic_group(5)));
  CHECK(mono.num_colors() == 1);
  nlohmann::json bad = {{"order", 2}, {"mul", {{0, 1}, {1, 1}}}};
  CHECK_THROWS_AS(colored_group_from_json(bad), InvalidInput);
}
