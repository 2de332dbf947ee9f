#include <doctest.h>

#include <set>

#include "../oracles.hpp"
#include "schurpower/autiso.hpp"
#include "schurpower/sring.hpp"
#include "schurpower/wl.hpp"

using namespace schurpower;

namespace {

Partition from(const std::vector<std::uint32_t>& l) { return Partition::from_labels(l); }

const char* kSmall[] = {"Z1", "Z2", "Z3", "Z4", "Z2^2", "Z5", "Z6", "S3", "Z7", "D8", "Q8", "Z8", "Z2^3"};

}  // namespace

TEST_CASE("initial rainbow examples") {
  for (const char* name : {"Z2", "Z3", "Z4", "S3", "Q8"}) {
    auto R = initial_rainbow(group_by_name(name), 1);
    std::vector<std::uint32_t> expect(group_by_name(name).order(), 1);
    expect[0] = 0;
    CHECK(R.partition == from(expect));
  }
  auto R2 = initial_rainbow(cyclic_group(2), 2);
  CHECK(R2.partition.num_classes() == 4);
  CHECK(R2.c1_verified);
  CHECK(R2.c2_verified);
}

TEST_CASE("initial rainbow: identity class, diagonal, inverse closure, refines tensor power") {
  for (const char* name : kSmall) {
    auto G = group_by_name(name);
    for (std::size_t m : {1, 2, 3}) {
      auto ctx = power(G, m);
      if (ctx->size() > 512) continue;
      CAPTURE(std::string(name));
      CAPTURE(m);
      auto R = initial_rainbow(G, m);
      const auto& P = R.partition;
      CHECK(P.class_size(P.class_of(0)) == 1);
      std::vector<Code> diag;
      for (Code x = 0; x < ctx->size(); ++x) {
        auto v = ctx->decode(x);
        if (std::all_of(v.begin(), v.end(), [&](Element a) { return a == v[0]; })) diag.push_back(x);
      }
      CHECK(is_union_of_classes(P, diag));
      for (ClassId c = 0; c < P.num_classes(); ++c) {
        std::set<ClassId> inv;
        for (Code x : P.members(c)) inv.insert(P.class_of(ctx->inv(x)));
        CHECK(inv.size() == 1);
        CHECK(P.class_size(*inv.begin()) == P.class_size(c));
      }
      CHECK(is_coarser_equal(tensor_power_partition(*ctx), P));
      CHECK(oracle::closed_under_maps(G.table(), m, P.labels()));
      CHECK(check_c1(*ctx, P));
      CHECK(check_c2(*ctx, P));
    }
  }
}

TEST_CASE("wl_step examples") {
  auto c = power(cyclic_group(3), 2);
  CHECK(wl_step(*c, Partition::discrete(9)).is_discrete());
  auto z4 = power(cyclic_group(4), 1);
  auto X1 = initial_rainbow(cyclic_group(4), 1).partition;
  CHECK(wl_step(*z4, X1) == X1);
  auto cc = wl_m_group(group_by_name("S3"), 2);
  CHECK(wl_step(*cc.rainbow.ctx, cc.rainbow.partition) == cc.rainbow.partition);
}

TEST_CASE("wl fixpoint examples") {
  CHECK(wl_m_group(cyclic_group(1), 3).rainbow.partition.num_classes() == 1);
  CHECK(wl_m_group(cyclic_group(2), 2).rainbow.partition.is_discrete());
  for (const char* name : kSmall) {
    auto G = group_by_name(name);
    auto W1 = wl_m_group(G, 1);
    CHECK(W1.rainbow.partition.num_classes() <= 2);
    auto R = initial_rainbow(G, 2);
    auto W2 = wl_fixpoint(R);
    CHECK(W2.rainbow.partition.num_classes() >= R.partition.num_classes());
    CHECK(is_coarser_equal(R.partition, W2.rainbow.partition));
    CHECK(W2.c3_verified);
  }
  // WL_2(Z3) against the orbits of Aut(Z3) on pairs
  auto G = cyclic_group(3);
  auto orbits = oracle::orbit_labels(G.table(), 2, oracle::brute_automorphisms(G.table(), {0, 0, 0}));
  CHECK(wl_m_group(G, 2).rainbow.partition.labels() == orbits);
}

TEST_CASE("wl_m_group agrees with the naive all-maps oracle") {
  for (const char* name : kSmall) {
    auto G = group_by_name(name);
    auto T = G.table();
    for (std::size_t m : {1, 2, 3}) {
      if (power(G, 1)->size() > 5 && m == 3) continue;
      CAPTURE(std::string(name));
      CAPTURE(m);
      auto W = wl_m_group(G, m);
      CHECK(W.rainbow.partition.labels() == oracle::naive_wl(T, m));
    }
  }
  for (const char* name : {"Z4", "Z2^2", "S3", "Q8", "Z6"}) {
    auto CG = individualize(monochrome(group_by_name(name)), 1);
    auto T = CG.group.table();
    for (std::size_t m : {1, 2}) {
      CAPTURE(std::string(name));
      CAPTURE(m);
      CHECK(wl_m_group(CG.group, m, CG).rainbow.partition.labels() == oracle::naive_wl(T, m, &CG.coloring));
    }
  }
}

TEST_CASE("wl fixpoints are monotone in the starting rainbow") {
  for (const char* name : {"Z4", "Z2^2", "S3", "Z6", "Q8"}) {
    auto G = group_by_name(name);
    for (std::size_t m : {1, 2}) {
      auto mono = wl_m_group(G, m);
      for (Element x = 1; x < G.order(); ++x) {
        auto CG = individualize(monochrome(G), x);
        auto col = wl_m_group(G, m, CG);
        CHECK(is_coarser_equal(mono.rainbow.partition, col.rainbow.partition));
      }
    }
  }
}

TEST_CASE("wl fixpoints are regular and project cleanly") {
  for (const char* name : {"Z3", "Z4", "Z2^2", "S3", "Z5", "Q8"}) {
    auto G = group_by_name(name);
    for (std::size_t m : {2, 3}) {
      auto ctx = power(G, m);
      if (ctx->size() > 512) continue;
      auto W = wl_m_group(G, m);
      const auto& P = W.rainbow.partition;
      CHECK(check_regular(*ctx, P).all_constant);
      CHECK(check_c3(*ctx, P));
      for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        std::vector<std::size_t> K;
        for (std::size_t i = 0; i < m; ++i)
          if (mask >> i & 1) K.push_back(i);
        auto pr = project(P, *ctx, K);
        CAPTURE(std::string(name));
        CAPTURE(mask);
        CHECK(!pr.partial_overlap);
        for (ClassId c = 0; c < pr.partition.num_classes(); ++c) {
          auto mem = pr.partition.members(c);
          CHECK(is_union_of_classes(P, full_preimage(*ctx, K, mem)));
        }
      }
    }
  }
}

TEST_CASE("check_regular reports a constructed violation") {
  auto c = power(cyclic_group(2), 2);
  // codes: 0=(e,e) 1=(a,e) 2=(e,a) 3=(a,a); the first class meets the coset
  // of the second factor in 2 points at (e,e) and in 1 point at (a,e)
  auto P = from({0, 0, 0, 1});
  auto r = check_regular(*c, P);
  CHECK(!r.all_constant);
  CHECK(!r.witness.empty());
  bool some_varies = false;
  for (const auto& row : r.n_K)
    for (auto v : row) some_varies |= v < 0;
  CHECK(some_varies);
  auto ok = check_regular(*c, Partition::discrete(4));
  CHECK(ok.all_constant);
}

TEST_CASE("C1-C3 checks reject broken partitions") {
  auto c = power(cyclic_group(3), 2);
  CHECK(!check_c1(*c, Partition::single_class(9)));
  std::string why;
  // split a class of the rainbow so that images under the swap stop being classes
  auto R = initial_rainbow(cyclic_group(3), 2).partition;
  std::vector<std::uint32_t> l(R.labels().begin(), R.labels().end());
  std::vector<Element> t{1, 0};
  l[c->encode(t)] = 99;
  CHECK(!check_c2(*c, from(l), &why));
  CHECK(!why.empty());
  CHECK(oracle::closed_under_maps(cyclic_group(3).table(), 2, from(l).labels()) == false);
}

TEST_CASE("joint fingerprint") {
  auto Z4 = monochrome(cyclic_group(4)), V4 = monochrome(group_by_name("Z2^2"));
  CHECK(joint_fingerprint(Z4, Z4, 2).equal);
  CHECK(joint_fingerprint(Z4, Z4, 2).bijection_verified);
  CHECK(!joint_fingerprint(Z4, V4, 2).equal);
  CHECK(!joint_fingerprint(V4, Z4, 2).equal);
  CHECK(!joint_fingerprint(Z4, V4, 2).divergence.empty());
  CHECK(joint_fingerprint(Z4, V4, 1).equal == joint_fingerprint(V4, Z4, 1).equal);

  for (const char* name : {"S3", "Q8", "D8", "Z6", "Z2^3"}) {
    auto G = group_by_name(name);
    std::vector<Element> perm(G.order());
    perm[0] = 0;
    for (Element a = 1; a < G.order(); ++a) perm[a] = static_cast<Element>(G.order() - a);
    auto H = renumber(G, perm);
    for (std::size_t m : {1, 2}) {
      auto f = joint_fingerprint(monochrome(G), monochrome(H), m);
      CAPTURE(std::string(name));
      CHECK(f.equal);
      REQUIRE(f.a.size() == f.b.size());
      for (std::size_t i = 0; i < f.a.size(); ++i) {
        CHECK(f.a[i].size == f.b[i].size);
        CHECK(f.a[i].profile.rho == f.b[i].profile.rho);
      }
    }
  }
  // symmetric verdicts across a few non-isomorphic pairs
  auto D8 = monochrome(group_by_name("D8")), Q8 = monochrome(group_by_name("Q8"));
  for (std::size_t m : {1, 2}) CHECK(joint_fingerprint(D8, Q8, m).equal == joint_fingerprint(Q8, D8, m).equal);
}

TEST_CASE("pr_1 of WL_3 and pr_m of the next ring") {
  ProjectionReport rep;
  auto A = sring_from_wl3m(cyclic_group(2), 1, &rep);
  CHECK(A.rank() == 2);
  CHECK(rep.axioms_ok);
  CHECK(!rep.partial_overlap);
  auto B = sring_from_wl3m(cyclic_group(3), 1, &rep);
  CHECK(B.partition() == cyc_m(cyclic_group(3), 1).partition());
  CHECK(rep.refinement_ok);

  auto cc = cc_from_sring(cyclic_group(3), 2, &rep);
  CHECK(cc.c3_verified);
  CHECK(check_c3(*cc.rainbow.ctx, cc.rainbow.partition));
  auto cc4 = cc_from_sring(cyclic_group(4), 2, &rep);
  CHECK(rep.refinement_checked);
  CHECK(rep.refinement_ok);
  CHECK(is_coarser_equal(wl_m_group(cyclic_group(4), 2).rainbow.partition, cc4.rainbow.partition));
  auto cc1 = cc_from_sring(group_by_name("S3"), 1, &rep);
  CHECK(cc1.rainbow.partition.domain_size() == 6);
}

TEST_CASE("wl json export") {
  auto cc = wl_m_group(cyclic_group(3), 2);
  auto j = cc_to_json(cc);
  CHECK(j.contains("class_of"));
  auto f = fingerprint_to_json(joint_fingerprint(monochrome(cyclic_group(3)), monochrome(cyclic_group(3)), 2));
  CHECK(f["equal"] == true);
}
