// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "../extra_groups.hpp"
#include "schurpower/autiso.hpp"
#include "schurpower/sring.hpp"
#include "schurpower/verify.hpp"
#include "schurpower/wl.hpp"

using namespace schurpower;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void fail(const std::string& why) {
    if (ok) detail << "first failure: " << why;
    ok = false;
  }
  // Report verdict must be pass and every stored artifact must re-check.
  void require(const TheoremReport& r, const std::string& what) {
    std::string why;
    if (r.verdict != Verdict::pass) fail(what + " verdict " + to_string(r.verdict) + " " + report_to_json(r).dump());
    else if (!revalidate(r, &why)) fail(what + " does not revalidate: " + why);
  }
};

std::string join(const std::vector<NamedGroup>& gs) {
  std::string s;
  for (const auto& g : gs) s += (s.empty() ? "" : ",") + g.name;
  return s;
}

std::vector<NamedGroup> by_name(const std::vector<std::string>& names) {
  std::vector<NamedGroup> out;
  for (const auto& n : names) out.push_back(testgroups::named(n));
  return out;
}

int failures = 0;

void criterion(int id, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  const double s = since(t0);
  if (!o.ok) ++failures;
  std::printf("criterion %2d  %s  %-28s %8.2fs  %s\n", id, o.ok ? "PASS" : "FAIL", title, s, o.detail.str().c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  const auto grid = default_grid();

  criterion(1, "rank-5 law", [&](Outcome& o) {
    double worst = 0;
    for (const auto& g : by_name({"Z3", "Z4", "Z2^2", "Z5", "Z6", "S3", "D8", "Q8", "Z2"})) {
      const auto t0 = Clock::now();
      auto r = check_rank5(g);
      const std::size_t want = g.group.order() == 2 ? 4 : 5;
      const std::size_t rank = compute_Am(g.group, 2).rank();
      const double s = since(t0);
      worst = std::max(worst, s);
      o.require(r, "rank5 " + g.name);
      if (rank != want) o.fail(g.name + " rank " + std::to_string(rank));
      if (s >= 1.0) o.fail(g.name + " took " + std::to_string(s) + "s");
    }
    if (o.ok) o.detail << "ranks 5 (Z2: 4), slowest group " << worst << "s";
  });

  criterion(2, "triviality at m=1", [&](Outcome& o) {
    const auto t0 = Clock::now();
    for (const auto& g : grid) {
      o.require(check_trivial_m1(g), "trivial_m1 " + g.name);
      if (compute_Am(g.group, 1).rank() != 2) o.fail(g.name + " rank is not 2");
    }
    if (since(t0) >= 1.0) o.fail("over 1s");
    if (o.ok) o.detail << "rank 2 on " << join(grid);
  });

  criterion(3, "stabilization", [&](Outcome& o) {
    const auto t0 = Clock::now();
    for (const auto& g : by_name({"Z4", "Z2^2", "Z5", "Z6", "S3"})) {
      auto r = check_stabilization(g, 1, 2);
      o.require(r, "stabilization(1,2) " + g.name);
      auto A = project_sring(compute_Am(g.group, 3), 1);
      if (!(A.partition() == cyc_m(g.group, 1).partition())) o.fail(g.name + ": projection differs from cyc_1");
    }
    std::size_t pairs = 0;
    VerifyOptions opt;
    opt.stabilization_limit = std::uint64_t{1} << 16;
    for (const auto& g : grid)
      for (const auto& r : check_stabilization_range(g, opt)) {
        ++pairs;
        o.require(r, "stabilization " + g.name + " " + r.params.dump());
      }
    const double s = since(t0);
    if (s >= 60.0) o.fail("over 60s");
    if (o.ok) o.detail << "equality on 5 groups, both inclusions on " << pairs << " (G,m,k) triples";
  });

  criterion(4, "sandwich inclusions", [&](Outcome& o) {
    const auto t0 = Clock::now();
    std::size_t checks = 0;
    VerifyOptions opt;
    opt.wl_limit = 4096;
    for (const auto& g : grid) {
      o.require(check_sandwich(g, 1, SandwichHalves{true, false}, opt), "first half m=1 " + g.name);
      ++checks;
    }
    for (const auto& g : grid)
      if (g.group.order() <= 4) {
        o.require(check_sandwich(g, 2, SandwichHalves{false, true}, opt), "second half m=2 " + g.name);
        ++checks;
      }
    for (const auto& g : testgroups::extended(16)) {
      o.require(check_sandwich(g, 1, SandwichHalves{false, true}, opt), "second half m=1 " + g.name);
      ++checks;
    }
    if (since(t0) >= 60.0) o.fail("over 60s");
    if (o.ok) o.detail << checks << " partition-order checks";
  });

  criterion(5, "projection theorems", [&](Outcome& o) {
    std::size_t checks = 0;
    for (const auto& g : grid) {
      o.require(check_projection_theorems(g, 1, SandwichHalves{true, false}), "pr_1(WL_3) " + g.name);
      ++checks;
    }
    for (const auto& g : testgroups::extended(12)) {
      o.require(check_projection_theorems(g, 1, SandwichHalves{false, true}), "pr_1(S_2) " + g.name);
      ++checks;
      if (g.group.order() <= 8) {
        o.require(check_projection_theorems(g, 2, SandwichHalves{false, true}), "pr_2(S_3) " + g.name);
        ++checks;
      }
    }
    if (o.ok) o.detail << checks << " projections, zero violations";
  });

  criterion(6, "isomorphism theorem", [&](Outcome& o) {
    auto neg = check_iso_theorem(named_group("Z4"), named_group("Z2^2"));
    o.require(neg, "iso Z4 vs Z2^2");
    if (neg.witness.value("sring_iso", true) || neg.witness.value("group_iso", true))
      o.fail("Z4 vs Z2^2 reported isomorphic");
    std::size_t witnesses = 0;
    for (const auto& g : grid) {
      if (g.group.order() > 4) continue;
      auto A = compute_Am(g.group, 3);
      auto f = combinatorial_iso_search(A, A);
      if (!f) o.fail(g.name + ": no self witness");
      else if (!verify_combinatorial_iso(A, A, *f)) o.fail(g.name + ": witness does not verify");
      else ++witnesses;
      o.require(check_iso_theorem(g, g), "iso self " + g.name);
    }
    if (o.ok) o.detail << "no iso for Z4 vs Z2^2, " << witnesses << " self witnesses re-verified";
  });

  criterion(7, "automorphism inclusion", [&](Outcome& o) {
    std::size_t gens = 0;
    for (const auto& g : grid) {
      if (g.group.order() > 8) continue;
      o.require(check_hol_inclusion(g, 2), "hol_2 " + g.name);
      auto A = compute_Am(g.group, 2);
      for (const auto& p : hol_m_generators(g.group, 2).generators) {
        ++gens;
        if (!is_sring_automorphism(p, A)) o.fail(g.name + ": generator is not an automorphism");
      }
    }
    if (o.ok) o.detail << gens << " generators checked";
  });

  criterion(8, "regularity and rainbows", [&](Outcome& o) {
    std::size_t pairs = 0;
    VerifyOptions opt;
    opt.wl_limit = 4096;
    for (const auto& g : grid) {
      const std::size_t n = g.group.order();
      std::uint64_t N = n;
      for (std::size_t m = 1; N <= 4096; ++m, N *= n) {
        auto r = check_rainbow_regularity(g, m, opt);
        o.require(r, "regularity " + g.name + " m=" + std::to_string(m));
        ++pairs;
      }
    }
    if (o.ok) o.detail << pairs << " (G,m) pairs, C1/C2/n_K and WL C3 all hold";
  });

  criterion(9, "word constancy", [&](Outcome& o) {
    std::size_t probes = 0;
    struct Job {
      const char* name;
      std::size_t m;
    };
    for (auto [name, m] : {Job{"Z3", 3}, Job{"Z2^2", 4}, Job{"Z4", 3}}) {
      auto r = check_word_theorem(named_group(name), m, 100, 20220418);
      o.require(r, std::string("word ") + name);
      probes += r.witness.value("probes", std::size_t{0});
    }
    if (probes != 300) o.fail("expected 300 probes, ran " + std::to_string(probes));
    if (o.ok) o.detail << probes << " seeded probes, all constant";
  });

  criterion(10, "reduction coherence", [&](Outcome& o) {
    auto gs = testgroups::extended(12);
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < gs.size(); ++i)
      for (std::size_t j = i; j < gs.size(); ++j) {
        if (gs[i].group.order() != gs[j].group.order()) continue;
        auto r = check_reductions(gs[i], gs[j]);
        o.require(r, "reductions " + gs[i].name + "/" + gs[j].name);
        pairs += r.witness.value("pairs", std::size_t{0});
      }
    if (o.ok) o.detail << pairs << " colored pairs, oracles agree";
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
