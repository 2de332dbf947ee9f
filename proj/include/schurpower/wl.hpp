#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "schurpower/groups.hpp"
#include "schurpower/partition.hpp"
#include "schurpower/sring.hpp"

namespace schurpower {

struct Rainbow {
  std::shared_ptr<const PowerContext> ctx;
  Partition partition;
  std::vector<TupleProfile> profiles;  // rho always; mu only where constant
  std::vector<char> mu_constant;
  bool c1_verified = false;
  bool c2_verified = false;
};

struct CoherentConfig {
  Rainbow rainbow;
  bool c3_verified = false;
  // n_K per class, indexed [class][mask of K].
  std::vector<std::vector<std::uint32_t>> n_K;
  std::size_t rounds = 0;
  // A refinement round broke C2 and the forced C2 splits were applied.
  bool c2_repaired = false;
};

struct WLOptions {
  std::size_t max_rounds = 0;  // 0: N
  unsigned threads = 1;
};

// Fibers of x -> (rho(x), mu(x), colors of the coordinates).
Partition fiber_partition(const PowerContext& ctx, const std::vector<std::uint32_t>* coloring);
// Coarsest refinement of P in which X^σ is a class for every class X and
// every map σ of the coordinates.
Partition rainbow_closure(const PowerContext& ctx, const Partition& P);

// The group rainbow: fibers, closed under coordinate maps.
Rainbow initial_rainbow(const FiniteGroup& G, std::size_t m, const std::optional<ColoredGroup>& coloring = std::nullopt);
Rainbow make_rainbow(std::shared_ptr<const PowerContext> ctx, Partition P);

Partition wl_step(const PowerContext& ctx, const Partition& P, unsigned threads = 1);
CoherentConfig wl_fixpoint(const Rainbow& R, const WLOptions& opt = {});
CoherentConfig wl_m_group(const FiniteGroup& G, std::size_t m, const std::optional<ColoredGroup>& coloring = std::nullopt,
                          const WLOptions& opt = {});

bool check_c1(const PowerContext& ctx, const Partition& P, std::string* witness = nullptr);
bool check_c2(const PowerContext& ctx, const Partition& P, std::string* witness = nullptr);
bool check_c3(const PowerContext& ctx, const Partition& P, std::string* witness = nullptr);

struct RegularityReport {
  bool all_constant = true;
  std::string witness;
  // [class][mask]: the constant value, or -1 where it varies.
  std::vector<std::vector<std::int64_t>> n_K;
};
RegularityReport check_regular(const PowerContext& ctx, const Partition& P);

struct FingerprintEntry {
  std::uint32_t color;
  std::size_t size;
  TupleProfile profile;
  bool operator==(const FingerprintEntry&) const = default;
};

struct FingerprintResult {
  bool equal = false;
  std::vector<FingerprintEntry> a, b;  // sorted by color
  std::size_t rounds = 0;
  std::string divergence;  // why the runs split apart, if they did
  bool bijection_verified = false;
};

FingerprintResult joint_fingerprint(const ColoredGroup& A, const ColoredGroup& B, std::size_t m,
                                    const WLOptions& opt = {});

struct WLDimensionProbe {
  std::vector<std::pair<std::size_t, bool>> verdicts;  // (m, equivalent)
  bool monotone = true;
};
WLDimensionProbe probe_wl_dimension(const ColoredGroup& A, const ColoredGroup& B, std::size_t max_m);

struct ProjectionReport {
  bool axioms_ok = false;         // S1-S3 or C1-C3, depending on the construction
  bool partial_overlap = false;   // defensive merging was needed
  bool refinement_ok = false;     // the >= relation of the construction
  bool refinement_checked = false;
  std::string witness;
};

// pr_m of WL_{3m}(G), checked as an S-ring and against the m-dimensional ring.
SRing sring_from_wl3m(const FiniteGroup& G, std::size_t m, ProjectionReport* report = nullptr);
// pr_m of the basic sets of the (m+1)-dimensional ring, checked as a
// coherent configuration and against WL_m(G).
CoherentConfig cc_from_sring(const FiniteGroup& G, std::size_t m, ProjectionReport* report = nullptr);

nlohmann::json profile_to_json(const TupleProfile& p);
nlohmann::json cc_to_json(const CoherentConfig& cc);
nlohmann::json fingerprint_to_json(const FingerprintResult& f);

}  // namespace schurpower
