#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "schurpower/autiso.hpp"
#include "schurpower/groups.hpp"
#include "schurpower/partition.hpp"
#include "schurpower/sring.hpp"

namespace schurpower {

struct NamedGroup {
  std::string name;
  FiniteGroup group;
};

NamedGroup named_group(const std::string& name);
// Z2, Z3, Z4, Z2^2, Z5, Z6, S3, D8 (order 8), Q8, Z2^3.
std::vector<NamedGroup> default_grid();

enum class Verdict { pass, fail, skipped };
std::string to_string(Verdict v);

// A stored fact a report relies on.  `revalidate` re-checks it from the
// stored objects alone.
struct Artifact {
  enum class Kind {
    coarser,          // lhs <= rhs: rhs refines lhs
    equal,            // lhs == rhs
    sring_axioms,     // lhs satisfies S1-S3 over ctx
    cc_conditions,    // lhs satisfies C1-C3 and n_K constancy over ctx
    rainbow_regular,  // lhs satisfies C1, C2 and n_K constancy over ctx
    word_constant,    // word predicate constant on class `cls` of lhs
    sring_iso,        // `map` is a combinatorial iso (ctx, lhs) -> (ctx2, rhs)
    sring_automorphism,
    group_iso,        // `map` is a color preserving iso colored_a -> colored_b
  };
  Kind kind = Kind::equal;
  std::string label;
  std::shared_ptr<const PowerContext> ctx, ctx2;
  std::optional<Partition> lhs, rhs;
  ClassId cls = 0;
  std::size_t coord = 0;
  Word word;
  Perm map;
  std::shared_ptr<const ColoredGroup> colored_a, colored_b;
  bool expected = true;
};

// True when the artifact holds as expected.
bool check_artifact(const Artifact& a, std::string* witness = nullptr);

struct TheoremReport {
  std::string theorem;
  std::vector<std::string> groups;
  nlohmann::json params = nlohmann::json::object();
  Verdict verdict = Verdict::pass;
  std::vector<std::string> notes;
  nlohmann::json witness = nlohmann::json::object();
  std::vector<Artifact> artifacts;
  double seconds = 0.0;  // reported in the summary table only
};

// Recomputes nothing; re-checks every stored artifact.
bool revalidate(const TheoremReport& r, std::string* witness = nullptr);

struct VerifyOptions {
  std::uint64_t stabilization_limit = std::uint64_t{1} << 16;  // n^(m+k)
  std::uint64_t wl_limit = 4096;                               // WL domains
  SearchOptions search;
  unsigned threads = 1;
};

TheoremReport check_stabilization(const NamedGroup& G, std::size_t m, std::size_t k, const VerifyOptions& opt = {});
// Every (m, k) with n^(m+k) <= opt.stabilization_limit, sharing the rings of one group.
std::vector<TheoremReport> check_stabilization_range(const NamedGroup& G, const VerifyOptions& opt = {});

struct SandwichHalves {
  bool first = true;   // projection of WL_3m against the m-dimensional ring
  bool second = true;  // projection of the (m+1)-dimensional ring against WL_m
};
TheoremReport check_sandwich(const NamedGroup& G, std::size_t m, SandwichHalves halves = {},
                             const VerifyOptions& opt = {});
TheoremReport check_iso_theorem(const NamedGroup& A, const NamedGroup& B, const VerifyOptions& opt = {});
TheoremReport check_projection_theorems(const NamedGroup& G, std::size_t m, SandwichHalves halves = {},
                                        const VerifyOptions& opt = {});
TheoremReport check_rank5(const NamedGroup& G);
TheoremReport check_trivial_m1(const NamedGroup& G);
TheoremReport check_word_theorem(const NamedGroup& G, std::size_t m, std::size_t samples, std::uint64_t seed);
TheoremReport check_hol_inclusion(const NamedGroup& G, std::size_t m, const VerifyOptions& opt = {});
// C1, C2 and n_K constancy of the basic sets of the m-dimensional ring, and
// C3 plus constancy of the WL_m fixpoint.
TheoremReport check_rainbow_regularity(const NamedGroup& G, std::size_t m, const VerifyOptions& opt = {});
// The three colored-group isomorphism oracles agree on (A, B) and on every
// pair of one-element individualizations.
TheoremReport check_reductions(const NamedGroup& A, const NamedGroup& B, const VerifyOptions& opt = {});

struct GridSelection {
  std::vector<std::string> theorems;  // empty: all
  std::size_t word_samples = 0;  // 0: word probes are skipped
  std::optional<std::uint64_t> seed;
};
std::vector<TheoremReport> run_grid(const std::vector<NamedGroup>& grid, const GridSelection& sel,
                                    const VerifyOptions& opt = {});
std::vector<std::string> theorem_names();

nlohmann::json report_to_json(const TheoremReport& r);
std::string summary_table(const std::vector<TheoremReport>& reports);

}  // namespace schurpower
