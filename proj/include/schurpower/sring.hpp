#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "schurpower/groups.hpp"
#include "schurpower/partition.hpp"

namespace schurpower {

struct StructureConstantTensor {
  struct Entry {
    ClassId x, y, z;
    std::uint32_t c;
    bool operator==(const Entry&) const = default;
  };
  std::size_t rank = 0;
  std::vector<std::size_t> class_sizes;
  std::vector<Entry> entries;  // nonzero only, sorted by (x, y, z)

  std::uint32_t get(ClassId x, ClassId y, ClassId z) const;
};

struct AxiomReport {
  bool s1 = true, s2 = true, s3 = true;
  std::string witness;  // first violation, human readable
  bool ok() const { return s1 && s2 && s3; }
};

// Componentwise automorphisms and coordinate permutations that a partition
// of G^m is known to respect.  Exploited by the symmetric closure engine.
struct Symmetry {
  std::vector<std::vector<Element>> automorphisms;  // all elements, identity included
  bool permute_coordinates = true;
};

struct ClosureOptions {
  std::size_t max_rounds = 0;        // 0: the theoretical bound N
  double time_budget_seconds = 0.0;  // 0: unlimited
  unsigned threads = 1;
};

struct ClosureStats {
  std::vector<std::size_t> class_counts;  // after each round
  std::vector<double> round_seconds;
};

namespace detail {
struct TensorCache;
}

class SRing {
 public:
  SRing(std::shared_ptr<const PowerContext> carrier, Partition basic);

  const PowerContext& carrier() const { return *carrier_; }
  const std::shared_ptr<const PowerContext>& carrier_ptr() const { return carrier_; }
  const Partition& partition() const { return basic_; }
  std::size_t rank() const { return basic_.num_classes(); }
  ClassId class_of(Code x) const { return basic_.class_of(x); }
  ClassId inverse_class(ClassId c) const;

  // Computed on first use; throws InvalidInput if S3 fails.
  const StructureConstantTensor& constants() const;

 private:
  std::shared_ptr<const PowerContext> carrier_;
  Partition basic_;
  std::shared_ptr<detail::TensorCache> cache_;
};

// Checks S1-S3 exhaustively.  With a symmetry hint the S3 test runs one
// symmetric refinement round instead of the quadratic scan; the hint is
// verified, not trusted.
AxiomReport verify_axioms(const PowerContext& ctx, const Partition& P, const Symmetry* sym = nullptr);

// Plain engine: every element is keyed in every round.
Partition schur_closure_partition(const PowerContext& ctx, const Partition& initial,
                                  const ClosureOptions& opt = {}, ClosureStats* stats = nullptr);

// Same fixpoint, computed on orbit representatives of Aut(G) x Sym(m).
// Throws InvalidInput if `initial` does not respect the symmetry.
Partition schur_closure_symmetric(const PowerContext& ctx, const Partition& initial, const Symmetry& sym,
                                  const ClosureOptions& opt = {}, ClosureStats* stats = nullptr);

SRing schur_closure(std::shared_ptr<const PowerContext> ctx, const Partition& initial,
                    const ClosureOptions& opt = {});

Partition tensor_power_partition(const PowerContext& ctx);

// Closure of the support-pattern partition met with the diagonal.  A
// coloring splits the diagonal by color first.
SRing compute_Am(const FiniteGroup& G, std::size_t m, const std::optional<ColoredGroup>& coloring = std::nullopt,
                 const ClosureOptions& opt = {}, ClosureStats* stats = nullptr);
Partition am_initial_partition(const PowerContext& ctx, const std::vector<std::uint32_t>* coloring);

StructureConstantTensor structure_constants(const SRing& A);

// H: sorted element list of an A-subgroup.
std::uint64_t n_of(const SRing& A, ClassId X, std::span<const Code> H);

bool is_subgroup(const PowerContext& ctx, std::span<const Code> H);
bool is_union_of_classes(const Partition& P, std::span<const Code> S);

SRing quotient_sring(const SRing& A, std::span<const Code> H);
SRing project_sring(const SRing& A, std::size_t k);
SRing tensor_product(const SRing& A, const SRing& B);

struct DistinguishedSet {
  std::string name;  // e.g. "G_{0,2}", "D_{1,2}", "X_{0,1,2}"
  std::vector<Code> members;
  bool is_union_of_classes = false;
  bool is_subgroup = false;
};

struct DistinguishedSubsets {
  std::vector<DistinguishedSet> G_K;  // indexed by bitmask of K
  std::vector<DistinguishedSet> D_K;  // indexed by bitmask of K
  std::vector<DistinguishedSet> X_ijk;  // indexed by (i*m + j)*m + k
  bool all_ok() const;  // G_K, D_K are A-groups and X_ijk are A-sets
};

DistinguishedSubsets distinguished_subsets(const SRing& A);

// Word letters: +t means a_t, -t means a_t^{-1}, with t in 1..k.
using Word = std::vector<int>;
// Evaluates x_l == w(x_1..x_k) (l 0-based, letters 1-based) on every member
// of class X; throws InternalError with two witnesses if not constant.
bool word_constancy_check(const SRing& A, ClassId X, std::size_t l, const Word& w);

nlohmann::json sring_to_json(const SRing& A, bool with_constants);
SRing sring_from_json(const nlohmann::json& j);
nlohmann::json carrier_to_json(const PowerContext& ctx);
std::shared_ptr<const PowerContext> carrier_from_json(const nlohmann::json& j);

}  // namespace schurpower
