#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "schurpower/groups.hpp"
#include "schurpower/sring.hpp"

namespace schurpower {

using Perm = std::vector<std::uint32_t>;

struct PermutationGroup {
  std::size_t degree = 0;
  std::vector<Perm> generators;
  std::vector<Perm> elements;  // sorted; identity first
  std::size_t order() const { return elements.size(); }
};

// Closes a generating set under composition.  Throws BudgetExceeded above
// max_elements.
PermutationGroup permutation_group_from_generators(std::size_t degree, std::vector<Perm> gens,
                                                   std::size_t max_elements = 1'000'000);

struct SearchOptions {
  std::uint64_t node_budget = 10'000'000;
  std::size_t max_order = 64;  // largest group order accepted
  std::size_t max_elements = 2'000'000;  // largest automorphism group enumerated
};

// Greedy generating sequence: each step adds the smallest element that
// enlarges the generated subgroup the most.
std::vector<Element> greedy_generators(const FiniteGroup& G);

struct AutomorphismGenerators {
  std::vector<Perm> generators;
  std::uint64_t order = 1;
};

// Generating set through the chain of stabilizers of the greedy generating
// sequence, one search per orbit point; nothing is enumerated.
AutomorphismGenerators automorphism_generators(const ColoredGroup& CG, const SearchOptions& opt = {});
// Also lists the elements; throws BudgetExceeded above opt.max_elements.
PermutationGroup automorphism_group(const ColoredGroup& CG, const SearchOptions& opt = {});

// Orbits of Aut(G) (color preserving if a coloring is given) on G^m.
SRing cyc_m(const FiniteGroup& G, std::size_t m, const std::optional<ColoredGroup>& coloring = std::nullopt,
            const SearchOptions& opt = {});
// Orbits on G^m of the group generated by componentwise automorphisms.
Partition orbit_partition(const PowerContext& ctx, const std::vector<Perm>& base_automorphisms);

struct HolReport {
  std::vector<Perm> generators;  // permutations of G^m
  std::size_t aut_order = 0;
  std::uint64_t expected_order = 0;  // n^m |Aut(G)|
  std::uint64_t orbit_size = 0;      // orbit of the identity tuple
  std::uint64_t stabilizer_order = 0;
  bool order_ok = false;
};
HolReport hol_m_generators(const FiniteGroup& G, std::size_t m, const SearchOptions& opt = {});

bool is_sring_automorphism(const Perm& f, const SRing& A);

struct SearchStats {
  std::uint64_t nodes = 0;
};

// Returns a bijection f with a class pairing X -> X' such that
// (Xy)^f = X' f(y) for all y; f(identity) = identity when normalized.
std::optional<Perm> combinatorial_iso_search(const SRing& A, const SRing& B, bool normalized = true,
                                             const SearchOptions& opt = {}, SearchStats* stats = nullptr);
// Checks the displayed condition exhaustively and returns the induced class map.
std::optional<std::vector<ClassId>> verify_combinatorial_iso(const SRing& A, const SRing& B, const Perm& f);

struct ClassBijection {
  std::vector<ClassId> map;  // class of A -> class of B
};

// Each list entry is a sorted A-group of the respective ring; entry i of
// `dist_a` must map onto entry i of `dist_b`.
struct GenuineConstraint {
  std::vector<std::vector<Code>> dist_a, dist_b;
};

std::optional<ClassBijection> algebraic_iso_search(const SRing& A, const SRing& B,
                                                   const std::optional<GenuineConstraint>& genuine = std::nullopt,
                                                   const SearchOptions& opt = {}, SearchStats* stats = nullptr);
bool verify_algebraic_iso(const SRing& A, const SRing& B, const std::vector<ClassId>& map);

enum class IsoOracle { direct, via_aut, via_cyc1 };

// Color-preserving isomorphism f: G -> G' with f[g] the image of g.  Colors
// are compared by id, so both inputs must use one alphabet.
std::optional<Perm> iso_colored_groups(const ColoredGroup& A, const ColoredGroup& B, IsoOracle oracle,
                                       const SearchOptions& opt = {}, SearchStats* stats = nullptr);
bool is_colored_group_iso(const ColoredGroup& A, const ColoredGroup& B, const Perm& f);

nlohmann::json permutation_group_to_json(const PermutationGroup& P);

}  // namespace schurpower
