#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "schurpower/errors.hpp"

namespace schurpower {

using Element = std::uint32_t;
using Code = std::uint32_t;

inline constexpr std::size_t kMaxGroupOrder = 256;
inline constexpr std::uint64_t kDefaultDomainCap = std::uint64_t{1} << 20;

// Process-wide default for the tuple-domain guard.
std::uint64_t default_domain_cap();
void set_default_domain_cap(std::uint64_t cap);

// Group given by its multiplication table; element 0 is the identity.
class FiniteGroup {
 public:
  FiniteGroup() = default;

  // Validates every group axiom; throws InvalidInput naming the first
  // violated one.
  static FiniteGroup from_table(const std::vector<std::vector<Element>>& mul);
  static FiniteGroup from_flat_table(std::size_t n, std::vector<Element> flat);

  std::size_t order() const { return n_; }
  Element mul(Element a, Element b) const { return table_[a * n_ + b]; }
  Element inv(Element a) const { return inv_[a]; }
  static constexpr Element identity() { return 0; }

  std::size_t element_order(Element a) const;
  const std::vector<Element>& flat_table() const { return table_; }
  std::vector<std::vector<Element>> table() const;

  bool operator==(const FiniteGroup& o) const { return n_ == o.n_ && table_ == o.table_; }

 private:
  std::size_t n_ = 0;
  std::vector<Element> table_;
  std::vector<Element> inv_;
};

enum class GroupFamily {
  cyclic,
  dihedral,
  quaternion8,
  symmetric,
  elementary_abelian,
  direct_product,
  from_table
};

FiniteGroup cyclic_group(std::size_t n);
// Dihedral group of the given order 2k (k >= 1).
FiniteGroup dihedral_group(std::size_t order);
FiniteGroup quaternion_group();
FiniteGroup symmetric_group(std::size_t degree);
FiniteGroup elementary_abelian_group(std::size_t p, std::size_t rank);
// Coordinate 1 (factors[0]) is the least significant digit.
FiniteGroup direct_product(const std::vector<FiniteGroup>& factors);

// Numeric families only: cyclic {n}, dihedral {2k}, quaternion8 {},
// symmetric {k}, elementary_abelian {p, k}.
FiniteGroup make_group(GroupFamily family, const std::vector<std::size_t>& params);

// Short names: Z4, C4, D8 (order 8), Q8, S3, E2^3, Z2^2, and products
// joined by 'x' such as Z2xZ3.
FiniteGroup group_by_name(const std::string& name);

// Group whose elements are renumbered by the bijection `perm` (perm[0] must
// be 0): new id perm[g] stands for old element g.
FiniteGroup renumber(const FiniteGroup& G, const std::vector<Element>& perm);

std::size_t minimal_generating_number(const FiniteGroup& G);
// Elements of the subgroup generated by `gens`, sorted.
std::vector<Element> generated_subgroup(const FiniteGroup& G, std::span<const Element> gens);
bool is_cyclic(const FiniteGroup& G);

struct ColoredGroup {
  FiniteGroup group;
  std::vector<std::uint32_t> coloring;

  ColoredGroup() = default;
  ColoredGroup(FiniteGroup g, std::vector<std::uint32_t> c);
  std::size_t num_colors() const;
};

ColoredGroup monochrome(const FiniteGroup& G);
ColoredGroup individualize(const ColoredGroup& CG, Element x);
// Gives x the explicit color id `color` (which must not already be used),
// without renumbering.  Used when two structures must share a color alphabet.
ColoredGroup individualize_with(const ColoredGroup& CG, Element x, std::uint32_t color);

enum class ColorMerge {
  disjoint,  // the two inputs' color ids are shifted apart
  shared     // both inputs use one color alphabet
};
ColoredGroup product_coloring(const ColoredGroup& A, const ColoredGroup& B,
                              ColorMerge mode = ColorMerge::disjoint);
// Same, reusing an already built direct_product({A.group, B.group}).
ColoredGroup product_coloring(const ColoredGroup& A, const ColoredGroup& B, ColorMerge mode,
                              const FiniteGroup& product);

// Renumbers colors to 0.. by first occurrence.
std::vector<std::uint32_t> normalize_colors(std::span<const std::uint32_t> colors);

// G^m (or a product of arbitrary small groups) with a mixed-radix codec.
class PowerContext {
 public:
  PowerContext(std::vector<std::shared_ptr<const FiniteGroup>> factors,
               std::uint64_t cap = default_domain_cap());

  std::size_t arity() const { return factors_.size(); }
  Code size() const { return size_; }
  const FiniteGroup& factor(std::size_t i) const { return *factors_[i]; }
  const std::vector<std::shared_ptr<const FiniteGroup>>& factors() const { return factors_; }
  bool homogeneous() const { return homogeneous_; }
  const FiniteGroup& base() const;

  Element digit(Code x, std::size_t i) const { return digits_[std::size_t{x} * m_ + i]; }
  const std::uint8_t* digits(Code x) const { return digits_.data() + std::size_t{x} * m_; }
  Code stride(std::size_t i) const { return stride_[i]; }
  Code encode(std::span<const Element> t) const;
  std::vector<Element> decode(Code x) const;

  Code mul(Code x, Code y) const;
  Code inv(Code x) const { return inv_[x]; }
  static constexpr Code identity() { return 0; }

  // x^σ with (x^σ)_i = x_{σ(i)}, σ given 0-based.
  Code apply_map(Code x, std::span<const std::uint8_t> sigma) const;

 private:
  std::vector<std::shared_ptr<const FiniteGroup>> factors_;
  std::size_t m_ = 0;
  Code size_ = 1;
  bool homogeneous_ = true;
  std::vector<Code> stride_;
  std::vector<std::uint8_t> digits_;
  std::vector<Code> inv_;
};

std::shared_ptr<const PowerContext> power(const FiniteGroup& G, std::size_t m,
                                          std::uint64_t cap = default_domain_cap());

struct TupleProfile {
  std::vector<std::uint8_t> rho;  // first-occurrence normalized class-of vector
  std::vector<std::array<std::uint8_t, 3>> mu;  // sorted (i,j,k), 0-based
  bool operator==(const TupleProfile&) const = default;
  auto operator<=>(const TupleProfile&) const = default;
};

TupleProfile tuple_profile(const PowerContext& ctx, Code x);

nlohmann::json group_to_json(const FiniteGroup& G);
nlohmann::json colored_group_to_json(const ColoredGroup& CG);
ColoredGroup colored_group_from_json(const nlohmann::json& j);

}  // namespace schurpower
