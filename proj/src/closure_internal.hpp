#pragma once

#include <algorithm>
#include <vector>

#include "schurpower/partition.hpp"
#include "schurpower/sring.hpp"

namespace schurpower::detail {

// Computes, for a fixed g, the list of (Y, Z, #{(y,z) in Y x Z : yz = g})
// over all class pairs with a nonzero count, sorted by (Y, Z) and flattened.
class SigBuilder {
 public:
  SigBuilder(const PowerContext& ctx, const Partition& P) : ctx_(ctx), P_(P), cnt_(P.num_classes(), 0) {
    offset_.resize(ctx.arity());
    std::size_t s = 0;
    for (std::size_t i = 0; i < ctx.arity(); ++i) {
      offset_[i] = s;
      s += ctx.factor(i).order();
    }
    table_.resize(s);
  }

  void build(Code g, std::vector<std::uint32_t>& out) {
    const std::size_t m = ctx_.arity();
    for (std::size_t i = 0; i < m; ++i) {
      const FiniteGroup& f = ctx_.factor(i);
      const Element gi = ctx_.digit(g, i);
      const Code st = ctx_.stride(i);
      for (Element a = 0; a < f.order(); ++a) table_[offset_[i] + a] = f.mul(f.inv(a), gi) * st;
    }
    out.clear();
    const auto& labels = P_.labels();
    for (ClassId Y = 0; Y < P_.num_classes(); ++Y) {
      touched_.clear();
      for (Code y : P_.members(Y)) {
        const std::uint8_t* d = ctx_.digits(y);
        Code z = 0;
        for (std::size_t i = 0; i < m; ++i) z += table_[offset_[i] + d[i]];
        const ClassId c = labels[z];
        if (cnt_[c]++ == 0) touched_.push_back(c);
      }
      std::sort(touched_.begin(), touched_.end());
      for (ClassId Z : touched_) {
        out.push_back(Y);
        out.push_back(Z);
        out.push_back(cnt_[Z]);
        cnt_[Z] = 0;
      }
    }
  }

 private:
  const PowerContext& ctx_;
  const Partition& P_;
  std::vector<std::uint32_t> cnt_;
  std::vector<ClassId> touched_;
  std::vector<std::size_t> offset_;
  std::vector<Code> table_;
};

Partition split_identity(const Partition& P);
Partition inverse_split(const PowerContext& ctx, const Partition& P);

// Applies a componentwise group map (given on the base group) to a tuple.
inline Code apply_aut(const PowerContext& ctx, const std::vector<Element>& a, Code x) {
  Code z = 0;
  const std::uint8_t* d = ctx.digits(x);
  for (std::size_t i = 0; i < ctx.arity(); ++i) z += a[d[i]] * ctx.stride(i);
  return z;
}

// One product-split round on orbit representatives; returns the refined
// partition.  `P` must already be inverse-split and respect `sym`.
class SymmetricRound {
 public:
  SymmetricRound(const PowerContext& ctx, const Symmetry& sym);
  Partition refine(const Partition& P, unsigned threads) const;
  // Empty string if P respects the symmetry, else a description.
  std::string check_invariance(const Partition& P) const;

 private:
  const PowerContext& ctx_;
  const Symmetry& sym_;
  std::vector<std::vector<std::uint8_t>> gens_;
  std::vector<std::uint32_t> point_of_;
  std::vector<Code> point_tuple_;
  std::vector<std::uint32_t> rep_of_;
  std::vector<std::uint8_t> tau_;
};

}  // namespace schurpower::detail
