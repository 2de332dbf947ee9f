#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "schurpower/groups.hpp"

namespace schurpower {

using ClassId = std::uint32_t;

// Canonical partition of [0, N): class ids are ordered by minimal member.
class Partition {
 public:
  Partition() = default;

  // Any labelling; ids are renumbered into canonical form.
  static Partition from_labels(std::span<const std::uint32_t> labels);
  static Partition discrete(std::size_t n);
  static Partition single_class(std::size_t n);

  std::size_t domain_size() const { return class_of_.size(); }
  std::size_t num_classes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  ClassId class_of(Code x) const { return class_of_[x]; }
  const std::vector<ClassId>& labels() const { return class_of_; }
  std::span<const Code> members(ClassId c) const {
    return {flat_.data() + offsets_[c], flat_.data() + offsets_[c + 1]};
  }
  std::size_t class_size(ClassId c) const { return offsets_[c + 1] - offsets_[c]; }
  bool is_discrete() const { return num_classes() == domain_size(); }

  bool operator==(const Partition& o) const { return class_of_ == o.class_of_; }

 private:
  std::vector<ClassId> class_of_;
  std::vector<std::uint32_t> offsets_;
  std::vector<Code> flat_;
};

Partition meet(const Partition& P, const Partition& Q);

// True iff every class of P is a union of classes of Q (Q refines P).
bool is_coarser_equal(const Partition& P, const Partition& Q);

// Index of the first class of Q that meets two classes of P, or -1.
long refinement_witness(const Partition& P, const Partition& Q);

struct ProjectionResult {
  Partition partition;
  std::shared_ptr<const PowerContext> target;
  // Some two class images overlapped without being equal and were merged.
  bool partial_overlap = false;
};

// K: sorted 0-based coordinate indices.
ProjectionResult project(const Partition& P, const PowerContext& ctx, std::span<const std::size_t> K);

// Code of pr_K(x) in the context of the K-coordinates.
Code project_code(const PowerContext& ctx, Code x, std::span<const std::size_t> K);
std::shared_ptr<const PowerContext> sub_context(const PowerContext& ctx, std::span<const std::size_t> K);

// {x^σ : x ∈ X}, sorted and deduplicated.
std::vector<Code> coordinate_map_image(const PowerContext& ctx, std::span<const Code> X,
                                       std::span<const std::uint8_t> sigma);

// {x : pr_K(x) ∈ Y}, sorted.
std::vector<Code> full_preimage(const PowerContext& ctx, std::span<const std::size_t> K,
                                std::span<const Code> Y);

nlohmann::json partition_to_json(const Partition& P);
// Accepts {"domain", "class_of"}; extra keys are ignored.
Partition partition_from_json(const nlohmann::json& j);

}  // namespace schurpower
