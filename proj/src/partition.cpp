#include "schurpower/partition.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace schurpower {

Partition Partition::from_labels(std::span<const std::uint32_t> labels) {
  Partition P;
  const std::size_t n = labels.size();
  P.class_of_.resize(n);
  std::uint32_t max_label = 0;
  for (auto l : labels) max_label = std::max(max_label, l);
  const ClassId none = ~ClassId{0};
  std::vector<ClassId> remap(n ? std::size_t{max_label} + 1 : 0, none);
  ClassId next = 0;
  for (std::size_t x = 0; x < n; ++x) {
    ClassId& r = remap[labels[x]];
    if (r == none) r = next++;
    P.class_of_[x] = r;
  }
  P.offsets_.assign(std::size_t{next} + 1, 0);
  for (auto c : P.class_of_) ++P.offsets_[c + 1];
  std::partial_sum(P.offsets_.begin(), P.offsets_.end(), P.offsets_.begin());
  P.flat_.resize(n);
  std::vector<std::uint32_t> fill(P.offsets_.begin(), P.offsets_.end() - 1);
  for (std::size_t x = 0; x < n; ++x) P.flat_[fill[P.class_of_[x]]++] = static_cast<Code>(x);
  return P;
}

Partition Partition::discrete(std::size_t n) {
  std::vector<std::uint32_t> l(n);
  std::iota(l.begin(), l.end(), 0u);
  return from_labels(l);
}

Partition Partition::single_class(std::size_t n) {
  return from_labels(std::vector<std::uint32_t>(n, 0));
}

Partition meet(const Partition& P, const Partition& Q) {
  if (P.domain_size() != Q.domain_size()) throw InvalidInput("meet: domain mismatch");
  const std::size_t n = P.domain_size();
  std::vector<std::uint64_t> key(n);
  for (std::size_t x = 0; x < n; ++x)
    key[x] = (std::uint64_t{P.class_of(x)} << 32) | Q.class_of(x);
  std::vector<std::uint64_t> sorted = key;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::uint32_t> l(n);
  for (std::size_t x = 0; x < n; ++x)
    l[x] = static_cast<std::uint32_t>(std::lower_bound(sorted.begin(), sorted.end(), key[x]) - sorted.begin());
  return Partition::from_labels(l);
}

long refinement_witness(const Partition& P, const Partition& Q) {
  if (P.domain_size() != Q.domain_size()) throw InvalidInput("partition comparison: domain mismatch");
  for (ClassId c = 0; c < Q.num_classes(); ++c) {
    auto mem = Q.members(c);
    const ClassId p = P.class_of(mem[0]);
    for (Code x : mem)
      if (P.class_of(x) != p) return static_cast<long>(c);
  }
  return -1;
}

bool is_coarser_equal(const Partition& P, const Partition& Q) { return refinement_witness(P, Q) < 0; }

Code project_code(const PowerContext& ctx, Code x, std::span<const std::size_t> K) {
  Code y = 0, s = 1;
  for (std::size_t i : K) {
    y += ctx.digit(x, i) * s;
    s *= static_cast<Code>(ctx.factor(i).order());
  }
  return y;
}

std::shared_ptr<const PowerContext> sub_context(const PowerContext& ctx, std::span<const std::size_t> K) {
  if (K.empty()) throw InvalidInput("projection: empty index set");
  std::vector<std::shared_ptr<const FiniteGroup>> f;
  for (std::size_t t = 0; t < K.size(); ++t) {
    if (K[t] >= ctx.arity()) throw InvalidInput("projection: index out of range");
    if (t && K[t] <= K[t - 1]) throw InvalidInput("projection: indices must be sorted and distinct");
    f.push_back(ctx.factors()[K[t]]);
  }
  return std::make_shared<const PowerContext>(std::move(f), std::uint64_t{ctx.size()});
}

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

ProjectionResult project(const Partition& P, const PowerContext& ctx, std::span<const std::size_t> K) {
  if (P.domain_size() != ctx.size()) throw InvalidInput("project: partition does not live on this context");
  ProjectionResult r;
  r.target = sub_context(ctx, K);
  const Code M = r.target->size();
  // Image of each class, then group classes with identical images.
  std::map<std::vector<Code>, std::uint32_t> image_ids;
  std::vector<std::vector<Code>> images;
  std::vector<char> mark(M, 0);
  for (ClassId c = 0; c < P.num_classes(); ++c) {
    std::vector<Code> img;
    for (Code x : P.members(c)) {
      const Code y = project_code(ctx, x, K);
      if (!mark[y]) {
        mark[y] = 1;
        img.push_back(y);
      }
    }
    for (Code y : img) mark[y] = 0;
    std::sort(img.begin(), img.end());
    if (image_ids.emplace(img, static_cast<std::uint32_t>(images.size())).second) images.push_back(std::move(img));
  }
  const std::uint32_t none = ~0u;
  std::vector<std::uint32_t> owner(M, none);
  UnionFind uf(images.size());
  for (std::uint32_t g = 0; g < images.size(); ++g)
    for (Code y : images[g]) {
      if (owner[y] == none) {
        owner[y] = g;
      } else {
        r.partial_overlap = true;
        uf.unite(owner[y], g);
      }
    }
  std::vector<std::uint32_t> labels(M);
  for (Code y = 0; y < M; ++y) labels[y] = uf.find(owner[y]);
  r.partition = Partition::from_labels(labels);
  return r;
}

std::vector<Code> coordinate_map_image(const PowerContext& ctx, std::span<const Code> X,
                                       std::span<const std::uint8_t> sigma) {
  if (sigma.size() != ctx.arity()) throw InvalidInput("coordinate map: wrong length");
  for (auto s : sigma)
    if (s >= ctx.arity()) throw InvalidInput("coordinate map: value out of range");
  std::vector<Code> out;
  out.reserve(X.size());
  for (Code x : X) out.push_back(ctx.apply_map(x, sigma));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Code> full_preimage(const PowerContext& ctx, std::span<const std::size_t> K, std::span<const Code> Y) {
  auto sub = sub_context(ctx, K);
  std::vector<char> in(sub->size(), 0);
  for (Code y : Y) {
    if (y >= sub->size()) throw InvalidInput("full_preimage: code out of range");
    in[y] = 1;
  }
  std::vector<Code> out;
  for (Code x = 0; x < ctx.size(); ++x)
    if (in[project_code(ctx, x, K)]) out.push_back(x);
  return out;
}

nlohmann::json partition_to_json(const Partition& P) {
  return {{"domain", P.domain_size()}, {"class_of", P.labels()}};
}

Partition partition_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("domain") || !j.contains("class_of"))
    throw InvalidInput("partition file: expected 'domain' and 'class_of'");
  auto labels = j.at("class_of").get<std::vector<std::uint32_t>>();
  if (labels.size() != j.at("domain").get<std::size_t>())
    throw InvalidInput("partition file: 'class_of' length differs from 'domain'");
  return Partition::from_labels(labels);
}

}  // namespace schurpower
