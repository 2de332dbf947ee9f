#include "schurpower/sring.hpp"

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <tuple>
#include <map>
#include <mutex>
#include <numeric>
#include <set>

#include "closure_internal.hpp"
#include "schurpower/autiso.hpp"

namespace schurpower {

namespace detail {
struct TensorCache {
  std::once_flag once;
  std::unique_ptr<StructureConstantTensor> tensor;
};
}  // namespace detail

std::uint32_t StructureConstantTensor::get(ClassId x, ClassId y, ClassId z) const {
  Entry key{x, y, z, 0};
  auto it = std::lower_bound(entries.begin(), entries.end(), key, [](const Entry& a, const Entry& b) {
    return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
  });
  if (it != entries.end() && it->x == x && it->y == y && it->z == z) return it->c;
  return 0;
}

SRing::SRing(std::shared_ptr<const PowerContext> carrier, Partition basic)
    : carrier_(std::move(carrier)), basic_(std::move(basic)), cache_(std::make_shared<detail::TensorCache>()) {
  if (basic_.domain_size() != carrier_->size()) throw InvalidInput("S-ring: partition does not match carrier");
}

ClassId SRing::inverse_class(ClassId c) const { return basic_.class_of(carrier_->inv(basic_.members(c)[0])); }

const StructureConstantTensor& SRing::constants() const {
  std::call_once(cache_->once, [&] {
    cache_->tensor = std::make_unique<StructureConstantTensor>(structure_constants(*this));
  });
  return *cache_->tensor;
}

AxiomReport verify_axioms(const PowerContext& ctx, const Partition& P, const Symmetry* sym) {
  AxiomReport r;
  if (P.domain_size() != ctx.size()) throw InvalidInput("verify_axioms: partition does not match carrier");
  if (P.class_size(P.class_of(0)) != 1) {
    r.s1 = false;
    r.witness = "S1: identity shares class " + std::to_string(P.class_of(0)) + " with element " +
                std::to_string(P.members(P.class_of(0))[1]);
  }
  const std::size_t k = P.num_classes();
  std::vector<ClassId> inv_of(k);
  for (ClassId c = 0; c < k; ++c) inv_of[c] = P.class_of(ctx.inv(P.members(c)[0]));
  for (Code x = 0; x < ctx.size() && r.s2; ++x)
    if (P.class_of(ctx.inv(x)) != inv_of[P.class_of(x)]) {
      r.s2 = false;
      if (r.witness.empty())
        r.witness = "S2: inverses of class " + std::to_string(P.class_of(x)) + " spread over several classes (" +
                    std::to_string(x) + ")";
    }
  if (sym) {
    detail::SymmetricRound round(ctx, *sym);
    if (auto why = round.check_invariance(P); !why.empty())
      throw InvalidInput("verify_axioms: symmetry hint rejected: " + why);
    Partition Q = round.refine(P, 1);
    if (Q.num_classes() != k) {
      r.s3 = false;
      const long c = refinement_witness(Q, P);
      if (r.witness.empty())
        r.witness = "S3: representation counts differ inside class " + std::to_string(c);
    }
    return r;
  }
  detail::SigBuilder sb(ctx, P);
  std::vector<std::uint32_t> ref, cur;
  for (ClassId Z = 0; Z < k && r.s3; ++Z) {
    auto mem = P.members(Z);
    sb.build(mem[0], ref);
    for (std::size_t i = 1; i < mem.size(); ++i) {
      sb.build(mem[i], cur);
      if (cur != ref) {
        r.s3 = false;
        if (r.witness.empty())
          r.witness = "S3: elements " + std::to_string(mem[0]) + " and " + std::to_string(mem[i]) + " of class " +
                      std::to_string(Z) + " have different representation counts";
        break;
      }
    }
  }
  return r;
}

SRing schur_closure(std::shared_ptr<const PowerContext> ctx, const Partition& initial, const ClosureOptions& opt) {
  Partition P = schur_closure_partition(*ctx, initial, opt);
  return SRing(std::move(ctx), std::move(P));
}

Partition tensor_power_partition(const PowerContext& ctx) {
  std::vector<std::uint32_t> l(ctx.size());
  for (Code x = 0; x < ctx.size(); ++x) {
    std::uint32_t pattern = 0;
    for (std::size_t i = 0; i < ctx.arity(); ++i)
      if (ctx.digit(x, i) == 0) pattern |= 1u << i;
    l[x] = pattern;
  }
  return Partition::from_labels(l);
}

Partition am_initial_partition(const PowerContext& ctx, const std::vector<std::uint32_t>* coloring) {
  const std::size_t m = ctx.arity();
  if (m > 24) throw InvalidInput("arity too large for support patterns");
  std::vector<std::uint32_t> l(ctx.size());
  const std::uint32_t patterns = 1u << m;
  for (Code x = 0; x < ctx.size(); ++x) {
    std::uint32_t pattern = 0;
    bool diag = true;
    for (std::size_t i = 0; i < m; ++i) {
      if (ctx.digit(x, i) == 0) pattern |= 1u << i;
      if (ctx.digit(x, i) != ctx.digit(x, 0)) diag = false;
    }
    l[x] = pattern;
    if (diag) l[x] = patterns + (coloring ? (*coloring)[ctx.digit(x, 0)] : 0);
  }
  return Partition::from_labels(l);
}

SRing compute_Am(const FiniteGroup& G, std::size_t m, const std::optional<ColoredGroup>& coloring,
                 const ClosureOptions& opt, ClosureStats* stats) {
  if (coloring && !(coloring->group == G)) throw InvalidInput("compute_Am: coloring belongs to another group");
  auto ctx = power(G, m);
  Partition init = am_initial_partition(*ctx, coloring ? &coloring->coloring : nullptr);
  Symmetry sym;
  try {
    SearchOptions so;
    so.max_order = kMaxGroupOrder;
    so.max_elements = 20000;
    auto aut = automorphism_group(coloring ? *coloring : monochrome(G), so);
    sym.automorphisms = aut.elements;
  } catch (const BudgetExceeded&) {
    // Too many automorphisms to list; coordinate symmetry alone is exact too.
    sym.automorphisms.clear();
  }
  Partition P = schur_closure_symmetric(*ctx, init, sym, opt, stats);
  return SRing(ctx, std::move(P));
}

StructureConstantTensor structure_constants(const SRing& A) {
  const PowerContext& ctx = A.carrier();
  const Partition& P = A.partition();
  StructureConstantTensor t;
  t.rank = P.num_classes();
  for (ClassId c = 0; c < t.rank; ++c) t.class_sizes.push_back(P.class_size(c));
  detail::SigBuilder sb(ctx, P);
  std::vector<std::uint32_t> ref, cur;
  for (ClassId Z = 0; Z < t.rank; ++Z) {
    auto mem = P.members(Z);
    sb.build(mem[0], ref);
    for (std::size_t i = 1; i < mem.size(); ++i) {
      sb.build(mem[i], cur);
      if (cur != ref)
        throw InvalidInput("structure constants: S3 fails in class " + std::to_string(Z) + " at elements " +
                           std::to_string(mem[0]) + ", " + std::to_string(mem[i]));
    }
    for (std::size_t j = 0; j < ref.size(); j += 3) t.entries.push_back({ref[j], ref[j + 1], Z, ref[j + 2]});
  }
  std::sort(t.entries.begin(), t.entries.end(), [](const auto& a, const auto& b) {
    return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
  });
  return t;
}

bool is_subgroup(const PowerContext& ctx, std::span<const Code> H) {
  if (H.empty()) return false;
  std::vector<char> in(ctx.size(), 0);
  for (Code h : H) in[h] = 1;
  if (!in[0]) return false;
  for (Code a : H) {
    if (!in[ctx.inv(a)]) return false;
    for (Code b : H)
      if (!in[ctx.mul(a, b)]) return false;
  }
  return true;
}

bool is_union_of_classes(const Partition& P, std::span<const Code> S) {
  std::vector<char> in(P.domain_size(), 0);
  std::vector<std::size_t> hit(P.num_classes(), 0);
  for (Code s : S)
    if (!in[s]) {
      in[s] = 1;
      ++hit[P.class_of(s)];
    }
  for (ClassId c = 0; c < P.num_classes(); ++c)
    if (hit[c] && hit[c] != P.class_size(c)) return false;
  return true;
}

std::uint64_t n_of(const SRing& A, ClassId X, std::span<const Code> H) {
  const PowerContext& ctx = A.carrier();
  if (!is_subgroup(ctx, H) || !is_union_of_classes(A.partition(), H))
    throw InvalidInput("n_of: H is not an A-subgroup");
  // Formula through structure constants.
  std::set<ClassId> in_h;
  for (Code h : H) in_h.insert(A.class_of(h));
  const auto& t = A.constants();
  std::uint64_t by_constants = 0;
  for (ClassId Y : in_h) by_constants += t.get(Y, X, X);
  // Direct count |X ∩ Hx|, which must not depend on x.
  auto mem = A.partition().members(X);
  std::optional<std::uint64_t> direct;
  for (Code x : mem) {
    std::uint64_t c = 0;
    for (Code h : H)
      if (A.class_of(ctx.mul(h, x)) == X) ++c;
    if (direct && *direct != c)
      throw InternalError("n_of: |X ∩ Hx| varies over X (class " + std::to_string(X) + ")");
    direct = c;
  }
  if (*direct != by_constants)
    throw InternalError("n_of: formulas disagree (" + std::to_string(by_constants) + " vs " +
                        std::to_string(*direct) + ")");
  return by_constants;
}

SRing quotient_sring(const SRing& A, std::span<const Code> H) {
  const PowerContext& ctx = A.carrier();
  if (!is_subgroup(ctx, H)) throw InvalidInput("quotient: H is not a subgroup");
  if (!is_union_of_classes(A.partition(), H)) throw InvalidInput("quotient: H is not an A-group");
  std::vector<char> in(ctx.size(), 0);
  for (Code h : H) in[h] = 1;
  for (Code g = 0; g < ctx.size(); ++g)
    for (Code h : H)
      if (!in[ctx.mul(ctx.mul(g, h), ctx.inv(g))]) throw InvalidInput("quotient: H is not normal");
  const std::size_t q = ctx.size() / H.size();
  if (q > kMaxGroupOrder) throw InvalidInput("quotient: order " + std::to_string(q) + " exceeds 256");
  const std::uint32_t none = ~0u;
  std::vector<std::uint32_t> coset(ctx.size(), none);
  std::vector<Code> rep;
  for (Code x = 0; x < ctx.size(); ++x) {
    if (coset[x] != none) continue;
    const auto id = static_cast<std::uint32_t>(rep.size());
    rep.push_back(x);
    for (Code h : H) coset[ctx.mul(h, x)] = id;
  }
  std::vector<Element> table(q * q);
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = 0; b < q; ++b) table[a * q + b] = coset[ctx.mul(rep[a], rep[b])];
  auto Q = std::make_shared<const FiniteGroup>(FiniteGroup::from_flat_table(q, std::move(table)));
  auto qctx = std::make_shared<const PowerContext>(std::vector<std::shared_ptr<const FiniteGroup>>{Q});
  // Images of basic sets; merge overlapping ones.
  std::vector<std::uint32_t> parent(A.rank());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::vector<std::uint32_t> owner(q, none);
  for (Code x = 0; x < ctx.size(); ++x) {
    const auto c = coset[x];
    if (owner[c] == none) owner[c] = A.class_of(x);
    else {
      auto a = find(owner[c]), b = find(A.class_of(x));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<std::uint32_t> l(q);
  for (std::size_t c = 0; c < q; ++c) l[c] = find(owner[c]);
  return SRing(qctx, Partition::from_labels(l));
}

SRing project_sring(const SRing& A, std::size_t k) {
  const PowerContext& ctx = A.carrier();
  if (k < 1 || k > ctx.arity()) throw InvalidInput("project_sring: k out of range");
  if (k == ctx.arity()) return A;
  // Kernel G_{K'}: tuples that are trivial on the first k coordinates.
  std::vector<Code> kernel;
  for (Code x = 0; x < ctx.size(); ++x) {
    bool triv = true;
    for (std::size_t i = 0; i < k && triv; ++i) triv = ctx.digit(x, i) == 0;
    if (triv) kernel.push_back(x);
  }
  if (!is_union_of_classes(A.partition(), kernel))
    throw InvalidInput("project_sring: kernel of the projection is not an A-group");
  std::vector<std::size_t> K(k);
  std::iota(K.begin(), K.end(), std::size_t{0});
  auto pr = project(A.partition(), ctx, K);
  if (pr.partial_overlap) throw InternalError("project_sring: images of basic sets overlap");
  return SRing(pr.target, std::move(pr.partition));
}

SRing tensor_product(const SRing& A, const SRing& B) {
  auto f = A.carrier().factors();
  for (const auto& g : B.carrier().factors()) f.push_back(g);
  std::uint64_t N = std::uint64_t{A.carrier().size()} * B.carrier().size();
  if (N > default_domain_cap()) throw CapExceeded("tensor_product: domain " + std::to_string(N) + " exceeds cap");
  auto ctx = std::make_shared<const PowerContext>(std::move(f));
  const Code na = A.carrier().size();
  std::vector<std::uint32_t> l(ctx->size());
  for (Code x = 0; x < ctx->size(); ++x)
    l[x] = A.class_of(x % na) + static_cast<std::uint32_t>(A.rank()) * B.class_of(x / na);
  return SRing(ctx, Partition::from_labels(l));
}

namespace {

std::string index_set_name(const char* head, std::uint32_t mask, std::size_t m) {
  std::string s = std::string(head) + "_{";
  bool first = true;
  for (std::size_t i = 0; i < m; ++i)
    if (mask >> i & 1) {
      if (!first) s += ",";
      s += std::to_string(i);
      first = false;
    }
  return s + "}";
}

}  // namespace

bool DistinguishedSubsets::all_ok() const {
  for (const auto& s : G_K)
    if (!s.is_union_of_classes || !s.is_subgroup) return false;
  for (const auto& s : D_K)
    if (!s.is_union_of_classes || !s.is_subgroup) return false;
  for (const auto& s : X_ijk)
    if (!s.is_union_of_classes) return false;
  return true;
}

DistinguishedSubsets distinguished_subsets(const SRing& A) {
  const PowerContext& ctx = A.carrier();
  const FiniteGroup& G = ctx.base();
  const std::size_t m = ctx.arity();
  if (m > 12) throw CapExceeded("distinguished_subsets: arity above 12");
  DistinguishedSubsets out;
  auto finish = [&](DistinguishedSet& s, bool subgroup_test) {
    s.is_union_of_classes = is_union_of_classes(A.partition(), s.members);
    if (subgroup_test) s.is_subgroup = is_subgroup(ctx, s.members);
  };
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    DistinguishedSet g{index_set_name("G", mask, m), {}, false, false};
    DistinguishedSet d{index_set_name("D", mask, m), {}, false, false};
    for (Code x = 0; x < ctx.size(); ++x) {
      bool in_g = true, in_d = true;
      Element first = 0;
      bool seen = false;
      for (std::size_t i = 0; i < m; ++i) {
        const Element xi = ctx.digit(x, i);
        if (!(mask >> i & 1)) {
          if (xi != 0) in_g = false;
        } else {
          if (seen && xi != first) in_d = false;
          first = seen ? first : xi;
          seen = true;
        }
      }
      if (in_g) g.members.push_back(x);
      if (in_d) d.members.push_back(x);
    }
    finish(g, true);
    finish(d, true);
    out.G_K.push_back(std::move(g));
    out.D_K.push_back(std::move(d));
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k) {
        DistinguishedSet s{"X_{" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + "}",
                           {}, false, false};
        for (Code x = 0; x < ctx.size(); ++x)
          if (G.mul(ctx.digit(x, i), ctx.digit(x, j)) == ctx.digit(x, k)) s.members.push_back(x);
        finish(s, false);
        out.X_ijk.push_back(std::move(s));
      }
  return out;
}

bool word_constancy_check(const SRing& A, ClassId X, std::size_t l, const Word& w) {
  const PowerContext& ctx = A.carrier();
  const FiniteGroup& G = ctx.base();
  const std::size_t m = ctx.arity();
  std::size_t k = 0;
  for (int letter : w) {
    if (letter == 0) throw InvalidInput("word: letter 0 is not allowed");
    k = std::max<std::size_t>(k, static_cast<std::size_t>(std::abs(letter)));
  }
  if (m < 3 || k + 2 > m) throw InvalidInput("word: needs k <= m - 2");
  if (l < k || l >= m) throw InvalidInput("word: target coordinate must come after the letters");
  std::optional<bool> value;
  Code first = 0;
  for (Code x : A.partition().members(X)) {
    Element v = 0;
    for (int letter : w) {
      const Element a = ctx.digit(x, static_cast<std::size_t>(std::abs(letter)) - 1);
      v = G.mul(v, letter > 0 ? a : G.inv(a));
    }
    const bool holds = v == ctx.digit(x, l);
    if (value && *value != holds)
      throw InternalError("word predicate not constant on class " + std::to_string(X) + ": tuples " +
                          std::to_string(first) + " and " + std::to_string(x));
    if (!value) first = x;
    value = holds;
  }
  return *value;
}

nlohmann::json carrier_to_json(const PowerContext& ctx) {
  if (ctx.homogeneous()) return {{"base", group_to_json(ctx.base())}, {"arity", ctx.arity()}};
  nlohmann::json f = nlohmann::json::array();
  for (const auto& g : ctx.factors()) f.push_back(group_to_json(*g));
  return {{"factors", f}};
}

std::shared_ptr<const PowerContext> carrier_from_json(const nlohmann::json& j) {
  if (j.contains("base")) {
    auto G = colored_group_from_json(j.at("base")).group;
    return power(G, j.at("arity").get<std::size_t>());
  }
  if (!j.contains("factors")) throw InvalidInput("carrier: expected 'base'/'arity' or 'factors'");
  std::vector<std::shared_ptr<const FiniteGroup>> f;
  for (const auto& g : j.at("factors"))
    f.push_back(std::make_shared<const FiniteGroup>(colored_group_from_json(g).group));
  return std::make_shared<const PowerContext>(std::move(f));
}

nlohmann::json sring_to_json(const SRing& A, bool with_constants) {
  nlohmann::json j = partition_to_json(A.partition());
  j["carrier"] = carrier_to_json(A.carrier());
  j["rank"] = A.rank();
  if (with_constants) {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& e : A.constants().entries) c.push_back({e.x, e.y, e.z, e.c});
    j["structure_constants"] = c;
  }
  return j;
}

SRing sring_from_json(const nlohmann::json& j) {
  auto ctx = carrier_from_json(j.at("carrier"));
  SRing A(ctx, partition_from_json(j));
  if (j.contains("rank") && j.at("rank").get<std::size_t>() != A.rank())
    throw InvalidInput("S-ring file: 'rank' does not match 'class_of'");
  return A;
}

}  // namespace schurpower
