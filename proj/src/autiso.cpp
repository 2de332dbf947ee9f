#include "schurpower/autiso.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <array>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace schurpower {

namespace {

struct PermHash {
  std::size_t operator()(const Perm& p) const {
    std::size_t h = 1469598103934665603ull;
    for (auto v : p) h = (h ^ v) * 1099511628211ull;
    return h;
  }
};

Perm compose(const Perm& p, const Perm& q) {  // apply p, then q
  Perm r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = q[p[i]];
  return r;
}

Perm identity_perm(std::size_t n) {
  Perm p(n);
  std::iota(p.begin(), p.end(), 0u);
  return p;
}

}  // namespace

PermutationGroup permutation_group_from_generators(std::size_t degree, std::vector<Perm> gens,
                                                   std::size_t max_elements) {
  PermutationGroup G;
  G.degree = degree;
  for (const auto& g : gens) {
    if (g.size() != degree) throw InvalidInput("permutation group: generator of wrong degree");
    std::vector<char> seen(degree, 0);
    for (auto v : g) {
      if (v >= degree || seen[v]) throw InvalidInput("permutation group: generator is not a bijection");
      seen[v] = 1;
    }
  }
  std::unordered_set<Perm, PermHash> seen;
  std::vector<Perm> queue{identity_perm(degree)};
  seen.insert(queue[0]);
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (const auto& g : gens) {
      Perm p = compose(queue[i], g);
      if (seen.insert(p).second) {
        if (seen.size() > max_elements)
          throw BudgetExceeded("permutation group: more than " + std::to_string(max_elements) + " elements");
        queue.push_back(std::move(p));
      }
    }
  std::sort(queue.begin(), queue.end());
  G.elements = std::move(queue);
  G.generators = std::move(gens);
  return G;
}

std::vector<Element> greedy_generators(const FiniteGroup& G) {
  std::vector<Element> gens;
  std::vector<Element> H{0};
  while (H.size() < G.order()) {
    std::vector<char> in(G.order(), 0);
    for (auto h : H) in[h] = 1;
    Element best = 0;
    std::vector<Element> best_sub;
    // <H,g> depends only on <g>; the first generator of each cyclic subgroup
    // stands for the rest, which keeps the tie-break unchanged.
    std::vector<char> tried(G.order(), 0);
    for (Element g = 1; g < G.order(); ++g) {
      if (in[g] || tried[g]) continue;
      const std::size_t ord = G.element_order(g);
      Element p = g;
      for (std::size_t k = 1; k <= ord; ++k, p = G.mul(p, g))
        if (std::gcd(k, ord) == 1) tried[p] = 1;
      auto trial = gens;
      trial.push_back(g);
      auto sub = generated_subgroup(G, trial);
      if (sub.size() > best_sub.size()) {
        best = g;
        best_sub = std::move(sub);
      }
    }
    gens.push_back(best);
    H = std::move(best_sub);
  }
  return gens;
}

namespace {

// Backtracking over images of a greedy generating sequence.  Calls
// fn(f) for every color-preserving isomorphism A -> B until fn returns false.
class IsoEnumerator {
 public:
  IsoEnumerator(const ColoredGroup& A, const ColoredGroup& B, const SearchOptions& opt, SearchStats* stats)
      : A_(A), B_(B), opt_(opt), stats_(stats), n_(A.group.order()) {}

  // Only maps sending the i-th greedy generator to images[i] are visited.
  void force_prefix(std::vector<Element> images) { forced_ = std::move(images); }

  template <class Fn>
  void run(Fn&& fn) {
    if (B_.group.order() != n_) return;
    if (n_ > opt_.max_order)
      throw BudgetExceeded("group order " + std::to_string(n_) + " above search bound " +
                           std::to_string(opt_.max_order));
    if (A_.coloring[0] != B_.coloring[0]) return;
    // Invariants and generators survive across runs with different prefixes.
    if (inv_a_.empty()) {
      inv_a_ = invariants(A_);
      inv_b_ = &A_ == &B_ ? inv_a_ : invariants(B_);
      auto sa = inv_a_, sb = inv_b_;
      std::sort(sa.begin(), sa.end());
      std::sort(sb.begin(), sb.end());
      same_invariants_ = sa == sb;
      gens_ = greedy_generators(A_.group);
    }
    if (!same_invariants_) return;
    const auto& inv_a = inv_a_;
    const auto& inv_b = inv_b_;
    cand_.assign(gens_.size(), {});
    for (std::size_t i = 0; i < gens_.size(); ++i)
      for (Element h = 0; h < n_; ++h)
        if (inv_b[h] == inv_a[gens_[i]] && (i >= forced_.size() || h == forced_[i])) cand_[i].push_back(h);
    f_.assign(n_, kNone);
    used_.assign(n_, 0);
    f_[0] = 0;
    used_[0] = 1;
    mapped_.assign(1, 0);
    dfs(0, fn);
  }

 private:
  static constexpr Element kNone = ~Element{0};

  // Order, color, and centralizer size of each element.
  static std::vector<std::array<std::uint32_t, 3>> invariants(const ColoredGroup& C) {
    const FiniteGroup& G = C.group;
    std::vector<std::array<std::uint32_t, 3>> out(G.order());
    for (Element g = 0; g < G.order(); ++g) {
      std::uint32_t cent = 0;
      for (Element h = 0; h < G.order(); ++h) cent += G.mul(g, h) == G.mul(h, g);
      out[g] = {static_cast<std::uint32_t>(G.element_order(g)), C.coloring[g], cent};
    }
    return out;
  }

  bool extend(std::size_t level, Element h, std::size_t& undo_from) {
    const FiniteGroup& GA = A_.group;
    const FiniteGroup& GB = B_.group;
    undo_from = mapped_.size();
    const Element g = gens_[level];
    if (used_[h] || A_.coloring[g] != B_.coloring[h]) return false;
    f_[g] = h;
    used_[h] = 1;
    mapped_.push_back(g);
    for (std::size_t q = 0; q < mapped_.size(); ++q) {
      const Element x = mapped_[q];
      for (std::size_t j = 0; j <= level; ++j) {
        const Element y = GA.mul(x, gens_[j]);
        const Element fy = GB.mul(f_[x], f_[gens_[j]]);
        if (f_[y] == kNone) {
          if (used_[fy] || A_.coloring[y] != B_.coloring[fy]) return false;
          f_[y] = fy;
          used_[fy] = 1;
          mapped_.push_back(y);
        } else if (f_[y] != fy) {
          return false;
        }
      }
    }
    return true;
  }

  void undo(std::size_t from) {
    for (std::size_t q = from; q < mapped_.size(); ++q) {
      used_[f_[mapped_[q]]] = 0;
      f_[mapped_[q]] = kNone;
    }
    mapped_.resize(from);
  }

  template <class Fn>
  bool dfs(std::size_t level, Fn& fn) {
    if (++nodes_ > opt_.node_budget)
      throw BudgetExceeded("isomorphism search: node budget " + std::to_string(opt_.node_budget) + " exhausted");
    if (stats_) stats_->nodes = nodes_;
    if (level == gens_.size()) return fn(f_);
    for (Element h : cand_[level]) {
      std::size_t from;
      const bool ok = extend(level, h, from);
      bool go_on = true;
      if (ok) go_on = dfs(level + 1, fn);
      undo(from);
      if (!go_on) return false;
    }
    return true;
  }

  const ColoredGroup& A_;
  const ColoredGroup& B_;
  const SearchOptions& opt_;
  SearchStats* stats_;
  std::size_t n_;
  std::vector<Element> gens_, forced_;
  std::vector<std::array<std::uint32_t, 3>> inv_a_, inv_b_;
  bool same_invariants_ = false;
  std::vector<std::vector<Element>> cand_;
  Perm f_;
  std::vector<char> used_;
  std::vector<Element> mapped_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

bool is_colored_group_iso(const ColoredGroup& A, const ColoredGroup& B, const Perm& f) {
  const std::size_t n = A.group.order();
  if (B.group.order() != n || f.size() != n) return false;
  std::vector<char> seen(n, 0);
  for (auto v : f) {
    if (v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  for (Element g = 0; g < n; ++g) {
    if (A.coloring[g] != B.coloring[f[g]]) return false;
    for (Element h = 0; h < n; ++h)
      if (f[A.group.mul(g, h)] != B.group.mul(f[g], f[h])) return false;
  }
  return true;
}

AutomorphismGenerators automorphism_generators(const ColoredGroup& CG, const SearchOptions& opt) {
  const FiniteGroup& G = CG.group;
  const std::size_t n = G.order();
  AutomorphismGenerators out;
  if (n > opt.max_order)
    throw BudgetExceeded("group order " + std::to_string(n) + " above search bound " + std::to_string(opt.max_order));
  const auto seq = greedy_generators(G);
  // Level i: the stabilizer of seq[0..i-1].  Walk up from the deepest level;
  // generators found below fix seq[i-1] and earlier, so they act at level i.
  std::vector<Perm> found;
  IsoEnumerator e(CG, CG, opt, nullptr);
  for (std::size_t i = seq.size(); i-- > 0;) {
    std::vector<char> orbit(n, 0);
    std::vector<Element> queue{seq[i]};
    orbit[seq[i]] = 1;
    auto grow = [&] {
      for (std::size_t q = 0; q < queue.size(); ++q)
        for (const auto& a : found)
          if (!orbit[a[queue[q]]]) {
            orbit[a[queue[q]]] = 1;
            queue.push_back(a[queue[q]]);
          }
    };
    grow();
    for (Element h = 1; h < n; ++h) {
      if (orbit[h] || CG.coloring[h] != CG.coloring[seq[i]] || G.element_order(h) != G.element_order(seq[i]))
        continue;
      std::vector<Element> prefix(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(i));
      prefix.push_back(h);
      e.force_prefix(std::move(prefix));
      std::optional<Perm> hit;
      e.run([&](const Perm& f) {
        hit = f;
        return false;
      });
      if (!hit) continue;
      found.push_back(std::move(*hit));
      orbit[h] = 1;
      queue.push_back(h);
      grow();
    }
    out.order *= queue.size();
  }
  out.generators = std::move(found);
  return out;
}

PermutationGroup automorphism_group(const ColoredGroup& CG, const SearchOptions& opt) {
  auto gens = automorphism_generators(CG, opt);
  if (gens.order > opt.max_elements)
    throw BudgetExceeded("automorphism group has " + std::to_string(gens.order) + " elements, more than " +
                         std::to_string(opt.max_elements));
  auto P = permutation_group_from_generators(CG.group.order(), std::move(gens.generators), opt.max_elements);
  if (P.order() != gens.order) throw InternalError("automorphism group: orbit count and closure disagree");
  return P;
}

Partition orbit_partition(const PowerContext& ctx, const std::vector<Perm>& base_automorphisms) {
  std::vector<std::uint32_t> parent(ctx.size());
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (Code x = 0; x < ctx.size(); ++x) {
    const std::uint8_t* d = ctx.digits(x);
    for (const auto& a : base_automorphisms) {
      Code z = 0;
      for (std::size_t i = 0; i < ctx.arity(); ++i) z += a[d[i]] * ctx.stride(i);
      auto r = find(x), t = find(z);
      if (r != t) parent[std::max(r, t)] = std::min(r, t);
    }
  }
  std::vector<std::uint32_t> l(ctx.size());
  for (Code x = 0; x < ctx.size(); ++x) l[x] = find(x);
  return Partition::from_labels(l);
}

SRing cyc_m(const FiniteGroup& G, std::size_t m, const std::optional<ColoredGroup>& coloring,
            const SearchOptions& opt) {
  auto ctx = power(G, m);
  SearchOptions so = opt;
  so.max_order = std::max(so.max_order, kMaxGroupOrder);
  auto aut = automorphism_group(coloring ? *coloring : monochrome(G), so);
  Partition P = orbit_partition(*ctx, aut.elements);
  Symmetry sym{aut.elements, true};
  auto rep = verify_axioms(*ctx, P, &sym);
  if (!rep.ok()) throw InternalError("cyc_m: orbit partition fails the S-ring axioms: " + rep.witness);
  return SRing(ctx, std::move(P));
}

HolReport hol_m_generators(const FiniteGroup& G, std::size_t m, const SearchOptions& opt) {
  auto ctx = power(G, m);
  const Code N = ctx->size();
  if (N > 4096) throw CapExceeded("hol_m_generators: domain above 4096");
  HolReport r;
  SearchOptions so = opt;
  so.max_order = std::max(so.max_order, kMaxGroupOrder);
  auto aut = automorphism_group(monochrome(G), so);
  r.aut_order = aut.order();
  r.expected_order = std::uint64_t{N} * aut.order();
  for (Element g : greedy_generators(G))
    for (std::size_t i = 0; i < m; ++i) {
      const Code y = g * ctx->stride(i);
      Perm p(N);
      for (Code x = 0; x < N; ++x) p[x] = ctx->mul(x, y);
      r.generators.push_back(std::move(p));
    }
  for (const auto& a : aut.generators) {
    Perm p(N);
    for (Code x = 0; x < N; ++x) {
      Code z = 0;
      for (std::size_t i = 0; i < m; ++i) z += a[ctx->digit(x, i)] * ctx->stride(i);
      p[x] = z;
    }
    r.generators.push_back(std::move(p));
  }
  // Orbit of the identity tuple with a transversal, then Schreier generators
  // of its stabilizer.
  const std::uint32_t none = ~0u;
  std::vector<std::uint32_t> via(N, none);
  std::vector<Perm> trans(N);
  trans[0] = identity_perm(N);
  via[0] = 0;
  std::vector<Code> orbit{0};
  for (std::size_t i = 0; i < orbit.size(); ++i)
    for (const auto& s : r.generators) {
      const Code y = s[orbit[i]];
      if (via[y] != none) continue;
      via[y] = 1;
      trans[y] = compose(trans[orbit[i]], s);
      orbit.push_back(y);
    }
  r.orbit_size = orbit.size();
  std::set<Perm> schreier;
  for (Code x : orbit)
    for (const auto& s : r.generators) {
      const Code y = s[x];
      Perm inv_ty(N);
      for (Code t = 0; t < N; ++t) inv_ty[trans[y][t]] = t;
      Perm h = compose(compose(trans[x], s), inv_ty);
      if (h != identity_perm(N)) schreier.insert(std::move(h));
    }
  auto stab = permutation_group_from_generators(N, {schreier.begin(), schreier.end()}, 4 * r.aut_order + 16);
  r.stabilizer_order = stab.order();
  r.order_ok = r.orbit_size * r.stabilizer_order == r.expected_order;
  return r;
}

bool is_sring_automorphism(const Perm& f, const SRing& A) {
  const PowerContext& ctx = A.carrier();
  const Code N = ctx.size();
  if (f.size() != N) return false;
  std::vector<char> seen(N, 0);
  for (auto v : f) {
    if (v >= N || seen[v]) return false;
    seen[v] = 1;
  }
  for (Code y = 0; y < N; ++y) {
    const Code yi = ctx.inv(y), fyi = ctx.inv(f[y]);
    for (Code v = 0; v < N; ++v)
      if (A.class_of(ctx.mul(v, yi)) != A.class_of(ctx.mul(f[v], fyi))) return false;
  }
  return true;
}

namespace {

std::vector<std::size_t> sorted_class_sizes(const SRing& A) {
  std::vector<std::size_t> s;
  for (ClassId c = 0; c < A.rank(); ++c) s.push_back(A.partition().class_size(c));
  std::sort(s.begin(), s.end());
  return s;
}

class CombinatorialSearch {
 public:
  CombinatorialSearch(const SRing& A, const SRing& B, const SearchOptions& opt, SearchStats* stats)
      : A_(A), B_(B), ca_(A.carrier()), cb_(B.carrier()), opt_(opt), stats_(stats), N_(ca_.size()) {}

  std::optional<Perm> run() {
    if (cb_.size() != N_ || A_.rank() != B_.rank() || sorted_class_sizes(A_) != sorted_class_sizes(B_))
      return std::nullopt;
    if (N_ > 4096) throw CapExceeded("combinatorial_iso_search: carrier above 4096 elements");
    phi_.assign(A_.rank(), kNone);
    phi_inv_.assign(B_.rank(), kNone);
    f_.assign(N_, kNone);
    used_.assign(N_, 0);
    order_.resize(N_);
    std::iota(order_.begin(), order_.end(), 0u);
    std::stable_sort(order_.begin() + 1, order_.end(), [&](Code a, Code b) {
      return A_.partition().class_size(A_.class_of(a)) < A_.partition().class_size(A_.class_of(b));
    });
    if (!pair_classes(A_.class_of(0), B_.class_of(0))) return std::nullopt;
    f_[0] = 0;
    used_[0] = 1;
    mapped_.push_back(0);
    if (dfs(1)) return f_;
    return std::nullopt;
  }

 private:
  static constexpr std::uint32_t kNone = ~0u;

  bool pair_classes(ClassId a, ClassId b) {
    if (phi_[a] != kNone) return phi_[a] == b;
    if (phi_inv_[b] != kNone) return false;
    if (A_.partition().class_size(a) != B_.partition().class_size(b)) return false;
    phi_[a] = b;
    phi_inv_[b] = a;
    trail_.push_back(a);
    return true;
  }

  void undo_pairs(std::size_t from) {
    for (std::size_t i = from; i < trail_.size(); ++i) {
      phi_inv_[phi_[trail_[i]]] = kNone;
      phi_[trail_[i]] = kNone;
    }
    trail_.resize(from);
  }

  bool consistent(Code v, Code w) {
    for (Code u : mapped_) {
      const Code fu = f_[u];
      if (!pair_classes(A_.class_of(ca_.mul(v, ca_.inv(u))), B_.class_of(cb_.mul(w, cb_.inv(fu))))) return false;
      if (!pair_classes(A_.class_of(ca_.mul(u, ca_.inv(v))), B_.class_of(cb_.mul(fu, cb_.inv(w))))) return false;
    }
    return true;
  }

  bool dfs(std::size_t depth) {
    if (++nodes_ > opt_.node_budget)
      throw BudgetExceeded("combinatorial isomorphism search: node budget exhausted");
    if (stats_) stats_->nodes = nodes_;
    if (depth == N_) return true;
    const Code v = order_[depth];
    const ClassId target = phi_[A_.class_of(v)];
    for (Code w = 0; w < N_; ++w) {
      if (used_[w]) continue;
      if (target != kNone && B_.class_of(w) != target) continue;
      const std::size_t mark = trail_.size();
      if (consistent(v, w)) {
        f_[v] = w;
        used_[w] = 1;
        mapped_.push_back(v);
        if (dfs(depth + 1)) return true;
        mapped_.pop_back();
        used_[w] = 0;
        f_[v] = kNone;
      }
      undo_pairs(mark);
    }
    return false;
  }

  const SRing& A_;
  const SRing& B_;
  const PowerContext& ca_;
  const PowerContext& cb_;
  const SearchOptions& opt_;
  SearchStats* stats_;
  Code N_;
  std::vector<std::uint32_t> phi_, phi_inv_;
  std::vector<ClassId> trail_;
  Perm f_;
  std::vector<char> used_;
  std::vector<Code> order_, mapped_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

std::optional<Perm> combinatorial_iso_search(const SRing& A, const SRing& B, bool normalized, const SearchOptions& opt,
                                             SearchStats* stats) {
  // A normalized isomorphism exists whenever any does (compose with a right
  // multiplication), so the flag only documents the returned witness.
  (void)normalized;
  CombinatorialSearch s(A, B, opt, stats);
  return s.run();
}

std::optional<std::vector<ClassId>> verify_combinatorial_iso(const SRing& A, const SRing& B, const Perm& f) {
  const PowerContext& ca = A.carrier();
  const PowerContext& cb = B.carrier();
  const Code N = ca.size();
  if (cb.size() != N || f.size() != N) return std::nullopt;
  std::vector<char> seen(N, 0);
  for (auto v : f) {
    if (v >= N || seen[v]) return std::nullopt;
    seen[v] = 1;
  }
  const std::uint32_t none = ~0u;
  std::vector<ClassId> phi(A.rank(), none), back(B.rank(), none);
  for (Code y = 0; y < N; ++y) {
    const Code yi = ca.inv(y), fyi = cb.inv(f[y]);
    for (Code v = 0; v < N; ++v) {
      const ClassId a = A.class_of(ca.mul(v, yi));
      const ClassId b = B.class_of(cb.mul(f[v], fyi));
      if (phi[a] == none && back[b] == none) {
        phi[a] = b;
        back[b] = a;
      } else if (phi[a] != b || back[b] != a) {
        return std::nullopt;
      }
    }
  }
  for (ClassId a = 0; a < A.rank(); ++a)
    if (phi[a] == none || A.partition().class_size(a) != B.partition().class_size(phi[a])) return std::nullopt;
  return phi;
}

namespace {

class AlgebraicSearch {
 public:
  AlgebraicSearch(const SRing& A, const SRing& B, const std::optional<GenuineConstraint>& g,
                  const SearchOptions& opt, SearchStats* stats)
      : A_(A), B_(B), genuine_(g), opt_(opt), stats_(stats), r_(A.rank()) {}

  std::optional<ClassBijection> run() {
    if (B_.rank() != r_ || sorted_class_sizes(A_) != sorted_class_sizes(B_)) return std::nullopt;
    if (genuine_ && genuine_->dist_a.size() != genuine_->dist_b.size())
      throw InvalidInput("algebraic_iso_search: distinguished lists differ in length");
    ta_ = dense(A_.constants());
    tb_ = dense(B_.constants());
    auto ia = invariants(A_, ta_, genuine_ ? &genuine_->dist_a : nullptr);
    auto ib = invariants(B_, tb_, genuine_ ? &genuine_->dist_b : nullptr);
    {
      auto sa = ia, sb = ib;
      std::sort(sa.begin(), sa.end());
      std::sort(sb.begin(), sb.end());
      if (sa != sb) return std::nullopt;
    }
    cand_.assign(r_, {});
    for (ClassId x = 0; x < r_; ++x)
      for (ClassId y = 0; y < r_; ++y)
        if (ia[x] == ib[y]) cand_[x].push_back(y);
    order_.resize(r_);
    std::iota(order_.begin(), order_.end(), 0u);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](ClassId a, ClassId b) { return cand_[a].size() < cand_[b].size(); });
    phi_.assign(r_, kNone);
    back_.assign(r_, kNone);
    if (!assign(A_.class_of(0), B_.class_of(0))) return std::nullopt;
    if (dfs(0)) return ClassBijection{phi_};
    return std::nullopt;
  }

 private:
  static constexpr std::uint32_t kNone = ~0u;

  std::vector<std::uint32_t> dense(const StructureConstantTensor& t) const {
    if (r_ > 400) throw CapExceeded("algebraic_iso_search: rank above 400");
    std::vector<std::uint32_t> d(r_ * r_ * r_, 0);
    for (const auto& e : t.entries) d[(std::size_t{e.x} * r_ + e.y) * r_ + e.z] = e.c;
    return d;
  }

  std::uint32_t c(const std::vector<std::uint32_t>& t, ClassId x, ClassId y, ClassId z) const {
    return t[(std::size_t{x} * r_ + y) * r_ + z];
  }

  std::vector<std::vector<std::uint64_t>> invariants(const SRing& S, const std::vector<std::uint32_t>& t,
                                                     const std::vector<std::vector<Code>>* dist) const {
    std::vector<std::vector<std::uint64_t>> out(r_);
    for (ClassId x = 0; x < r_; ++x) {
      auto& v = out[x];
      v.push_back(S.partition().class_size(x));
      v.push_back(S.inverse_class(x) == x);
      v.push_back(x == S.class_of(0));
      if (dist)
        for (const auto& H : *dist) {
          std::vector<char> in(S.carrier().size(), 0);
          for (Code h : H) in[h] = 1;
          v.push_back(in[S.partition().members(x)[0]]);
        }
      std::vector<std::uint64_t> row;
      for (ClassId y = 0; y < r_; ++y)
        for (ClassId z = 0; z < r_; ++z) {
          const std::uint64_t sz = S.partition().class_size(y) * 1'000'003ull + S.partition().class_size(z);
          if (auto k = c(t, x, y, z)) row.push_back((sz << 20) ^ k);
          if (auto k = c(t, y, x, z)) row.push_back((sz << 21) ^ k ^ 1);
          if (auto k = c(t, y, z, x)) row.push_back((sz << 22) ^ k ^ 2);
        }
      // Exact matching is checked later; the row only prunes candidates.
      std::sort(row.begin(), row.end());
      v.insert(v.end(), row.begin(), row.end());
    }
    return out;
  }

  bool check_new(ClassId x) const {
    const ClassId fx = phi_[x];
    for (ClassId y = 0; y < r_; ++y) {
      if (phi_[y] == kNone) continue;
      const ClassId fy = phi_[y];
      for (ClassId z = 0; z < r_; ++z) {
        if (phi_[z] == kNone) continue;
        const ClassId fz = phi_[z];
        if (c(ta_, x, y, z) != c(tb_, fx, fy, fz)) return false;
        if (c(ta_, y, x, z) != c(tb_, fy, fx, fz)) return false;
        if (c(ta_, y, z, x) != c(tb_, fy, fz, fx)) return false;
      }
    }
    return true;
  }

  bool assign(ClassId x, ClassId y) {
    if (phi_[x] != kNone) return phi_[x] == y;
    if (back_[y] != kNone) return false;
    phi_[x] = y;
    back_[y] = x;
    trail_.push_back(x);
    if (!check_new(x)) return false;
    const ClassId xi = A_.inverse_class(x), yi = B_.inverse_class(y);
    return assign(xi, yi);
  }

  void undo(std::size_t from) {
    for (std::size_t i = from; i < trail_.size(); ++i) {
      back_[phi_[trail_[i]]] = kNone;
      phi_[trail_[i]] = kNone;
    }
    trail_.resize(from);
  }

  bool dfs(std::size_t depth) {
    if (++nodes_ > opt_.node_budget) throw BudgetExceeded("algebraic isomorphism search: node budget exhausted");
    if (stats_) stats_->nodes = nodes_;
    while (depth < r_ && phi_[order_[depth]] != kNone) ++depth;
    if (depth == r_) return true;
    const ClassId x = order_[depth];
    for (ClassId y : cand_[x]) {
      const std::size_t mark = trail_.size();
      if (assign(x, y) && dfs(depth + 1)) return true;
      undo(mark);
    }
    return false;
  }

  const SRing& A_;
  const SRing& B_;
  const std::optional<GenuineConstraint>& genuine_;
  const SearchOptions& opt_;
  SearchStats* stats_;
  std::size_t r_;
  std::vector<std::uint32_t> ta_, tb_;
  std::vector<std::vector<ClassId>> cand_;
  std::vector<ClassId> order_, phi_, back_, trail_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

std::optional<ClassBijection> algebraic_iso_search(const SRing& A, const SRing& B,
                                                   const std::optional<GenuineConstraint>& genuine,
                                                   const SearchOptions& opt, SearchStats* stats) {
  AlgebraicSearch s(A, B, genuine, opt, stats);
  return s.run();
}

bool verify_algebraic_iso(const SRing& A, const SRing& B, const std::vector<ClassId>& map) {
  const std::size_t r = A.rank();
  if (B.rank() != r || map.size() != r) return false;
  std::vector<char> seen(r, 0);
  for (auto v : map) {
    if (v >= r || seen[v]) return false;
    seen[v] = 1;
  }
  if (map[A.class_of(0)] != B.class_of(0)) return false;
  for (ClassId x = 0; x < r; ++x) {
    if (A.partition().class_size(x) != B.partition().class_size(map[x])) return false;
    if (map[A.inverse_class(x)] != B.inverse_class(map[x])) return false;
  }
  const auto& ta = A.constants();
  const auto& tb = B.constants();
  if (ta.entries.size() != tb.entries.size()) return false;
  for (const auto& e : ta.entries)
    if (tb.get(map[e.x], map[e.y], map[e.z]) != e.c) return false;
  return true;
}

namespace {

std::optional<Perm> iso_direct(const ColoredGroup& A, const ColoredGroup& B, const SearchOptions& opt,
                               SearchStats* stats) {
  std::optional<Perm> found;
  IsoEnumerator e(A, B, opt, stats);
  e.run([&](const Perm& f) {
    found = f;
    return false;
  });
  return found;
}

// Nontrivial coset of the factor-preserving subgroup, via the product coloring.
std::optional<Perm> iso_via_aut(const ColoredGroup& A, const ColoredGroup& B, const SearchOptions& opt) {
  const std::size_t n = A.group.order(), nb = B.group.order();
  if (n != nb) return std::nullopt;
  if (n == 1) return A.coloring[0] == B.coloring[0] ? std::optional<Perm>(Perm{0}) : std::nullopt;
  ColoredGroup K = product_coloring(A, B, ColorMerge::shared);
  SearchOptions so = opt;
  so.max_order = std::max(so.max_order, n * nb);
  auto aut = automorphism_generators(K, so);
  // Every automorphism keeps both factors or exchanges them, since the
  // product coloring separates the factors from the rest; checking the
  // generators is enough because keeping ones form a subgroup.
  const Perm* witness = nullptr;
  for (const auto& a : aut.generators) {
    const bool keeps = a[1] < n;
    for (Element g = 1; g < n; ++g) {
      const bool stays = a[g] < n && a[g * n] % n == 0;
      const bool swaps = a[g] % n == 0 && a[g * n] < n;
      if (keeps ? !stays : !swaps) throw InternalError("via_aut: automorphism mixes the two factors");
    }
    if (!keeps && !witness) witness = &a;
  }
  if (!witness) return std::nullopt;
  Perm f(n);
  for (Element g = 0; g < n; ++g) {
    const Code img = (*witness)[g];
    if (img % n != 0) throw InternalError("via_aut: automorphism does not map G onto G'");
    f[g] = img / n;
  }
  // Identity colors are outside the product formula; compare them directly.
  if (A.coloring[0] != B.coloring[0]) return std::nullopt;
  return f;
}

class Cyc1Oracle {
 public:
  Cyc1Oracle(const SearchOptions& opt) : opt_(opt) {}

  std::optional<Perm> solve(ColoredGroup A, ColoredGroup B) {
    const std::size_t n = A.group.order();
    if (B.group.order() != n) return std::nullopt;
    std::uint32_t next_color = 0;
    for (auto c : A.coloring) next_color = std::max(next_color, c + 1);
    for (auto c : B.coloring) next_color = std::max(next_color, c + 1);
    for (std::size_t round = 0;; ++round) {
      if (round > n) throw InternalError("via_cyc1: more than |G| reductions");
      if (!same_histogram(A, B)) return std::nullopt;
      const Element x = pick(A);
      if (x == 0) {
        // Discrete coloring: the only candidate map matches colors.
        Perm f(n);
        std::map<std::uint32_t, Element> where;
        for (Element h = 0; h < n; ++h) where[B.coloring[h]] = h;
        for (Element g = 0; g < n; ++g) f[g] = where.at(A.coloring[g]);
        if (is_colored_group_iso(A, B, f)) return f;
        return std::nullopt;
      }
      const std::uint32_t fresh = next_color++;
      ColoredGroup Ax = individualize_with(A, x, fresh);
      bool advanced = false;
      for (Element xp = 0; xp < n && !advanced; ++xp) {
        if (B.coloring[xp] != A.coloring[x]) continue;
        ColoredGroup Bx = individualize_with(B, xp, fresh);
        if (claim(Ax, Bx, x, xp)) {
          A = std::move(Ax);
          B = std::move(Bx);
          advanced = true;
        }
      }
      if (!advanced) return std::nullopt;
    }
  }

 private:
  static bool same_histogram(const ColoredGroup& A, const ColoredGroup& B) {
    std::vector<std::uint32_t> a = A.coloring, b = B.coloring;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return a == b;
  }

  // Smallest element in a non-singleton color class, or 0 if none.
  static Element pick(const ColoredGroup& A) {
    std::map<std::uint32_t, std::size_t> size;
    for (auto c : A.coloring) ++size[c];
    for (Element g = 1; g < A.group.order(); ++g)
      if (size[A.coloring[g]] > 1) return g;
    return 0;
  }

  // Same Aut(K)-orbit test for (x,1) and (1,x') in the product K.
  bool claim(const ColoredGroup& A, const ColoredGroup& B, Element x, Element xp) {
    if (A.coloring[0] != B.coloring[0]) return false;
    if (!product_) product_ = direct_product({A.group, B.group});
    ColoredGroup K = product_coloring(A, B, ColorMerge::shared, *product_);
    const std::size_t n = A.group.order();
    std::string key;
    key.reserve(K.coloring.size() * 4 + 16);
    for (auto v : A.group.flat_table()) key.append(reinterpret_cast<const char*>(&v), sizeof v);
    for (auto v : B.group.flat_table()) key.append(reinterpret_cast<const char*>(&v), sizeof v);
    for (auto v : K.coloring) key.append(reinterpret_cast<const char*>(&v), sizeof v);
    auto it = memo_.find(key);
    if (it == memo_.end()) {
      SearchOptions so = opt_;
      so.max_order = std::max(so.max_order, K.group.order());
      auto aut = automorphism_generators(K, so);
      auto ctx = std::make_shared<const PowerContext>(
          std::vector<std::shared_ptr<const FiniteGroup>>{std::make_shared<const FiniteGroup>(K.group)});
      it = memo_.emplace(key, orbit_partition(*ctx, aut.generators)).first;
    }
    return it->second.class_of(x) == it->second.class_of(static_cast<Code>(xp * n));
  }

  const SearchOptions& opt_;
  std::optional<FiniteGroup> product_;  // tables stay fixed during one solve
  std::unordered_map<std::string, Partition> memo_;
};

}  // namespace

std::optional<Perm> iso_colored_groups(const ColoredGroup& A, const ColoredGroup& B, IsoOracle oracle,
                                       const SearchOptions& opt, SearchStats* stats) {
  std::optional<Perm> f;
  switch (oracle) {
    case IsoOracle::direct: f = iso_direct(A, B, opt, stats); break;
    case IsoOracle::via_aut: f = iso_via_aut(A, B, opt); break;
    case IsoOracle::via_cyc1: {
      Cyc1Oracle o(opt);
      f = o.solve(A, B);
      break;
    }
  }
  if (f && !is_colored_group_iso(A, B, *f)) throw InternalError("isomorphism witness failed verification");
  return f;
}

nlohmann::json permutation_group_to_json(const PermutationGroup& P) {
  return {{"degree", P.degree}, {"order", P.order()}, {"generators", P.generators}};
}

}  // namespace schurpower
