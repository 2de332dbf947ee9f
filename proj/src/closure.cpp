#include <algorithm>
#include <array>
#include <chrono>
#include <memory>
#include <numeric>
#include <set>
#include <span>

#include "closure_internal.hpp"
#include "schurpower/parallel.hpp"

namespace schurpower {

namespace detail {

namespace {

Partition intern_pairs(const std::vector<std::uint64_t>& key) {
  std::vector<std::uint64_t> sorted = key;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::uint32_t> l(key.size());
  for (std::size_t x = 0; x < key.size(); ++x)
    l[x] = static_cast<std::uint32_t>(std::lower_bound(sorted.begin(), sorted.end(), key[x]) - sorted.begin());
  return Partition::from_labels(l);
}

// Sorts `idx` by the keys they point to and writes local group numbers.
template <class Key>
std::uint32_t group_by_key(const std::vector<Key>& keys, std::vector<std::uint32_t>& local) {
  std::vector<std::uint32_t> idx(keys.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return keys[a] < keys[b]; });
  local.assign(keys.size(), 0);
  std::uint32_t g = 0;
  for (std::size_t t = 0; t < idx.size(); ++t) {
    if (t && keys[idx[t]] != keys[idx[t - 1]]) ++g;
    local[idx[t]] = g;
  }
  return keys.empty() ? 0 : g + 1;
}

// The symmetric engine takes orbit minima over the listed maps, so the list
// must be exactly a group of automorphisms of the base group.
void validate_automorphisms(const FiniteGroup& G, const std::vector<std::vector<Element>>& auts) {
  const std::size_t n = G.order();
  std::set<std::vector<Element>> all;
  for (const auto& a : auts) {
    if (a.size() != n) throw InvalidInput("symmetric closure: automorphism has wrong length");
    std::vector<char> hit(n, 0);
    for (Element x = 0; x < n; ++x) {
      if (a[x] >= n || hit[a[x]]) throw InvalidInput("symmetric closure: map is not a bijection");
      hit[a[x]] = 1;
      for (Element y = 0; y < n; ++y)
        if (a[G.mul(x, y)] != G.mul(a[x], a[y])) throw InvalidInput("symmetric closure: map is not a homomorphism");
    }
    all.insert(a);
  }
  if (all.size() != auts.size()) throw InvalidInput("symmetric closure: repeated automorphism");
  // Grow the generated group from the identity, one new generator at a time.
  std::vector<Element> id(n);
  std::iota(id.begin(), id.end(), Element{0});
  if (!all.count(id)) throw InvalidInput("symmetric closure: identity map missing");
  std::set<std::vector<Element>> gen{id};
  std::vector<const std::vector<Element>*> gens;
  for (const auto& a : all) {
    if (gen.count(a)) continue;
    gens.push_back(&a);
    std::vector<std::vector<Element>> queue(gen.begin(), gen.end());
    for (std::size_t q = 0; q < queue.size(); ++q)
      for (const auto* g : gens) {
        std::vector<Element> c(n);
        for (Element x = 0; x < n; ++x) c[x] = (*g)[queue[q][x]];
        if (gen.insert(c).second) {
          if (!all.count(c)) throw InvalidInput("symmetric closure: automorphisms are not closed under composition");
          queue.push_back(std::move(c));
        }
      }
  }
}

}  // namespace

Partition split_identity(const Partition& P) {
  if (P.domain_size() == 0 || P.class_size(P.class_of(0)) == 1) return P;
  std::vector<std::uint32_t> l(P.domain_size());
  for (std::size_t x = 0; x < l.size(); ++x) l[x] = P.class_of(x) + 1;
  l[0] = 0;
  return Partition::from_labels(l);
}

Partition inverse_split(const PowerContext& ctx, const Partition& P) {
  std::vector<std::uint64_t> key(P.domain_size());
  for (Code x = 0; x < key.size(); ++x)
    key[x] = (std::uint64_t{P.class_of(x)} << 32) | P.class_of(ctx.inv(x));
  return intern_pairs(key);
}

SymmetricRound::SymmetricRound(const PowerContext& ctx, const Symmetry& sym) : ctx_(ctx), sym_(sym) {
  const std::size_t m = ctx.arity();
  if (!sym.automorphisms.empty() && !ctx.homogeneous())
    throw InvalidInput("symmetric closure: carrier must be a direct power");
  if (!sym.automorphisms.empty()) validate_automorphisms(ctx.factor(0), sym.automorphisms);
  if (sym.permute_coordinates && !ctx.homogeneous())
    throw InvalidInput("symmetric closure: coordinate symmetry needs a direct power");
  if (sym.permute_coordinates && m >= 2) {
    std::vector<std::uint8_t> t(m), c(m);
    std::iota(t.begin(), t.end(), std::uint8_t{0});
    std::swap(t[0], t[1]);
    gens_.push_back(t);
    if (m >= 3) {
      for (std::size_t i = 0; i < m; ++i) c[i] = static_cast<std::uint8_t>((i + 1) % m);
      gens_.push_back(c);
    }
  }
  const Code N = ctx.size();
  point_of_.assign(N, 0);
  for (Code x = 0; x < N; ++x) {
    Code mn = x;
    for (const auto& a : sym.automorphisms) mn = std::min(mn, apply_aut(ctx, a, x));
    if (mn == x) {
      point_of_[x] = static_cast<std::uint32_t>(point_tuple_.size());
      point_tuple_.push_back(x);
    } else {
      point_of_[x] = point_of_[mn];
    }
  }
  const std::size_t npts = point_tuple_.size();
  const std::uint32_t none = ~0u;
  rep_of_.assign(npts, none);
  tau_.assign(npts * m, 0);
  std::vector<std::uint32_t> queue;
  for (std::uint32_t p = 0; p < npts; ++p) {
    if (rep_of_[p] != none) continue;
    rep_of_[p] = p;
    for (std::size_t i = 0; i < m; ++i) tau_[p * m + i] = static_cast<std::uint8_t>(i);
    queue.assign(1, p);
    std::vector<std::uint8_t> t2(m);
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const std::uint32_t q = queue[h];
      for (const auto& g : gens_) {
        for (std::size_t i = 0; i < m; ++i) t2[i] = tau_[q * m + g[i]];
        const std::uint32_t q2 = point_of_[ctx.apply_map(point_tuple_[p], t2)];
        if (rep_of_[q2] != none) continue;
        rep_of_[q2] = p;
        std::copy(t2.begin(), t2.end(), tau_.begin() + q2 * m);
        queue.push_back(q2);
      }
    }
  }
}

std::string SymmetricRound::check_invariance(const Partition& P) const {
  const Code N = ctx_.size();
  for (const auto& a : sym_.automorphisms)
    for (Code x = 0; x < N; ++x)
      if (P.class_of(apply_aut(ctx_, a, x)) != P.class_of(x))
        return "class of tuple " + std::to_string(x) + " is not fixed by a componentwise automorphism";
  std::vector<ClassId> img(P.num_classes());
  for (const auto& g : gens_) {
    for (ClassId c = 0; c < P.num_classes(); ++c) img[c] = P.class_of(ctx_.apply_map(P.members(c)[0], g));
    for (Code x = 0; x < N; ++x)
      if (P.class_of(ctx_.apply_map(x, g)) != img[P.class_of(x)])
        return "coordinate permutation does not map class " + std::to_string(P.class_of(x)) + " onto a class";
  }
  return {};
}

// Splits by the product counts c(Y, Z; g) with Y running over one
// Sym-invariant union of classes at a time, smallest unions first.  Each such
// split is implied by the full one, and a sweep that splits nothing means the
// full product condition holds.  Classes made of a single point need no work.
Partition SymmetricRound::refine(const Partition& P0, unsigned threads) const {
  const std::size_t m = ctx_.arity();
  const std::size_t npts = point_tuple_.size();
  const unsigned nt = std::max(1u, threads);

  // Sym-orbits of the classes of P0 as splitters.
  std::vector<ClassId> parent(P0.num_classes());
  std::iota(parent.begin(), parent.end(), ClassId{0});
  auto find = [&](ClassId c) {
    while (parent[c] != c) c = parent[c] = parent[parent[c]];
    return c;
  };
  for (ClassId c = 0; c < P0.num_classes(); ++c)
    for (const auto& g : gens_) {
      const ClassId a = find(c), b = find(P0.class_of(ctx_.apply_map(P0.members(c)[0], g)));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  std::vector<std::vector<ClassId>> splitters;
  {
    std::vector<std::uint32_t> slot(P0.num_classes(), ~0u);
    for (ClassId c = 0; c < P0.num_classes(); ++c) {
      const ClassId r = find(c);
      if (slot[r] == ~0u) {
        slot[r] = static_cast<std::uint32_t>(splitters.size());
        splitters.emplace_back();
      }
      splitters[slot[r]].push_back(c);
    }
  }
  std::vector<std::size_t> weight(splitters.size(), 0);
  for (std::size_t i = 0; i < splitters.size(); ++i)
    for (ClassId c : splitters[i]) weight[i] += P0.class_size(c);
  std::vector<std::size_t> order(splitters.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return weight[a] < weight[b]; });

  Partition P = P0;
  std::vector<std::uint32_t> plab(npts);
  for (std::size_t p = 0; p < npts; ++p) plab[p] = P.class_of(point_tuple_[p]);

  for (std::size_t si : order) {
    const std::size_t k = P.num_classes();
    // Points of each class, in CSR form.
    std::vector<std::uint32_t> start(k + 1, 0), pts(npts);
    for (std::size_t p = 0; p < npts; ++p) ++start[plab[p] + 1];
    std::partial_sum(start.begin(), start.end(), start.begin());
    {
      std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
      for (std::uint32_t p = 0; p < npts; ++p) pts[fill[plab[p]]++] = p;
    }
    std::vector<ClassId> multi;
    std::vector<char> need(npts, 0);
    for (ClassId c = 0; c < k; ++c)
      if (start[c + 1] - start[c] > 1) {
        multi.push_back(c);
        for (auto t = start[c]; t < start[c + 1]; ++t) need[rep_of_[pts[t]]] = 1;
      }
    if (multi.empty()) break;

    std::vector<Code> ys;
    for (ClassId c : splitters[si])
      for (Code y : P0.members(c)) ys.push_back(y);

    std::vector<std::uint32_t> reps;
    std::vector<std::uint32_t> rep_slot(npts, 0);
    for (std::uint32_t p = 0; p < npts; ++p)
      if (need[p]) {
        rep_slot[p] = static_cast<std::uint32_t>(reps.size());
        reps.push_back(p);
      }
    // Key of a rep g: sorted (class y, class y^-1 g, count) over y in the splitter.
    std::vector<std::vector<std::array<std::uint32_t, 3>>> keys(reps.size());
    parallel_for(reps.size(), nt, [&](std::size_t i, unsigned) {
      const Code g = point_tuple_[reps[i]];
      std::vector<std::uint64_t> pairs(ys.size());
      for (std::size_t j = 0; j < ys.size(); ++j)
        pairs[j] = (std::uint64_t{P.class_of(ys[j])} << 32) | P.class_of(ctx_.mul(ctx_.inv(ys[j]), g));
      std::sort(pairs.begin(), pairs.end());
      auto& out = keys[i];
      for (std::size_t j = 0; j < pairs.size();) {
        std::size_t e = j;
        while (e < pairs.size() && pairs[e] == pairs[j]) ++e;
        out.push_back({static_cast<std::uint32_t>(pairs[j] >> 32), static_cast<std::uint32_t>(pairs[j]),
                       static_cast<std::uint32_t>(e - j)});
        j = e;
      }
    });

    std::vector<std::uint32_t> local_of_point(npts, 0);
    std::vector<std::uint32_t> groups(multi.size(), 1);
    parallel_for(multi.size(), nt, [&](std::size_t mi, unsigned) {
      const ClassId c = multi[mi];
      const std::uint32_t b = start[c], e = start[c + 1];
      std::vector<std::vector<std::array<std::uint32_t, 3>>> ks(e - b);
      for (std::uint32_t t = b; t < e; ++t) {
        const std::uint32_t p = pts[t];
        const auto& key = keys[rep_slot[rep_of_[p]]];
        const std::uint8_t* tau = tau_.data() + std::size_t{p} * m;
        bool identity = true;
        for (std::size_t i = 0; i < m; ++i) identity = identity && tau[i] == i;
        auto& out = ks[t - b];
        if (identity) {
          out = key;
          continue;
        }
        std::span<const std::uint8_t> sig(tau, m);
        out.resize(key.size());
        for (std::size_t j = 0; j < key.size(); ++j)
          out[j] = {P.class_of(ctx_.apply_map(P.members(key[j][0])[0], sig)),
                    P.class_of(ctx_.apply_map(P.members(key[j][1])[0], sig)), key[j][2]};
        std::sort(out.begin(), out.end());
      }
      std::vector<std::uint32_t> local;
      groups[mi] = group_by_key(ks, local);
      for (std::uint32_t t = b; t < e; ++t) local_of_point[pts[t]] = local[t - b];
    });

    bool split = false;
    for (auto g : groups) split = split || g > 1;
    if (!split) continue;
    // Global ids: classes in order, each followed by its new pieces.
    std::vector<std::uint32_t> base(k, 0);
    {
      std::uint32_t next = 0;
      std::size_t mi = 0;
      for (ClassId c = 0; c < k; ++c) {
        base[c] = next;
        if (mi < multi.size() && multi[mi] == c) next += groups[mi++];
        else next += 1;
      }
    }
    for (std::uint32_t p = 0; p < npts; ++p) plab[p] = base[plab[p]] + local_of_point[p];
    std::vector<std::uint32_t> l(ctx_.size());
    for (Code x = 0; x < l.size(); ++x) l[x] = plab[point_of_[x]];
    P = Partition::from_labels(l);
    for (std::size_t p = 0; p < npts; ++p) plab[p] = P.class_of(point_tuple_[p]);
  }
  return P;
}

}  // namespace detail

namespace {

using Clock = std::chrono::steady_clock;

class RoundGuard {
 public:
  RoundGuard(const ClosureOptions& opt, std::size_t N, ClosureStats* stats)
      : opt_(opt), max_rounds_(opt.max_rounds ? opt.max_rounds : N + 1), stats_(stats), t0_(Clock::now()) {}

  void begin() {
    if (++rounds_ > max_rounds_)
      throw BudgetExceeded("closure: more than " + std::to_string(max_rounds_) + " rounds");
    tr_ = Clock::now();
  }
  void end(std::size_t classes) {
    const double dt = std::chrono::duration<double>(Clock::now() - tr_).count();
    if (stats_) {
      stats_->class_counts.push_back(classes);
      stats_->round_seconds.push_back(dt);
    }
    const double total = std::chrono::duration<double>(Clock::now() - t0_).count();
    if (opt_.time_budget_seconds > 0 && total > opt_.time_budget_seconds)
      throw BudgetExceeded("closure: time budget of " + std::to_string(opt_.time_budget_seconds) +
                           " s exceeded after " + std::to_string(rounds_) + " rounds");
  }

 private:
  const ClosureOptions& opt_;
  std::size_t max_rounds_;
  ClosureStats* stats_;
  Clock::time_point t0_, tr_;
  std::size_t rounds_ = 0;
};

Partition product_split_plain(const PowerContext& ctx, const Partition& P, unsigned threads) {
  const std::size_t k = P.num_classes();
  const unsigned nt = std::max(1u, threads);
  std::vector<std::unique_ptr<detail::SigBuilder>> builders(nt);
  std::vector<std::uint32_t> local(P.domain_size(), 0), groups(k, 1);
  parallel_for(k, nt, [&](std::size_t c, unsigned w) {
    auto mem = P.members(static_cast<ClassId>(c));
    if (mem.size() == 1) return;
    if (!builders[w]) builders[w] = std::make_unique<detail::SigBuilder>(ctx, P);
    std::vector<std::vector<std::uint32_t>> keys(mem.size());
    for (std::size_t i = 0; i < mem.size(); ++i) builders[w]->build(mem[i], keys[i]);
    std::vector<std::uint32_t> loc;
    groups[c] = detail::group_by_key(keys, loc);
    for (std::size_t i = 0; i < mem.size(); ++i) local[mem[i]] = loc[i];
  });
  std::vector<std::uint32_t> base(k);
  std::uint32_t next = 0;
  for (std::size_t c = 0; c < k; ++c) {
    base[c] = next;
    next += groups[c];
  }
  std::vector<std::uint32_t> l(P.domain_size());
  for (Code x = 0; x < l.size(); ++x) l[x] = base[P.class_of(x)] + local[x];
  return Partition::from_labels(l);
}

}  // namespace

Partition schur_closure_partition(const PowerContext& ctx, const Partition& initial, const ClosureOptions& opt,
                                  ClosureStats* stats) {
  if (initial.domain_size() != ctx.size()) throw InvalidInput("closure: partition does not match carrier");
  RoundGuard guard(opt, ctx.size(), stats);
  Partition P = detail::split_identity(initial);
  std::size_t prev = P.num_classes();
  while (true) {
    guard.begin();
    P = detail::inverse_split(ctx, P);
    if (!P.is_discrete()) P = product_split_plain(ctx, P, opt.threads);
    guard.end(P.num_classes());
    if (P.num_classes() == prev) break;
    prev = P.num_classes();
  }
  return P;
}

Partition schur_closure_symmetric(const PowerContext& ctx, const Partition& initial, const Symmetry& sym,
                                  const ClosureOptions& opt, ClosureStats* stats) {
  if (initial.domain_size() != ctx.size()) throw InvalidInput("closure: partition does not match carrier");
  RoundGuard guard(opt, ctx.size(), stats);
  Partition P = detail::split_identity(initial);
  detail::SymmetricRound round(ctx, sym);
  if (auto why = round.check_invariance(P); !why.empty()) throw InvalidInput("symmetric closure: " + why);
  std::size_t prev = P.num_classes();
  while (true) {
    guard.begin();
    P = detail::inverse_split(ctx, P);
    if (!P.is_discrete()) P = round.refine(P, opt.threads);
    guard.end(P.num_classes());
    if (P.num_classes() == prev) break;
    prev = P.num_classes();
  }
  return P;
}

}  // namespace schurpower
