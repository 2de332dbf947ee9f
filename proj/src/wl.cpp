#include "schurpower/wl.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

#include "schurpower/parallel.hpp"

namespace schurpower {

namespace {

using Sig = std::vector<std::uint32_t>;
constexpr std::uint32_t kSep = ~0u;

// Coordinate maps generating every map {0..m-1} -> {0..m-1}: a transposition,
// an m-cycle and the map sending coordinate 1 onto coordinate 0.
std::vector<std::vector<std::uint8_t>> map_generators(std::size_t m) {
  std::vector<std::vector<std::uint8_t>> g;
  if (m < 2) return g;
  std::vector<std::uint8_t> t(m);
  std::iota(t.begin(), t.end(), std::uint8_t{0});
  auto s = t;
  std::swap(s[0], s[1]);
  g.push_back(s);
  if (m >= 3) {
    for (std::size_t i = 0; i < m; ++i) s[i] = static_cast<std::uint8_t>((i + 1) % m);
    g.push_back(s);
  }
  auto c = t;
  c[1] = 0;
  g.push_back(c);
  return g;
}

Sig fiber_sig(const PowerContext& ctx, Code x, const std::vector<std::uint32_t>* coloring) {
  const std::size_t m = ctx.arity();
  TupleProfile p = tuple_profile(ctx, x);
  Sig s(p.rho.begin(), p.rho.end());
  s.push_back(kSep);
  for (const auto& t : p.mu) s.push_back(static_cast<std::uint32_t>((t[0] * m + t[1]) * m + t[2]));
  if (coloring) {
    s.push_back(kSep);
    for (std::size_t i = 0; i < m; ++i) s.push_back((*coloring)[ctx.digit(x, i)]);
  }
  return s;
}

std::vector<Sig> fiber_sigs(const PowerContext& ctx, const std::vector<std::uint32_t>* coloring) {
  std::vector<Sig> out(ctx.size());
  for (Code x = 0; x < ctx.size(); ++x) out[x] = fiber_sig(ctx, x, coloring);
  return out;
}

std::vector<Sig> rainbow_sigs(const PowerContext& ctx, const std::vector<std::uint32_t>& col) {
  const Code N = ctx.size();
  const auto gens = map_generators(ctx.arity());
  std::vector<Sig> out(N);
  for (Code y = 0; y < N; ++y) {
    out[y].push_back(col[y]);
    for (const auto& g : gens) out[y].push_back(col[ctx.apply_map(y, g)]);
  }
  std::vector<std::pair<Code, std::uint32_t>> marks(N);
  for (const auto& g : gens) {
    for (Code x = 0; x < N; ++x) marks[x] = {ctx.apply_map(x, g), col[x]};
    std::sort(marks.begin(), marks.end());
    for (Code y = 0; y < N; ++y) out[y].push_back(kSep);
    for (std::size_t i = 0; i < marks.size(); ++i)
      if (i == 0 || marks[i] != marks[i - 1]) out[marks[i].first].push_back(marks[i].second);
  }
  return out;
}

Sig wl_sig(const PowerContext& ctx, const std::vector<std::uint32_t>& col, Code x) {
  const std::size_t m = ctx.arity();
  const std::size_t n = ctx.factor(0).order();
  std::vector<Sig> rows(n, Sig(m));
  for (std::size_t i = 0; i < m; ++i) {
    const Code base = x - ctx.digit(x, i) * ctx.stride(i);
    for (Element a = 0; a < n; ++a) rows[a][i] = col[base + a * ctx.stride(i)];
  }
  std::sort(rows.begin(), rows.end());
  Sig s{col[x]};
  for (const auto& r : rows) s.insert(s.end(), r.begin(), r.end());
  return s;
}

std::vector<Sig> wl_sigs(const PowerContext& ctx, const std::vector<std::uint32_t>& col, unsigned threads) {
  std::vector<Sig> out(ctx.size());
  const std::size_t chunk = 256;
  const std::size_t chunks = (ctx.size() + chunk - 1) / chunk;
  parallel_for(chunks, threads, [&](std::size_t c, unsigned) {
    const Code hi = static_cast<Code>(std::min<std::size_t>(ctx.size(), (c + 1) * chunk));
    for (Code x = static_cast<Code>(c * chunk); x < hi; ++x) out[x] = wl_sig(ctx, col, x);
  });
  return out;
}

// Interns signatures of several structures with one dictionary; ids follow
// sorted signature order.  Returns the number of distinct signatures.
std::size_t intern(const std::vector<const std::vector<Sig>*>& sigs, std::vector<std::vector<std::uint32_t>>& out) {
  std::vector<std::pair<std::uint32_t, Code>> all;
  for (std::uint32_t s = 0; s < sigs.size(); ++s)
    for (Code x = 0; x < sigs[s]->size(); ++x) all.emplace_back(s, x);
  auto at = [&](const std::pair<std::uint32_t, Code>& p) -> const Sig& { return (*sigs[p.first])[p.second]; };
  std::sort(all.begin(), all.end(), [&](const auto& a, const auto& b) { return at(a) < at(b); });
  out.assign(sigs.size(), {});
  for (std::size_t s = 0; s < sigs.size(); ++s) out[s].assign(sigs[s]->size(), 0);
  std::uint32_t id = 0;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i && at(all[i]) != at(all[i - 1])) ++id;
    out[all[i].first][all[i].second] = id;
  }
  return all.empty() ? 0 : id + 1;
}

struct Run {
  std::shared_ptr<const PowerContext> ctx;
  std::vector<std::uint32_t> colors;
};

std::map<std::uint32_t, std::size_t> histogram(const std::vector<std::uint32_t>& c) {
  std::map<std::uint32_t, std::size_t> h;
  for (auto v : c) ++h[v];
  return h;
}

enum class Phase { rainbow, wl };

class Refiner {
 public:
  Refiner(std::vector<Run>& runs, const WLOptions& opt) : runs_(runs), opt_(opt) {
    std::size_t N = 0;
    for (const auto& r : runs_) N = std::max<std::size_t>(N, r.ctx->size());
    max_rounds_ = opt.max_rounds ? opt.max_rounds : N + 2;
    count_ = distinct();
  }

  // Returns false if the runs diverged (histograms differ).
  bool round(Phase phase, bool& changed) {
    if (++rounds_ > 4 * max_rounds_) throw BudgetExceeded("refinement: round budget exceeded");
    std::vector<std::vector<Sig>> sigs;
    for (const auto& r : runs_)
      sigs.push_back(phase == Phase::wl ? wl_sigs(*r.ctx, r.colors, opt_.threads) : rainbow_sigs(*r.ctx, r.colors));
    std::vector<const std::vector<Sig>*> ptrs;
    for (const auto& s : sigs) ptrs.push_back(&s);
    std::vector<std::vector<std::uint32_t>> next;
    const std::size_t c = intern(ptrs, next);
    changed = c != count_;
    if (c < count_) throw InternalError("refinement: class count decreased");
    count_ = c;
    for (std::size_t i = 0; i < runs_.size(); ++i) runs_[i].colors = std::move(next[i]);
    if (phase == Phase::wl && changed) ++wl_rounds_;
    return agree();
  }

  bool agree() {
    for (std::size_t i = 1; i < runs_.size(); ++i)
      if (histogram(runs_[i].colors) != histogram(runs_[0].colors)) {
        divergence_ = "color histograms differ after round " + std::to_string(rounds_);
        return false;
      }
    return true;
  }

  // Alternates closure under coordinate maps and WL rounds until neither
  // refines.  `start` selects the phase to begin with.
  bool stabilize(Phase start) {
    bool first = true;
    while (true) {
      bool any = false, changed = true;
      if (!(first && start == Phase::wl)) {
        while (changed) {
          if (!round(Phase::rainbow, changed)) return false;
          if (changed && !first) c2_repaired_ = true;
          any = any || changed;
        }
      }
      changed = true;
      bool wl_changed = false;
      while (changed) {
        if (!round(Phase::wl, changed)) return false;
        wl_changed = wl_changed || changed;
      }
      if (!wl_changed && !(first && start == Phase::wl)) return true;
      if (!wl_changed && !any && !first) return true;
      first = false;
    }
  }

  std::size_t wl_rounds() const { return wl_rounds_; }
  bool c2_repaired() const { return c2_repaired_; }
  const std::string& divergence() const { return divergence_; }

 private:
  std::size_t distinct() const {
    std::vector<std::uint32_t> all;
    for (const auto& r : runs_) all.insert(all.end(), r.colors.begin(), r.colors.end());
    std::sort(all.begin(), all.end());
    return static_cast<std::size_t>(std::unique(all.begin(), all.end()) - all.begin());
  }

  std::vector<Run>& runs_;
  const WLOptions& opt_;
  std::size_t max_rounds_;
  std::size_t count_;
  std::size_t rounds_ = 0;
  std::size_t wl_rounds_ = 0;
  bool c2_repaired_ = false;
  std::string divergence_;
};

void fill_profiles(Rainbow& R) {
  const Partition& P = R.partition;
  R.profiles.assign(P.num_classes(), {});
  R.mu_constant.assign(P.num_classes(), 1);
  for (ClassId c = 0; c < P.num_classes(); ++c) {
    auto mem = P.members(c);
    TupleProfile p0 = tuple_profile(*R.ctx, mem[0]);
    for (Code x : mem.subspan(1))
      if (tuple_profile(*R.ctx, x).mu != p0.mu) {
        R.mu_constant[c] = 0;
        p0.mu.clear();
        break;
      }
    R.profiles[c] = std::move(p0);
  }
}

}  // namespace

Partition fiber_partition(const PowerContext& ctx, const std::vector<std::uint32_t>* coloring) {
  auto sigs = fiber_sigs(ctx, coloring);
  std::vector<std::vector<std::uint32_t>> out;
  intern({&sigs}, out);
  return Partition::from_labels(out[0]);
}

Partition rainbow_closure(const PowerContext& ctx, const Partition& P) {
  std::vector<std::uint32_t> col = P.labels();
  std::size_t count = P.num_classes();
  while (true) {
    auto sigs = rainbow_sigs(ctx, col);
    std::vector<std::vector<std::uint32_t>> out;
    const std::size_t c = intern({&sigs}, out);
    col = std::move(out[0]);
    if (c == count) break;
    count = c;
  }
  return Partition::from_labels(col);
}

Rainbow make_rainbow(std::shared_ptr<const PowerContext> ctx, Partition P) {
  Rainbow R;
  R.ctx = std::move(ctx);
  R.partition = std::move(P);
  R.c1_verified = check_c1(*R.ctx, R.partition);
  R.c2_verified = check_c2(*R.ctx, R.partition);
  fill_profiles(R);
  return R;
}

Rainbow initial_rainbow(const FiniteGroup& G, std::size_t m, const std::optional<ColoredGroup>& coloring) {
  if (coloring && !(coloring->group == G)) throw InvalidInput("initial_rainbow: coloring belongs to another group");
  auto ctx = power(G, m);
  Partition F = fiber_partition(*ctx, coloring ? &coloring->coloring : nullptr);
  return make_rainbow(ctx, rainbow_closure(*ctx, F));
}

Partition wl_step(const PowerContext& ctx, const Partition& P, unsigned threads) {
  auto sigs = wl_sigs(ctx, P.labels(), threads);
  std::vector<std::vector<std::uint32_t>> out;
  intern({&sigs}, out);
  return Partition::from_labels(out[0]);
}

bool check_c1(const PowerContext& ctx, const Partition& P, std::string* witness) {
  for (ClassId c = 0; c < P.num_classes(); ++c) {
    auto mem = P.members(c);
    const auto rho = tuple_profile(ctx, mem[0]).rho;
    for (Code x : mem)
      if (tuple_profile(ctx, x).rho != rho) {
        if (witness) *witness = "C1: class " + std::to_string(c) + " mixes equality patterns (" +
                                std::to_string(mem[0]) + ", " + std::to_string(x) + ")";
        return false;
      }
  }
  return true;
}

namespace {

bool image_is_class(const PowerContext& ctx, const Partition& P, std::span<const std::uint8_t> sigma,
                    std::vector<char>& mark, std::string* witness) {
  for (ClassId c = 0; c < P.num_classes(); ++c) {
    auto mem = P.members(c);
    const ClassId target = P.class_of(ctx.apply_map(mem[0], sigma));
    std::size_t distinct = 0;
    std::vector<Code> touched;
    bool ok = true;
    for (Code x : mem) {
      const Code y = ctx.apply_map(x, sigma);
      if (P.class_of(y) != target) ok = false;
      if (!mark[y]) {
        mark[y] = 1;
        touched.push_back(y);
        ++distinct;
      }
    }
    for (Code y : touched) mark[y] = 0;
    if (!ok || distinct != P.class_size(target)) {
      if (witness) {
        std::string s;
        for (auto v : sigma) s += std::to_string(v) + " ";
        *witness = "C2: image of class " + std::to_string(c) + " under map [ " + s + "] is not a class";
      }
      return false;
    }
  }
  return true;
}

}  // namespace

bool check_c2(const PowerContext& ctx, const Partition& P, std::string* witness) {
  const std::size_t m = ctx.arity();
  std::vector<char> mark(ctx.size(), 0);
  for (const auto& g : map_generators(m))
    if (!image_is_class(ctx, P, g, mark, witness)) return false;
  // Small arities: every map, as an independent check of the generator argument.
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= m;
  if (total <= 256 && std::uint64_t{total} * ctx.size() <= (std::uint64_t{1} << 24)) {
    std::vector<std::uint8_t> s(m, 0);
    for (std::size_t t = 0; t < total; ++t) {
      std::size_t v = t;
      for (std::size_t i = 0; i < m; ++i) {
        s[i] = static_cast<std::uint8_t>(v % m);
        v /= m;
      }
      if (!image_is_class(ctx, P, s, mark, witness)) return false;
    }
  }
  return true;
}

bool check_c3(const PowerContext& ctx, const Partition& P, std::string* witness) {
  Partition Q = wl_step(ctx, P);
  if (Q.num_classes() == P.num_classes()) return true;
  if (witness) *witness = "C3: class " + std::to_string(refinement_witness(Q, P)) + " is split by substitution counts";
  return false;
}

RegularityReport check_regular(const PowerContext& ctx, const Partition& P) {
  const std::size_t m = ctx.arity();
  if (m > 16) throw CapExceeded("check_regular: arity above 16");
  RegularityReport r;
  r.n_K.assign(P.num_classes(), std::vector<std::int64_t>(std::size_t{1} << m, 0));
  std::vector<std::uint64_t> key(ctx.size()), sorted;
  std::vector<std::size_t> K;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    K.clear();
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) K.push_back(i);
    for (Code x = 0; x < ctx.size(); ++x) {
      const Code pr = K.empty() ? 0 : project_code(ctx, x, K);
      key[x] = (std::uint64_t{P.class_of(x)} << 32) | pr;
    }
    sorted = key;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::int64_t> value(P.num_classes(), -2);
    for (Code x = 0; x < ctx.size(); ++x) {
      auto range = std::equal_range(sorted.begin(), sorted.end(), key[x]);
      const std::int64_t cnt = range.second - range.first;
      auto& v = value[P.class_of(x)];
      if (v == -2) v = cnt;
      else if (v != cnt && v != -1) {
        v = -1;
        if (r.all_constant) {
          r.all_constant = false;
          r.witness = "n_K varies on class " + std::to_string(P.class_of(x)) + " for K mask " +
                      std::to_string(mask) + " (tuple " + std::to_string(x) + ")";
        }
      }
    }
    for (ClassId c = 0; c < P.num_classes(); ++c) r.n_K[c][mask] = value[c];
  }
  return r;
}

CoherentConfig wl_fixpoint(const Rainbow& R, const WLOptions& opt) {
  std::vector<Run> runs{{R.ctx, R.partition.labels()}};
  Refiner ref(runs, opt);
  ref.stabilize(Phase::wl);
  CoherentConfig cc;
  cc.rainbow = make_rainbow(R.ctx, Partition::from_labels(runs[0].colors));
  cc.rounds = ref.wl_rounds();
  cc.c2_repaired = ref.c2_repaired();
  std::string why;
  if (!cc.rainbow.c1_verified) throw InternalError("WL fixpoint fails C1");
  if (!check_c2(*R.ctx, cc.rainbow.partition, &why)) throw InternalError("WL fixpoint fails " + why);
  if (!check_c3(*R.ctx, cc.rainbow.partition, &why)) throw InternalError("WL fixpoint fails " + why);
  cc.c3_verified = true;
  auto reg = check_regular(*R.ctx, cc.rainbow.partition);
  if (!reg.all_constant) throw InternalError("WL fixpoint is not regular: " + reg.witness);
  for (const auto& row : reg.n_K) cc.n_K.emplace_back(row.begin(), row.end());
  return cc;
}

CoherentConfig wl_m_group(const FiniteGroup& G, std::size_t m, const std::optional<ColoredGroup>& coloring,
                          const WLOptions& opt) {
  return wl_fixpoint(initial_rainbow(G, m, coloring), opt);
}

namespace {

std::vector<FingerprintEntry> entries_of(const PowerContext& ctx, const std::vector<std::uint32_t>& col) {
  std::map<std::uint32_t, std::pair<std::size_t, Code>> by_color;
  for (Code x = 0; x < col.size(); ++x) {
    auto [it, fresh] = by_color.try_emplace(col[x], 0, x);
    ++it->second.first;
  }
  std::vector<FingerprintEntry> out;
  for (const auto& [c, sz] : by_color) out.push_back({c, sz.first, tuple_profile(ctx, sz.second)});
  return out;
}

}  // namespace

FingerprintResult joint_fingerprint(const ColoredGroup& A, const ColoredGroup& B, std::size_t m, const WLOptions& opt) {
  FingerprintResult res;
  auto ca = power(A.group, m), cb = power(B.group, m);
  if (ca->size() != cb->size()) {
    res.divergence = "group orders differ";
    return res;
  }
  auto sa = fiber_sigs(*ca, &A.coloring), sb = fiber_sigs(*cb, &B.coloring);
  std::vector<std::vector<std::uint32_t>> init;
  intern({&sa, &sb}, init);
  std::vector<Run> runs{{ca, std::move(init[0])}, {cb, std::move(init[1])}};
  Refiner ref(runs, opt);
  bool same = ref.agree() && ref.stabilize(Phase::rainbow);
  res.rounds = ref.wl_rounds();
  res.a = entries_of(*ca, runs[0].colors);
  res.b = entries_of(*cb, runs[1].colors);
  if (!same) {
    res.divergence = ref.divergence().empty() ? "initial colorings differ" : ref.divergence();
    return res;
  }
  res.equal = res.a == res.b;
  if (!res.equal) {
    res.divergence = "final class profiles differ";
    return res;
  }
  // Matched classes must carry identical substitution data in the shared
  // color alphabet; recompute from one representative on each side.
  std::map<std::uint32_t, Code> rep_a, rep_b;
  for (Code x = 0; x < ca->size(); ++x) rep_a.try_emplace(runs[0].colors[x], x);
  for (Code x = 0; x < cb->size(); ++x) rep_b.try_emplace(runs[1].colors[x], x);
  res.bijection_verified = true;
  for (const auto& [c, x] : rep_a) {
    const Code y = rep_b.at(c);
    if (wl_sig(*ca, runs[0].colors, x) != wl_sig(*cb, runs[1].colors, y) ||
        fiber_sig(*ca, x, &A.coloring) != fiber_sig(*cb, y, &B.coloring))
      res.bijection_verified = false;
  }
  if (!res.bijection_verified) {
    res.equal = false;
    res.divergence = "color-matched classes disagree on substitution counts";
  }
  return res;
}

WLDimensionProbe probe_wl_dimension(const ColoredGroup& A, const ColoredGroup& B, std::size_t max_m) {
  WLDimensionProbe p;
  bool distinguished = false;
  for (std::size_t m = 1; m <= max_m; ++m) {
    const bool eq = joint_fingerprint(A, B, m).equal;
    if (distinguished && eq) p.monotone = false;
    distinguished = distinguished || !eq;
    p.verdicts.emplace_back(m, eq);
  }
  if (!p.monotone) throw InternalError("WL probe: a distinguished pair became equivalent at higher arity");
  return p;
}

SRing sring_from_wl3m(const FiniteGroup& G, std::size_t m, ProjectionReport* report) {
  auto cc = wl_m_group(G, 3 * m);
  std::vector<std::size_t> K(m);
  std::iota(K.begin(), K.end(), std::size_t{0});
  auto pr = project(cc.rainbow.partition, *cc.rainbow.ctx, K);
  SRing S(pr.target, pr.partition);
  ProjectionReport r;
  r.partial_overlap = pr.partial_overlap;
  auto ax = verify_axioms(*pr.target, pr.partition);
  r.axioms_ok = ax.ok();
  r.witness = ax.witness;
  auto Am = compute_Am(G, m);
  r.refinement_checked = true;
  r.refinement_ok = is_coarser_equal(Am.partition(), pr.partition);
  if (!r.refinement_ok && r.witness.empty()) r.witness = "projection is not finer than the m-dimensional ring";
  if (report) *report = r;
  return S;
}

CoherentConfig cc_from_sring(const FiniteGroup& G, std::size_t m, ProjectionReport* report) {
  auto A = compute_Am(G, m + 1);
  std::vector<std::size_t> K(m);
  std::iota(K.begin(), K.end(), std::size_t{0});
  auto pr = project(A.partition(), A.carrier(), K);
  CoherentConfig cc;
  cc.rainbow = make_rainbow(pr.target, pr.partition);
  ProjectionReport r;
  r.partial_overlap = pr.partial_overlap;
  std::string why;
  const bool c1 = check_c1(*pr.target, pr.partition, &why);
  const bool c2 = c1 && check_c2(*pr.target, pr.partition, &why);
  const bool c3 = c2 && check_c3(*pr.target, pr.partition, &why);
  cc.c3_verified = c3;
  r.axioms_ok = c1 && c2 && c3;
  r.witness = why;
  auto reg = check_regular(*pr.target, pr.partition);
  for (const auto& row : reg.n_K) cc.n_K.emplace_back(row.begin(), row.end());
  if (m >= 2) {
    auto W = wl_m_group(G, m);
    r.refinement_checked = true;
    r.refinement_ok = is_coarser_equal(W.rainbow.partition, pr.partition);
    if (!r.refinement_ok && r.witness.empty()) r.witness = "projection is not finer than WL_m";
  }
  if (report) *report = r;
  return cc;
}

nlohmann::json profile_to_json(const TupleProfile& p) {
  nlohmann::json mu = nlohmann::json::array();
  for (const auto& t : p.mu) mu.push_back({t[0], t[1], t[2]});
  return {{"rho", p.rho}, {"mu", mu}};
}

nlohmann::json cc_to_json(const CoherentConfig& cc) {
  const Rainbow& R = cc.rainbow;
  nlohmann::json j = partition_to_json(R.partition);
  j["carrier"] = carrier_to_json(*R.ctx);
  j["rank"] = R.partition.num_classes();
  nlohmann::json classes = nlohmann::json::array();
  for (ClassId c = 0; c < R.partition.num_classes(); ++c) {
    nlohmann::json e = profile_to_json(R.profiles[c]);
    if (!R.mu_constant[c]) e["mu"] = nullptr;
    e["size"] = R.partition.class_size(c);
    if (c < cc.n_K.size()) e["n_K"] = cc.n_K[c];
    classes.push_back(e);
  }
  j["classes"] = classes;
  j["c1"] = R.c1_verified;
  j["c2"] = R.c2_verified;
  j["c3"] = cc.c3_verified;
  return j;
}

nlohmann::json fingerprint_to_json(const FingerprintResult& f) {
  auto side = [](const std::vector<FingerprintEntry>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& e : v) {
      auto j = profile_to_json(e.profile);
      j["color"] = e.color;
      j["size"] = e.size;
      a.push_back(j);
    }
    return a;
  };
  nlohmann::json j{{"equal", f.equal}, {"rounds", f.rounds}, {"a", side(f.a)}, {"b", side(f.b)}};
  if (!f.divergence.empty()) j["divergence"] = f.divergence;
  return j;
}

}  // namespace schurpower
