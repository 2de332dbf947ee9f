#include "schurpower/groups.hpp"

#include <algorithm>
#include <atomic>
#include <bitset>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace schurpower {

namespace {

std::atomic<std::uint64_t> g_domain_cap{kDefaultDomainCap};

std::string triple(std::size_t a, std::size_t b, std::size_t c) {
  std::ostringstream os;
  os << "(" << a << "," << b << "," << c << ")";
  return os.str();
}

}  // namespace

std::uint64_t default_domain_cap() { return g_domain_cap.load(); }
void set_default_domain_cap(std::uint64_t cap) { g_domain_cap.store(cap); }

FiniteGroup FiniteGroup::from_table(const std::vector<std::vector<Element>>& mul) {
  const std::size_t n = mul.size();
  std::vector<Element> flat;
  flat.reserve(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    if (mul[a].size() != n)
      throw InvalidInput("table: row " + std::to_string(a) + " has length " +
                         std::to_string(mul[a].size()) + ", expected " + std::to_string(n));
    flat.insert(flat.end(), mul[a].begin(), mul[a].end());
  }
  return from_flat_table(n, std::move(flat));
}

FiniteGroup FiniteGroup::from_flat_table(std::size_t n, std::vector<Element> flat) {
  if (n == 0) throw InvalidInput("table: order must be positive");
  if (n > kMaxGroupOrder)
    throw InvalidInput("table: order " + std::to_string(n) + " exceeds " +
                       std::to_string(kMaxGroupOrder));
  if (flat.size() != n * n) throw InvalidInput("table: wrong number of entries");
  for (std::size_t i = 0; i < flat.size(); ++i)
    if (flat[i] >= n)
      throw InvalidInput("closure: entry mul(" + std::to_string(i / n) + "," +
                         std::to_string(i % n) + ") = " + std::to_string(flat[i]) +
                         " out of range");
  auto at = [&](std::size_t a, std::size_t b) { return flat[a * n + b]; };
  for (std::size_t x = 0; x < n; ++x)
    if (at(0, x) != x || at(x, 0) != x)
      throw InvalidInput("identity: element 0 is not a two-sided identity at x=" +
                         std::to_string(x));
  std::vector<char> seen(n);
  for (std::size_t a = 0; a < n; ++a) {
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t b = 0; b < n; ++b) {
      if (seen[at(a, b)])
        throw InvalidInput("latin: row " + std::to_string(a) + " repeats " +
                           std::to_string(at(a, b)));
      seen[at(a, b)] = 1;
    }
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t b = 0; b < n; ++b) {
      if (seen[at(b, a)])
        throw InvalidInput("latin: column " + std::to_string(a) + " repeats " +
                           std::to_string(at(b, a)));
      seen[at(b, a)] = 1;
    }
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t ab = at(a, b);
      for (std::size_t c = 0; c < n; ++c)
        if (at(ab, c) != at(a, at(b, c)))
          throw InvalidInput("associativity: fails at " + triple(a, b, c));
    }
  FiniteGroup G;
  G.n_ = n;
  G.table_ = std::move(flat);
  G.inv_.assign(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (G.table_[a * n + b] == 0) {
        if (G.table_[b * n + a] != 0)
          throw InvalidInput("inverse: left and right inverses differ at x=" + std::to_string(a));
        G.inv_[a] = static_cast<Element>(b);
        break;
      }
  return G;
}

std::size_t FiniteGroup::element_order(Element a) const {
  std::size_t k = 1;
  for (Element x = a; x != 0; x = mul(x, a)) ++k;
  return k;
}

std::vector<std::vector<Element>> FiniteGroup::table() const {
  std::vector<std::vector<Element>> t(n_);
  for (std::size_t a = 0; a < n_; ++a) t[a].assign(table_.begin() + a * n_, table_.begin() + (a + 1) * n_);
  return t;
}

FiniteGroup cyclic_group(std::size_t n) {
  if (n == 0 || n > kMaxGroupOrder) throw InvalidInput("cyclic: bad order " + std::to_string(n));
  std::vector<Element> t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[a * n + b] = static_cast<Element>((a + b) % n);
  return FiniteGroup::from_flat_table(n, std::move(t));
}

FiniteGroup dihedral_group(std::size_t order) {
  if (order < 2 || order % 2 || order > kMaxGroupOrder)
    throw InvalidInput("dihedral: order must be even, 2..256, got " + std::to_string(order));
  const std::size_t k = order / 2;
  // r^a is a, s r^a is k + a, with r^a s = s r^{-a}.
  std::vector<Element> t(order * order);
  for (std::size_t x = 0; x < order; ++x)
    for (std::size_t y = 0; y < order; ++y) {
      const bool xs = x >= k, ys = y >= k;
      const std::size_t a = x % k, b = y % k;
      std::size_t r;
      if (!xs && !ys) r = (a + b) % k;
      else if (!xs && ys) r = k + (b + k - a) % k;
      else if (xs && !ys) r = k + (a + b) % k;
      else r = (b + k - a) % k;
      t[x * order + y] = static_cast<Element>(r);
    }
  return FiniteGroup::from_flat_table(order, std::move(t));
}

FiniteGroup quaternion_group() {
  // ids: 2u + s for unit u in {1,i,j,k} and sign s (0 = +).
  static const int unit_mul[4][4][2] = {
      {{0, 0}, {1, 0}, {2, 0}, {3, 0}},
      {{1, 0}, {0, 1}, {3, 0}, {2, 1}},
      {{2, 0}, {3, 1}, {0, 1}, {1, 0}},
      {{3, 0}, {2, 0}, {1, 1}, {0, 1}},
  };
  std::vector<Element> t(64);
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      const auto& p = unit_mul[x / 2][y / 2];
      t[x * 8 + y] = static_cast<Element>(2 * p[0] + ((x % 2) ^ (y % 2) ^ p[1]));
    }
  return FiniteGroup::from_flat_table(8, std::move(t));
}

FiniteGroup symmetric_group(std::size_t degree) {
  if (degree == 0 || degree > 5) throw InvalidInput("symmetric: degree must be 1..5");
  std::vector<std::vector<int>> perms;
  std::vector<int> p(degree);
  std::iota(p.begin(), p.end(), 0);
  do perms.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  const std::size_t n = perms.size();
  auto rank = [&](const std::vector<int>& q) {
    return static_cast<Element>(std::lower_bound(perms.begin(), perms.end(), q) - perms.begin());
  };
  std::vector<Element> t(n * n);
  std::vector<int> c(degree);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t i = 0; i < degree; ++i) c[i] = perms[a][perms[b][i]];
      t[a * n + b] = rank(c);
    }
  return FiniteGroup::from_flat_table(n, std::move(t));
}

FiniteGroup elementary_abelian_group(std::size_t p, std::size_t rank) {
  if (p < 2) throw InvalidInput("elementary_abelian: p must be prime");
  for (std::size_t d = 2; d * d <= p; ++d)
    if (p % d == 0) throw InvalidInput("elementary_abelian: p must be prime");
  if (rank == 0) return cyclic_group(1);
  return direct_product(std::vector<FiniteGroup>(rank, cyclic_group(p)));
}

FiniteGroup direct_product(const std::vector<FiniteGroup>& factors) {
  std::size_t n = 1;
  for (const auto& f : factors) {
    n *= f.order();
    if (n > kMaxGroupOrder) throw InvalidInput("direct_product: order exceeds 256");
  }
  std::vector<std::size_t> stride(factors.size());
  std::size_t s = 1;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    stride[i] = s;
    s *= factors[i].order();
  }
  std::vector<Element> t(n * n);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      std::size_t z = 0;
      for (std::size_t i = 0; i < factors.size(); ++i) {
        const std::size_t q = factors[i].order();
        const Element a = static_cast<Element>(x / stride[i] % q);
        const Element b = static_cast<Element>(y / stride[i] % q);
        z += factors[i].mul(a, b) * stride[i];
      }
      t[x * n + y] = static_cast<Element>(z);
    }
  return FiniteGroup::from_flat_table(n, std::move(t));
}

FiniteGroup make_group(GroupFamily family, const std::vector<std::size_t>& params) {
  auto need = [&](std::size_t k) {
    if (params.size() != k) throw InvalidInput("make_group: wrong number of parameters");
  };
  switch (family) {
    case GroupFamily::cyclic: need(1); return cyclic_group(params[0]);
    case GroupFamily::dihedral: need(1); return dihedral_group(params[0]);
    case GroupFamily::quaternion8: need(0); return quaternion_group();
    case GroupFamily::symmetric: need(1); return symmetric_group(params[0]);
    case GroupFamily::elementary_abelian: need(2); return elementary_abelian_group(params[0], params[1]);
    default: throw InvalidInput("make_group: family needs factors or a table");
  }
}

namespace {

FiniteGroup single_by_name(const std::string& s) {
  if (s.empty()) throw InvalidInput("group name: empty factor");
  std::string head = s;
  std::size_t exponent = 1;
  if (auto caret = s.find('^'); caret != std::string::npos) {
    head = s.substr(0, caret);
    exponent = std::stoul(s.substr(caret + 1));
  }
  if (head.size() < 2) throw InvalidInput("group name: cannot parse '" + s + "'");
  const char kind = head[0];
  const std::size_t v = std::stoul(head.substr(1));
  FiniteGroup g;
  switch (kind) {
    case 'Z': case 'C': g = cyclic_group(v); break;
    case 'E': g = cyclic_group(v); break;
    case 'D': g = dihedral_group(v); break;
    case 'S': g = symmetric_group(v); break;
    case 'Q':
      if (v != 8) throw InvalidInput("group name: only Q8 is supported");
      g = quaternion_group();
      break;
    default: throw InvalidInput("group name: unknown family in '" + s + "'");
  }
  if (exponent == 1) return g;
  return direct_product(std::vector<FiniteGroup>(exponent, g));
}

}  // namespace

FiniteGroup group_by_name(const std::string& name) {
  std::vector<FiniteGroup> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = name.find('x', start);
    const std::string part = name.substr(start, pos - start);
    try {
      parts.push_back(single_by_name(part));
    } catch (const std::logic_error&) {
      throw InvalidInput("unknown group name '" + name + "'");
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts.size() == 1 ? parts[0] : direct_product(parts);
}

FiniteGroup renumber(const FiniteGroup& G, const std::vector<Element>& perm) {
  const std::size_t n = G.order();
  if (perm.size() != n || perm[0] != 0) throw InvalidInput("renumber: bad permutation");
  std::vector<Element> t(n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) t[perm[a] * n + perm[b]] = perm[G.mul(a, b)];
  return FiniteGroup::from_flat_table(n, std::move(t));
}

std::vector<Element> generated_subgroup(const FiniteGroup& G, std::span<const Element> gens) {
  std::vector<char> in(G.order(), 0);
  std::vector<Element> out{0};
  in[0] = 1;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (Element g : gens) {
      const Element h = G.mul(out[i], g);
      if (!in[h]) {
        in[h] = 1;
        out.push_back(h);
      }
    }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_cyclic(const FiniteGroup& G) {
  for (Element a = 0; a < G.order(); ++a)
    if (G.element_order(a) == G.order()) return true;
  return false;
}

std::size_t minimal_generating_number(const FiniteGroup& G) {
  const std::size_t n = G.order();
  if (n == 1) return 0;
  using Set = std::bitset<kMaxGroupOrder>;
  auto closure = [&](const Set& h, Element g) {
    std::vector<Element> gens;
    for (Element a = 0; a < n; ++a)
      if (h[a]) gens.push_back(a);
    gens.push_back(g);
    Set out;
    for (Element a : generated_subgroup(G, gens)) out[a] = true;
    return out;
  };
  // Level d holds every distinct subgroup generated by d elements.
  std::vector<Set> level;
  Set trivial;
  trivial[0] = true;
  level.push_back(trivial);
  for (std::size_t d = 1;; ++d) {
    std::unordered_set<Set> next_seen;
    std::vector<Set> next;
    for (const Set& h : level)
      for (Element g = 1; g < n; ++g) {
        if (h[g]) continue;
        Set k = closure(h, g);
        if (k.count() == n) return d;
        if (next_seen.insert(k).second) next.push_back(k);
      }
    level = std::move(next);
  }
}

ColoredGroup::ColoredGroup(FiniteGroup g, std::vector<std::uint32_t> c)
    : group(std::move(g)), coloring(std::move(c)) {
  if (coloring.size() != group.order()) throw InvalidInput("coloring: length differs from group order");
  std::vector<char> used(group.order() + 1, 0);
  std::uint32_t mx = 0;
  for (auto c0 : coloring) {
    if (c0 >= used.size()) throw InvalidInput("coloring: ids must be contiguous from 0");
    used[c0] = 1;
    mx = std::max(mx, c0);
  }
  for (std::uint32_t i = 0; i <= mx; ++i)
    if (!used[i]) throw InvalidInput("coloring: ids must be contiguous from 0");
}

std::size_t ColoredGroup::num_colors() const {
  return coloring.empty() ? 0 : *std::max_element(coloring.begin(), coloring.end()) + 1;
}

ColoredGroup monochrome(const FiniteGroup& G) {
  return ColoredGroup(G, std::vector<std::uint32_t>(G.order(), 0));
}

std::vector<std::uint32_t> normalize_colors(std::span<const std::uint32_t> colors) {
  std::vector<std::uint32_t> out(colors.size());
  std::vector<std::pair<std::uint32_t, std::uint32_t>> map;
  for (std::size_t i = 0; i < colors.size(); ++i) {
    auto it = std::find_if(map.begin(), map.end(), [&](auto& p) { return p.first == colors[i]; });
    if (it == map.end()) {
      map.emplace_back(colors[i], static_cast<std::uint32_t>(map.size()));
      out[i] = map.back().second;
    } else {
      out[i] = it->second;
    }
  }
  return out;
}

ColoredGroup individualize(const ColoredGroup& CG, Element x) {
  if (x >= CG.group.order()) throw InvalidInput("individualize: element out of range");
  auto c = CG.coloring;
  const auto fresh = static_cast<std::uint32_t>(CG.num_colors());
  c[x] = fresh;
  // Dropping x may leave its old color empty; renumber by first occurrence.
  return ColoredGroup(CG.group, normalize_colors(c));
}

ColoredGroup individualize_with(const ColoredGroup& CG, Element x, std::uint32_t color) {
  if (x >= CG.group.order()) throw InvalidInput("individualize: element out of range");
  ColoredGroup out;
  out.group = CG.group;
  out.coloring = CG.coloring;
  out.coloring[x] = color;
  return out;
}

ColoredGroup product_coloring(const ColoredGroup& A, const ColoredGroup& B, ColorMerge mode) {
  return product_coloring(A, B, mode, direct_product({A.group, B.group}));
}

ColoredGroup product_coloring(const ColoredGroup& A, const ColoredGroup& B, ColorMerge mode,
                              const FiniteGroup& product) {
  const std::size_t na = A.group.order(), nb = B.group.order();
  const std::uint32_t shift =
      mode == ColorMerge::disjoint ? static_cast<std::uint32_t>(A.num_colors()) : 0;
  std::uint32_t top = 0;
  for (auto c : A.coloring) top = std::max(top, c + 1);
  for (auto c : B.coloring) top = std::max(top, c + shift + 1);
  const std::uint32_t eps = top;
  if (product.order() != na * nb) throw InvalidInput("product_coloring: product has the wrong order");
  std::vector<std::uint32_t> c(na * nb, eps);
  for (std::size_t g = 1; g < na; ++g) c[g] = A.coloring[g];
  for (std::size_t h = 1; h < nb; ++h) c[h * na] = B.coloring[h] + shift;
  ColoredGroup out;
  out.group = product;
  out.coloring = std::move(c);
  // Ids may have gaps (colors used only by identities); keep them when the
  // caller asked for a shared alphabet, otherwise compact.
  if (mode == ColorMerge::disjoint) out.coloring = normalize_colors(out.coloring);
  return out;
}

PowerContext::PowerContext(std::vector<std::shared_ptr<const FiniteGroup>> factors, std::uint64_t cap)
    : factors_(std::move(factors)), m_(factors_.size()) {
  if (m_ == 0) throw InvalidInput("power: arity must be at least 1");
  if (m_ > 255) throw InvalidInput("power: arity too large");
  std::uint64_t N = 1;
  for (const auto& f : factors_) {
    N *= f->order();
    if (N > cap)
      throw CapExceeded("domain of size " + std::to_string(N) + "+ exceeds cap " + std::to_string(cap) +
                        " (n=" + std::to_string(factors_[0]->order()) + ", m=" + std::to_string(m_) + ")");
    if (!(*f == *factors_[0])) homogeneous_ = false;
  }
  size_ = static_cast<Code>(N);
  stride_.resize(m_);
  Code s = 1;
  for (std::size_t i = 0; i < m_; ++i) {
    stride_[i] = s;
    s *= static_cast<Code>(factors_[i]->order());
  }
  digits_.resize(std::size_t{size_} * m_);
  std::vector<std::uint8_t> d(m_, 0);
  for (Code x = 0; x < size_; ++x) {
    std::copy(d.begin(), d.end(), digits_.begin() + std::size_t{x} * m_);
    for (std::size_t i = 0; i < m_; ++i) {
      if (++d[i] < factors_[i]->order()) break;
      d[i] = 0;
    }
  }
  inv_.resize(size_);
  for (Code x = 0; x < size_; ++x) {
    Code y = 0;
    for (std::size_t i = 0; i < m_; ++i) y += factors_[i]->inv(digit(x, i)) * stride_[i];
    inv_[x] = y;
  }
}

const FiniteGroup& PowerContext::base() const {
  if (!homogeneous_) throw InvalidInput("carrier is not a direct power of one group");
  return *factors_[0];
}

Code PowerContext::encode(std::span<const Element> t) const {
  if (t.size() != m_) throw InvalidInput("encode: wrong tuple length");
  Code x = 0;
  for (std::size_t i = 0; i < m_; ++i) {
    if (t[i] >= factors_[i]->order()) throw InvalidInput("encode: coordinate out of range");
    x += t[i] * stride_[i];
  }
  return x;
}

std::vector<Element> PowerContext::decode(Code x) const {
  if (x >= size_) throw InvalidInput("decode: code out of range");
  std::vector<Element> t(m_);
  for (std::size_t i = 0; i < m_; ++i) t[i] = digit(x, i);
  return t;
}

Code PowerContext::mul(Code x, Code y) const {
  Code z = 0;
  for (std::size_t i = 0; i < m_; ++i) z += factors_[i]->mul(digit(x, i), digit(y, i)) * stride_[i];
  return z;
}

Code PowerContext::apply_map(Code x, std::span<const std::uint8_t> sigma) const {
  Code z = 0;
  for (std::size_t i = 0; i < m_; ++i) z += digit(x, sigma[i]) * stride_[i];
  return z;
}

std::shared_ptr<const PowerContext> power(const FiniteGroup& G, std::size_t m, std::uint64_t cap) {
  auto g = std::make_shared<const FiniteGroup>(G);
  std::uint64_t N = 1;
  for (std::size_t i = 0; i < m; ++i) {
    N *= G.order();
    if (N > cap)
      throw CapExceeded("domain n^m with n=" + std::to_string(G.order()) + ", m=" + std::to_string(m) +
                        " exceeds cap " + std::to_string(cap));
  }
  return std::make_shared<const PowerContext>(std::vector<std::shared_ptr<const FiniteGroup>>(m, g), cap);
}

TupleProfile tuple_profile(const PowerContext& ctx, Code x) {
  if (x >= ctx.size()) throw InvalidInput("tuple_profile: code out of range");
  const std::size_t m = ctx.arity();
  TupleProfile p;
  p.rho.resize(m);
  std::uint8_t next = 0;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = 0;
    while (j < i && ctx.digit(x, j) != ctx.digit(x, i)) ++j;
    p.rho[i] = j < i ? p.rho[j] : next++;
  }
  if (ctx.homogeneous()) {
    const FiniteGroup& G = ctx.base();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k)
          if (G.mul(ctx.digit(x, i), ctx.digit(x, j)) == ctx.digit(x, k))
            p.mu.push_back({static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(j),
                            static_cast<std::uint8_t>(k)});
  }
  return p;
}

nlohmann::json group_to_json(const FiniteGroup& G) {
  return {{"order", G.order()}, {"mul", G.table()}};
}

nlohmann::json colored_group_to_json(const ColoredGroup& CG) {
  auto j = group_to_json(CG.group);
  j["coloring"] = CG.coloring;
  return j;
}

ColoredGroup colored_group_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("order") || !j.contains("mul"))
    throw InvalidInput("group file: expected object with 'order' and 'mul'");
  const auto n = j.at("order").get<std::size_t>();
  auto mul = j.at("mul").get<std::vector<std::vector<Element>>>();
  if (mul.size() != n) throw InvalidInput("group file: 'mul' has " + std::to_string(mul.size()) + " rows, order is " + std::to_string(n));
  FiniteGroup G = FiniteGroup::from_table(mul);
  if (j.contains("coloring")) return ColoredGroup(G, j.at("coloring").get<std::vector<std::uint32_t>>());
  return monochrome(G);
}

}  // namespace schurpower
