#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "schurpower/autiso.hpp"
#include "schurpower/groups.hpp"
#include "schurpower/partition.hpp"
#include "schurpower/sring.hpp"
#include "schurpower/verify.hpp"
#include "schurpower/wl.hpp"

namespace sp = schurpower;
using nlohmann::json;

namespace {

enum Exit { ok = 0, verdict_false = 1, error = 2, over_budget = 3 };

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sp::InvalidInput("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw sp::InvalidInput(path + ": " + e.what());
  }
}

// A file path, or a group name such as Z4, S3, Z2^3, Z2xZ3.
sp::ColoredGroup load_group(const std::string& spec) {
  if (std::filesystem::exists(spec)) return sp::colored_group_from_json(read_json(spec));
  return sp::monochrome(sp::group_by_name(spec));
}

void emit(const json& body, const std::string& out) {
  const std::string text = body.dump() + "\n";
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw sp::InvalidInput("cannot write " + out);
  f << text;
}

json with_header(json body, const json& invocation) {
  json j = {{"invocation", invocation}};
  for (auto& [k, v] : body.items()) j[k] = std::move(v);
  return j;
}

sp::SearchOptions search_opts(std::uint64_t budget) {
  sp::SearchOptions s;
  s.node_budget = budget;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multidimensional Schur rings, WL partitions and automorphism-orbit rings of small groups"};
  app.require_subcommand(1);
  unsigned threads = 1;
  std::string out;
  app.add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 256u));

  // group
  auto* group = app.add_subcommand("group", "build or validate a group file");
  std::string g_name, g_family, g_table;
  std::vector<std::size_t> g_params;
  std::vector<sp::Element> g_indiv;
  group->add_option("--name", g_name, "group name, e.g. Z4, D8, Q8, S3, Z2^3, Z2xZ3");
  group->add_option("--family", g_family, "cyclic|dihedral|quaternion8|symmetric|elementary_abelian");
  group->add_option("--param", g_params, "family parameters");
  group->add_option("--table", g_table, "group file to validate");
  group->add_option("--individualize", g_indiv, "give these elements fresh colors");
  group->add_option("--out", out);

  // am / cyc / wl
  std::string a_group;
  std::size_t a_m = 1;
  bool a_constants = false;
  std::string a_engine = "symmetric";
  auto* am = app.add_subcommand("am", "compute the m-dimensional S-ring");
  am->add_option("--group", a_group, "group file or name")->required();
  am->add_option("--m", a_m)->required()->check(CLI::Range(1, 32));
  am->add_flag("--constants", a_constants, "include structure constants");
  am->add_option("--engine", a_engine, "symmetric|plain")->check(CLI::IsMember({"symmetric", "plain"}));
  am->add_option("--out", out);

  auto* cyc = app.add_subcommand("cyc", "automorphism-orbit S-ring");
  cyc->add_option("--group", a_group, "group file or name")->required();
  cyc->add_option("--m", a_m)->required()->check(CLI::Range(1, 32));
  cyc->add_option("--out", out);

  auto* wl = app.add_subcommand("wl", "m-ary WL coherent configuration");
  wl->add_option("--group", a_group, "group file or name")->required();
  wl->add_option("--m", a_m)->required()->check(CLI::Range(1, 32));
  wl->add_option("--out", out);

  // fingerprint
  std::string f_a, f_b;
  auto* fp = app.add_subcommand("fingerprint", "joint WL refinement of two colored groups");
  fp->add_option("--a", f_a)->required();
  fp->add_option("--b", f_b)->required();
  fp->add_option("--m", a_m)->required()->check(CLI::Range(1, 32));
  fp->add_option("--out", out);

  // compare
  std::string c_mode = "equal";
  auto* cmp = app.add_subcommand("compare", "compare two partition files");
  cmp->add_option("--a", f_a)->required();
  cmp->add_option("--b", f_b)->required();
  cmp->add_option("--mode", c_mode, "equal|coarser (a <= b: b refines a)|finer")
      ->check(CLI::IsMember({"equal", "coarser", "finer"}));
  cmp->add_option("--out", out);

  // iso
  std::string i_mode = "group", i_oracle = "direct";
  std::uint64_t budget = 10'000'000;
  std::size_t i_m = 3;
  auto* iso = app.add_subcommand("iso", "group or S-ring isomorphism search");
  iso->add_option("--mode", i_mode, "group|sring")->check(CLI::IsMember({"group", "sring"}));
  iso->add_option("--a", f_a)->required();
  iso->add_option("--b", f_b)->required();
  iso->add_option("--oracle", i_oracle, "direct|via_aut|via_cyc1")
      ->check(CLI::IsMember({"direct", "via_aut", "via_cyc1"}));
  iso->add_option("--m", i_m, "arity of the S-rings in sring mode")->check(CLI::Range(1, 8));
  iso->add_option("--node-budget", budget);
  iso->add_option("--out", out);

  // verify
  std::vector<std::string> v_theorems, v_groups;
  std::size_t v_samples = 0;
  std::uint64_t v_seed = 0;
  sp::VerifyOptions vopt;
  auto* ver = app.add_subcommand("verify", "run theorem checks on a grid of groups");
  ver->add_option("--theorem", v_theorems, "theorem names (default: all)");
  ver->add_option("--groups", v_groups, "group names (default: the standard grid)")->delimiter(',');
  auto* samples_opt = ver->add_option("--samples", v_samples, "random probes for the word check");
  auto* seed_opt = ver->add_option("--seed", v_seed, "seed for sampled checks");
  samples_opt->needs(seed_opt);
  ver->add_option("--stabilization-limit", vopt.stabilization_limit, "largest n^(m+k)");
  ver->add_option("--wl-limit", vopt.wl_limit, "largest WL domain");
  ver->add_option("--node-budget", budget);
  ver->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? Exit::ok : Exit::error;
  }

  try {
    if (const char* cap = std::getenv("SCHURPOWER_CAP")) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(cap, &end, 10);
      if (!*cap || *end || v == 0) throw sp::InvalidInput("SCHURPOWER_CAP must be a positive integer");
      sp::set_default_domain_cap(v);
    }
    json inv = {{"threads", threads}, {"cap", sp::default_domain_cap()}};

    if (*group) {
      inv["subcommand"] = "group";
      sp::ColoredGroup G;
      const int sources = !g_name.empty() + !g_family.empty() + !g_table.empty();
      if (sources != 1) throw sp::InvalidInput("group: give exactly one of --name, --family, --table");
      if (!g_name.empty()) {
        inv["name"] = g_name;
        G = sp::monochrome(sp::group_by_name(g_name));
      } else if (!g_table.empty()) {
        inv["table"] = g_table;
        G = sp::colored_group_from_json(read_json(g_table));
      } else {
        inv["family"] = g_family;
        inv["param"] = g_params;
        static const std::map<std::string, sp::GroupFamily> fam = {
            {"cyclic", sp::GroupFamily::cyclic},
            {"dihedral", sp::GroupFamily::dihedral},
            {"quaternion8", sp::GroupFamily::quaternion8},
            {"symmetric", sp::GroupFamily::symmetric},
            {"elementary_abelian", sp::GroupFamily::elementary_abelian}};
        auto it = fam.find(g_family);
        if (it == fam.end()) throw sp::InvalidInput("group: unknown family " + g_family);
        G = sp::monochrome(sp::make_group(it->second, g_params));
      }
      inv["individualize"] = g_indiv;
      for (auto x : g_indiv) {
        if (x >= G.group.order()) throw sp::InvalidInput("group: element out of range");
        G = sp::individualize(G, x);
      }
      emit(with_header(sp::colored_group_to_json(G), inv), out);
      return Exit::ok;
    }

    if (*am || *cyc || *wl) {
      inv["subcommand"] = *am ? "am" : *cyc ? "cyc" : "wl";
      inv["group"] = a_group;
      inv["m"] = a_m;
      const sp::ColoredGroup G = load_group(a_group);
      std::optional<sp::ColoredGroup> coloring;
      if (G.num_colors() > 1) coloring = G;
      if (*am) {
        inv["engine"] = a_engine;
        inv["constants"] = a_constants;
        sp::ClosureOptions co;
        co.threads = threads;
        if (a_engine == "plain") {
          auto ctx = sp::power(G.group, a_m);
          auto P = sp::schur_closure_partition(*ctx, sp::am_initial_partition(*ctx, coloring ? &G.coloring : nullptr), co);
          emit(with_header(sp::sring_to_json(sp::SRing(ctx, P), a_constants), inv), out);
        } else {
          emit(with_header(sp::sring_to_json(sp::compute_Am(G.group, a_m, coloring, co), a_constants), inv), out);
        }
      } else if (*cyc) {
        emit(with_header(sp::sring_to_json(sp::cyc_m(G.group, a_m, coloring), false), inv), out);
      } else {
        sp::WLOptions wo;
        wo.threads = threads;
        emit(with_header(sp::cc_to_json(sp::wl_m_group(G.group, a_m, coloring, wo)), inv), out);
      }
      return Exit::ok;
    }

    if (*fp) {
      inv["subcommand"] = "fingerprint";
      inv["a"] = f_a;
      inv["b"] = f_b;
      inv["m"] = a_m;
      sp::WLOptions wo;
      wo.threads = threads;
      auto r = sp::joint_fingerprint(load_group(f_a), load_group(f_b), a_m, wo);
      emit(with_header(sp::fingerprint_to_json(r), inv), out);
      return r.equal ? Exit::ok : Exit::verdict_false;
    }

    if (*cmp) {
      inv["subcommand"] = "compare";
      inv["a"] = f_a;
      inv["b"] = f_b;
      inv["mode"] = c_mode;
      const sp::Partition A = sp::partition_from_json(read_json(f_a));
      const sp::Partition B = sp::partition_from_json(read_json(f_b));
      if (A.domain_size() != B.domain_size()) throw sp::InvalidInput("compare: domains differ");
      long w = -1;
      bool holds;
      if (c_mode == "equal") {
        holds = A == B;
      } else if (c_mode == "coarser") {
        w = sp::refinement_witness(A, B);
        holds = w < 0;
      } else {
        w = sp::refinement_witness(B, A);
        holds = w < 0;
      }
      json res = {{"holds", holds}, {"rank_a", A.num_classes()}, {"rank_b", B.num_classes()}};
      if (w >= 0) res["witness_class"] = w;
      emit(with_header(res, inv), out);
      return holds ? Exit::ok : Exit::verdict_false;
    }

    if (*iso) {
      inv["subcommand"] = "iso";
      inv["mode"] = i_mode;
      inv["a"] = f_a;
      inv["b"] = f_b;
      inv["node_budget"] = budget;
      const auto so = search_opts(budget);
      if (i_mode == "group") {
        inv["oracle"] = i_oracle;
        const auto oracle = i_oracle == "direct"    ? sp::IsoOracle::direct
                            : i_oracle == "via_aut" ? sp::IsoOracle::via_aut
                                                    : sp::IsoOracle::via_cyc1;
        sp::SearchStats st;
        auto f = sp::iso_colored_groups(load_group(f_a), load_group(f_b), oracle, so, &st);
        json res = {{"isomorphic", f.has_value()}, {"nodes", st.nodes}};
        if (f) res["map"] = *f;
        emit(with_header(res, inv), out);
        return f ? Exit::ok : Exit::verdict_false;
      }
      inv["m"] = i_m;
      auto ring = [&](const std::string& spec) {
        if (std::filesystem::exists(spec)) {
          json j = read_json(spec);
          if (j.contains("carrier")) return sp::sring_from_json(j);
        }
        return sp::compute_Am(load_group(spec).group, i_m);
      };
      const sp::SRing A = ring(f_a), B = ring(f_b);
      sp::SearchStats st;
      std::optional<sp::Perm> f;
      if (A.carrier().size() == B.carrier().size()) f = sp::combinatorial_iso_search(A, B, true, so, &st);
      json res = {{"isomorphic", f.has_value()}, {"nodes", st.nodes}};
      if (f) {
        auto classes = sp::verify_combinatorial_iso(A, B, *f);
        if (!classes) throw sp::InternalError("iso: search returned an invalid map");
        res["map"] = *f;
        res["class_map"] = *classes;
      }
      emit(with_header(res, inv), out);
      return f ? Exit::ok : Exit::verdict_false;
    }

    if (*ver) {
      inv["subcommand"] = "verify";
      inv["theorems"] = v_theorems;
      inv["groups"] = v_groups;
      inv["samples"] = v_samples;
      inv["seed"] = *seed_opt ? json(v_seed) : json(nullptr);
      inv["stabilization_limit"] = vopt.stabilization_limit;
      inv["wl_limit"] = vopt.wl_limit;
      inv["node_budget"] = budget;
      vopt.threads = threads;
      vopt.search = search_opts(budget);
      std::vector<sp::NamedGroup> grid;
      if (v_groups.empty()) grid = sp::default_grid();
      for (const auto& g : v_groups) grid.push_back(sp::named_group(g));
      sp::GridSelection sel;
      sel.theorems = v_theorems;
      if (*seed_opt) sel.seed = v_seed;
      sel.word_samples = v_samples;
      auto reports = sp::run_grid(grid, sel, vopt);
      json arr = json::array();
      bool all = true;
      for (const auto& r : reports) {
        arr.push_back(sp::report_to_json(r));
        all = all && r.verdict != sp::Verdict::fail;
      }
      emit({{"invocation", inv}, {"reports", arr}}, out);
      std::cerr << sp::summary_table(reports);
      return all ? Exit::ok : Exit::verdict_false;
    }
  } catch (const sp::CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return Exit::over_budget;
  } catch (const sp::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return Exit::over_budget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return Exit::error;
  }
  return Exit::error;
}
