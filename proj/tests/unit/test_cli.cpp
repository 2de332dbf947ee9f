#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#ifndef SCHURPOWER_CLI
#error "SCHURPOWER_CLI must name the built command-line tool"
#endif

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + SCHURPOWER_CLI + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[4096];
  std::size_t k;
  while ((k = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, k);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path scratch() {
  auto d = std::filesystem::temp_directory_path() / "schurpower_cli_test";
  std::filesystem::create_directories(d);
  return d;
}

std::string write(const std::string& name, const std::string& body) {
  auto p = scratch() / name;
  std::ofstream(p) << body;
  return p.string();
}

}  // namespace

TEST_CASE("group files and the rank-5 output") {
  auto g = run("group --name Z3");
  REQUIRE(g.code == 0);
  auto z3 = write("z3.json", g.out);
  auto j = nlohmann::json::parse(g.out);
  CHECK(j["order"] == 3);
  CHECK(j.contains("invocation"));
  auto am = run("am --group " + z3 + " --m 2");
  REQUIRE(am.code == 0);
  CHECK(nlohmann::json::parse(am.out)["rank"] == 5);
  // byte-identical reruns, any thread count, either engine
  CHECK(run("am --group " + z3 + " --m 2").out == am.out);
  auto t4 = run("--threads 4 am --group " + z3 + " --m 2");
  CHECK(nlohmann::json::parse(t4.out)["class_of"] == nlohmann::json::parse(am.out)["class_of"]);
  auto plain = run("am --group " + z3 + " --m 2 --engine plain");
  CHECK(nlohmann::json::parse(plain.out)["class_of"] == nlohmann::json::parse(am.out)["class_of"]);
}

TEST_CASE("compare and iso exit codes") {
  auto p = write("p.json", run("am --group Z4 --m 2").out);
  CHECK(run("compare --a " + p + " --b " + p + " --mode equal").code == 0);
  auto q = write("q.json", run("cyc --group Z4 --m 2").out);
  CHECK(run("compare --a " + p + " --b " + q + " --mode coarser").code == 0);
  CHECK(run("compare --a " + q + " --b " + p + " --mode coarser").code == 1);
  auto z4 = write("z4.json", run("group --name Z4").out);
  auto v4 = write("v4.json", run("group --name Z2^2").out);
  CHECK(run("iso --mode group --a " + z4 + " --b " + v4).code == 1);
  CHECK(run("iso --mode group --a " + z4 + " --b " + z4).code == 0);
  CHECK(run("iso --mode sring --m 3 --a " + z4 + " --b " + v4).code == 1);
}

TEST_CASE("errors, caps and round trips") {
  auto bad = write("bad.json", R"({"order": 2, "mul": [[0, 1], [1, 1]]})");
  CHECK(run("group --table " + bad).code == 2);
  CHECK(run("am --group Z4 --m 3", "SCHURPOWER_CAP=10").code == 3);
  CHECK(run("verify --theorem word --groups Z3 --samples 5").code == 2);
  auto w = run("wl --group Z3 --m 2");
  REQUIRE(w.code == 0);
  auto wf = write("w.json", w.out);
  CHECK(run("compare --a " + wf + " --b " + wf + " --mode equal").code == 0);
  auto g = run("group --name Q8 --individualize 3");
  REQUIRE(g.code == 0);
  auto gf = write("q8.json", g.out);
  auto again = run("group --table " + gf);
  REQUIRE(again.code == 0);
  auto a = nlohmann::json::parse(g.out), b = nlohmann::json::parse(again.out);
  CHECK(a["mul"] == b["mul"]);
  CHECK(a["coloring"] == b["coloring"]);
}

TEST_CASE("fingerprint and verify") {
  auto f = run("fingerprint --a Z4 --b Z2^2 --m 2");
  CHECK(f.code == 1);
  CHECK(nlohmann::json::parse(f.out)["equal"] == false);
  auto v = run("verify --theorem rank5 --groups Z3,Q8");
  REQUIRE(v.code == 0);
  auto j = nlohmann::json::parse(v.out);
  CHECK(j["reports"].size() == 2);
  auto s = run("verify --theorem word --groups Z3 --samples 10 --seed 4");
  CHECK(s.code == 0);
  CHECK(run("verify --theorem word --groups Z3 --samples 10 --seed 4").out == s.out);
}
