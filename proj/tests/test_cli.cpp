#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "cpr/json_io.hpp"
#include "fixtures.hpp"

using namespace cpr;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  int next = 0;

  Scratch() {
    dir = fs::temp_directory_path() / ("cprtool_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }

  std::string write(const Json& j) {
    fs::path p = dir / ("in" + std::to_string(next++) + ".json");
    std::ofstream(p) << j.dump();
    return p.string();
  }
  std::string raw(const std::string& text) {
    fs::path p = dir / ("in" + std::to_string(next++) + ".json");
    std::ofstream(p) << text;
    return p.string();
  }
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Outcome call(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Json space_json(const FiniteMetricSpace& s) { return to_json(s); }

CPApproximation halved_identity(const FiniteMetricSpace& space) {
  const int p = space.size();
  Algebra c = Algebra::abelian(p);
  CPMap psi = CPMap::from_matrix(c, c, Matrix::Identity(p, p), CodomainKind::algebra);
  CPMap phi = CPMap::from_matrix(c, c, Matrix::Identity(p, p) * Complex(0.5, 0), CodomainKind::functions);
  std::vector<int> pts(p);
  for (int i = 0; i < p; ++i) pts[i] = i;
  return {space, 1, psi, phi, pts, std::nullopt};
}

}  // namespace

TEST_CASE("cover commands") {
  Scratch s;
  std::string arcs = s.write({{"cover", to_json(fx::three_arcs(60))}});
  Outcome strict = call({"--in", arcs, "cover", "strict-order"});
  REQUIRE(strict.code == 0);
  CHECK(strict.json()["strict_order"] == 2);
  CHECK(strict.json()["clique"].size() == 3);

  Outcome order = call({"--in", arcs, "cover", "order"});
  CHECK(order.json()["order"] == 1);

  Outcome nerve = call({"--in", arcs, "cover", "nerve"});
  CHECK(nerve.json()["dimension"] == 1);

  std::string space = s.write({{"space", space_json(FiniteMetricSpace::circle_grid(60))}});
  Outcome refined = call({"--in", arcs, "--in", space, "cover", "refine"});
  REQUIRE(refined.code == 0);
  Json r = refined.json();
  CHECK(r["covers"] == true);
  CHECK(r["refines"] == true);
  CHECK(r["strict_order"].get<int>() <= r["input_order"].get<int>());
  CHECK(r["strict_order"] == 1);

  // Feed the refinement back to strict-order.
  std::string again = s.write({{"cover", r["refinement"]}});
  CHECK(call({"--in", again, "cover", "strict-order"}).json()["strict_order"] == 1);

  std::string target = s.write({{"target", to_json(fx::three_arcs(60))}});
  Outcome check = call({"--in", again, "--in", target, "cover", "check-refines"});
  CHECK(check.json()["refines"] == true);
}

TEST_CASE("cpmap commands") {
  Scratch s;
  std::string tr = s.write({{"map", to_json(fx::trace_map(2))}});
  Outcome bounds = call({"--in", tr, "cpmap", "order-bounds"});
  REQUIRE(bounds.code == 0);
  CHECK(bounds.json()["lower"] == 1);
  CHECK(bounds.json()["upper"] == 1);

  std::string id = s.write({{"map", to_json(fx::identity_map(3))}});
  Outcome st = call({"--in", id, "cpmap", "stinespring"});
  REQUIRE(st.code == 0);
  CHECK(st.json()["isometry"] == true);
  CHECK(call({"--in", id, "cpmap", "choi"}).json()["completely_positive"] == true);
  Outcome oz = call({"--in", id, "cpmap", "order-zero"});
  CHECK(oz.json()["projection_case"]["verdict"] == "true");
  Outcome not_zero = call({"--in", tr, "cpmap", "order-zero"});
  REQUIRE(not_zero.code == 0);
  CHECK(not_zero.json()["order_zero"] == false);
  CHECK(not_zero.json()["projection_case"].is_null());

  std::string d = s.write({{"map", to_json(fx::tensor_diag_map(2, fx::diag_matrix({0.5, 1.0})))}});
  Outcome dec = call({"--in", d, "cpmap", "decompose"});
  REQUIRE(dec.code == 0);
  Json support = dec.json()["blocks"][0]["support"];
  REQUIRE(support.size() == 2);
  CHECK(support[0].get<double>() == doctest::Approx(0.5));
  CHECK(support[1].get<double>() == doctest::Approx(1.0));

  // Not order zero: decomposition is refused with a precondition error.
  CHECK(call({"--in", tr, "cpmap", "decompose"}).code == 3);

  std::string h = s.write({{"element", to_json(fx::diag({0.95, 0.03}))}, {"eps", 0.05}});
  Outcome rep = call({"--in", h, "cpmap", "repair"});
  REQUIRE(rep.code == 0);
  CHECK(rep.json()["kind"] == "almost_projection");
  CHECK(rep.json()["dist_p_h"].get<double>() < 0.1);

  std::string m = s.write({{"map", to_json(fx::tensor_diag_map(2, fx::diag_matrix({0.97, 1.0})))}, {"gamma", 0.03}});
  Outcome hom = call({"--in", m, "cpmap", "repair"});
  REQUIRE(hom.code == 0);
  CHECK(hom.json()["kind"] == "order_zero_map");
}

TEST_CASE("approx commands") {
  Scratch s;
  FiniteMetricSpace grid = FiniteMetricSpace::interval_grid(101);
  std::string build_in = s.write({{"space", space_json(grid)},
                                  {"functions", Json::parse(R"([{"coordinate": 0}])")},
                                  {"eps", 0.2}});
  Outcome built = call({"--in", build_in, "approx", "build"});
  REQUIRE(built.code == 0);
  CHECK(built.json()["error"].get<double>() <= 0.2);
  CHECK(built.json()["within"] == true);

  std::string approx = s.write({{"approximation", built.json()["approximation"]}});
  std::string probes = s.write({{"functions", Json::parse(R"([{"coordinate": 0}])")}, {"eps", 0.2}});
  Outcome ver = call({"--in", approx, "--in", probes, "approx", "verify"});
  REQUIRE(ver.code == 0);
  CHECK(ver.json()["within"] == true);

  std::string r2 = s.write({{"r", 2}});
  Outcome ten = call({"--in", approx, "--in", r2, "approx", "tensor"});
  REQUIRE(ten.code == 0);
  CHECK(ten.json()["approximation"]["matrix_size"] == 2);
  CHECK(call({"--in", approx, "approx", "sum"}).code == 0);

  FiniteMetricSpace g201 = FiniteMetricSpace::interval_grid(201);
  std::string ext = s.write(
      {{"space", space_json(g201)}, {"cover", to_json(fx::interval_chain(g201))}, {"n", 1}});
  Outcome round = call({"--in", ext, "approx", "extract-cover"});
  REQUIRE(round.code == 0);
  CHECK(round.json()["order"].get<int>() <= 1);
  CHECK(round.json()["refines"] == true);
  CHECK(round.json()["covers"] == true);

  std::string est = s.write({{"space", Json{{"interval", 101}}}, {"scales", {0.05, 0.1}}});
  Outcome e = call({"--in", est, "approx", "estimate"});
  REQUIRE(e.code == 0);
  CHECK(e.json()["label"] == "at scale");
  CHECK(e.json()["value"] == 1);
}

TEST_CASE("identity approximation verifies with zero error") {
  Scratch s;
  FiniteMetricSpace grid = FiniteMetricSpace::interval_grid(11);
  CPApproximation id = halved_identity(grid);
  id.phi = CPMap::from_matrix(id.phi.domain(), id.phi.codomain(), id.phi.images() * Complex(2, 0),
                              CodomainKind::functions);
  std::string in = s.write({{"approximation", to_json(id)},
                            {"functions", Json::parse(R"([{"coordinate": 0}, {"bump": {"center": 3, "radius": 0.3}}])")},
                            {"eps", 1e-12}});
  Outcome v = call({"--in", in, "approx", "verify"});
  REQUIRE(v.code == 0);
  for (const auto& e : v.json()["errors"]) CHECK(e.get<double>() == 0.0);
}

TEST_CASE("exit codes") {
  Scratch s;
  std::string bad = s.raw("{ not json");
  CHECK(call({"--in", bad, "cover", "order"}).code == 2);
  CHECK(call({"--bogus", "cover", "order"}).code == 2);
  CHECK(call({"cover", "unknown-action"}).code == 2);
  CHECK(call({}).code == 2);

  std::string no_cover = s.write({{"covers", 1}});
  CHECK(call({"--in", no_cover, "cover", "order"}).code == 2);
  std::string a = s.write({{"cover", to_json(fx::three_arcs(30))}});
  std::string dup = s.write({{"cover", to_json(fx::three_arcs(30))}});
  CHECK(call({"--in", a, "--in", dup, "cover", "order"}).code == 2);

  std::string neg = s.write({{"element", to_json(fx::diag({0.5, 0.5}))}, {"eps", 0.3}});
  CHECK(call({"--in", neg, "cpmap", "repair"}).code == 3);

  // A poor approximation stops the extraction at a named step.
  FiniteMetricSpace grid = FiniteMetricSpace::interval_grid(41);
  std::string poor = s.write({{"approximation", to_json(halved_identity(grid))},
                              {"cover", to_json(fx::interval_chain(grid))},
                              {"n", 1}});
  fs::path report = s.dir / "report.json";
  Outcome fail = call({"--in", poor, "--out", report.string(), "approx", "extract-cover"});
  CHECK(fail.code == 4);
  Json written = Json::parse(std::ifstream(report));
  CHECK(written["exit_code"] == 4);
  CHECK(written["error"]["kind"] == "pipeline");
  CHECK_FALSE(written["error"]["step"].get<std::string>().empty());
}

TEST_CASE("repeated runs are byte-identical") {
  Scratch s;
  Rng rng(5);
  std::string m = s.write({{"map", to_json(fx::random_cp_map(Algebra({1, 2}), 3, rng))}});
  std::string circle = s.write({{"space", space_json(FiniteMetricSpace::circle_grid(40))},
                                {"cover", to_json(fx::three_arcs(40))},
                                {"n", 1},
                                {"approximation", "matrix_pairs"}});
  std::vector<std::vector<std::string>> runs{
      {"--seed", "3", "--in", m, "cpmap", "order-bounds"},
      {"--seed", "3", "--in", m, "cpmap", "stinespring"},
      {"--seed", "3", "--in", m, "cpmap", "choi"},
      {"--seed", "7", "--in", circle, "approx", "extract-cover"},
  };
  for (const auto& args : runs) {
    Outcome a = call(args), b = call(args);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
}
