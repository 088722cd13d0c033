#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "cpr/covers.hpp"
#include "cpr/cpmap.hpp"
#include "cpr/cprlab.hpp"
#include "cpr/error.hpp"
#include "cpr/json_io.hpp"
#include "cpr/orderzero.hpp"
#include "cpr/projkit.hpp"

namespace cpr::cli {

namespace {

struct Context {
  Json in;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  int max_block = kDefaultMaxBlock;

  double tol_or(double fallback) const { return tol.value_or(fallback); }

  const Json& need(const char* key) const {
    auto it = in.find(key);
    if (it == in.end()) throw SchemaError(std::string("$: missing field '") + key + "'");
    return *it;
  }
  bool has(const char* key) const { return in.contains(key); }
  std::string path(const char* key) const { return std::string("$.") + key; }

  double number(const char* key) const {
    const Json& j = need(key);
    if (!j.is_number()) throw SchemaError(path(key) + ": expected a number");
    return j.get<double>();
  }
  int integer(const char* key) const {
    const Json& j = need(key);
    if (!j.is_number_integer()) throw SchemaError(path(key) + ": expected an integer");
    return j.get<int>();
  }

  FiniteMetricSpace space() const { return space_from_json(need("space"), path("space")); }
  Cover cover(const char* key = "cover") const { return cover_from_json(need(key), path(key)); }
  CPMap map() const { return cpmap_from_json(need("map"), max_block, path("map")); }
  CPApproximation approximation(const char* key = "approximation") const {
    return approximation_from_json(need(key), max_block, path(key));
  }
};

Json read_inputs(const std::vector<std::string>& files) {
  Json merged = Json::object();
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw SchemaError(f + ": cannot open input");
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw SchemaError(f + ": " + e.what());
    }
    if (!j.is_object()) throw SchemaError(f + ": top level must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (merged.contains(it.key())) throw SchemaError(f + ": field '" + it.key() + "' given by two inputs");
      merged[it.key()] = it.value();
    }
  }
  return merged;
}

void check_inside(const Cover& c, const FiniteMetricSpace& space, const char* what) {
  if (c.point_bound() > space.size())
    throw SchemaError(std::string("$.") + what + ": point index outside the space");
}

// cover ---------------------------------------------------------------------

Json cover_order(const Context& ctx) {
  Cover c = ctx.cover();
  int order = cover_order(c);
  Json out{{"order", order}};
  if (order >= 0) {
    auto through = c.memberships(c.point_bound());
    auto it = std::max_element(through.begin(), through.end(),
                               [](const auto& a, const auto& b) { return a.size() < b.size(); });
    out["witness_point"] = static_cast<int>(it - through.begin());
    out["witness_members"] = *it;
  }
  return out;
}

Json cover_strict_order(const Context& ctx) {
  Cover c = ctx.cover();
  auto clique = intersection_clique(c);
  return Json{{"strict_order", static_cast<int>(clique.size()) - 1}, {"clique", clique}};
}

Json cover_nerve(const Context& ctx) {
  Cover c = ctx.cover();
  SimplicialComplex k = nerve(c);
  return Json{{"nerve", to_json(k)}, {"dimension", k.dimension()}};
}

Json cover_refine(const Context& ctx) {
  FiniteMetricSpace space = ctx.space();
  Cover u = ctx.cover();
  check_inside(u, space, "cover");
  StrictRefinement s = strict_refinement(space, u);
  RefinementCheck r = refines(s.cover, u);
  return Json{{"refinement", to_json(s.cover)},
              {"faces", s.faces},
              {"input_order", cover_order(u)},
              {"input_strict_order", cover_strict_order(u)},
              {"order", cover_order(s.cover)},
              {"strict_order", cover_strict_order(s.cover)},
              {"covers", s.cover.covers(space.size())},
              {"refines", r.ok},
              {"assignment", r.assignment}};
}

Json cover_check_refines(const Context& ctx) {
  Cover v = ctx.cover();
  Cover u = ctx.cover("target");
  RefinementCheck r = refines(v, u);
  return Json{{"refines", r.ok}, {"assignment", r.assignment}, {"failing", r.failing}};
}

// approx --------------------------------------------------------------------

Json approx_build(const Context& ctx) {
  FiniteMetricSpace space = ctx.space();
  auto functions = functions_from_json(ctx.need("functions"), space, ctx.path("functions"));
  double eps = ctx.number("eps");
  CPApproximation a = build_cp_approx(space, functions, eps);
  double tol = ctx.tol_or(kDefaultTol);
  ApproxVerification v = verify_cp_approx(a, functions, eps, tol);
  return Json{{"approximation", to_json(a)},
              {"build", to_json(*a.build)},
              {"errors", v.errors},
              {"error", v.max_error},
              {"eps", eps},
              {"tol", tol},
              {"within", v.within},
              {"phi_order", to_json(v.phi_order)}};
}

Json approx_verify(const Context& ctx) {
  CPApproximation a = ctx.approximation();
  double eps = ctx.number("eps");
  double tol = ctx.tol_or(kDefaultTol);
  ApproxVerification v;
  if (ctx.has("elements")) {
    std::vector<Element> elements;
    const Json& list = ctx.need("elements");
    if (!list.is_array()) throw SchemaError("$.elements: expected an array");
    for (std::size_t i = 0; i < list.size(); ++i)
      elements.push_back(element_from_json(list[i], ctx.max_block, "$.elements[" + std::to_string(i) + "]"));
    v = verify_cp_approx(a, elements, eps, tol);
  } else {
    v = verify_cp_approx(a, functions_from_json(ctx.need("functions"), a.space, ctx.path("functions")), eps, tol);
  }
  Json out = to_json(v);
  out["eps"] = eps;
  out["tol"] = tol;
  return out;
}

Json approx_tensor(const Context& ctx) {
  return Json{{"approximation", to_json(tensor_approx(ctx.approximation(), ctx.integer("r")))}};
}

Json approx_sum(const Context& ctx) {
  std::optional<CPApproximation> second;
  if (ctx.has("second")) second = ctx.approximation("second");
  return Json{{"approximation", to_json(direct_sum_approx(ctx.approximation(), second))}};
}

Json approx_extract_cover(const Context& ctx) {
  Cover u = ctx.cover();
  int n = ctx.integer("n");
  std::optional<ExtractionReport> report;
  if (ctx.has("approximation") && ctx.need("approximation").is_object()) {
    CPApproximation a = ctx.approximation();
    check_inside(u, a.space, "cover");
    report = extract_cover(a.space, u, n, a);
  } else {
    FiniteMetricSpace space = ctx.space();
    check_inside(u, space, "cover");
    ExtractionSetup setup = extraction_setup(space, u, n);
    std::string source = "setup";
    if (ctx.has("approximation")) {
      const Json& j = ctx.need("approximation");
      if (!j.is_string() || (j != "matrix_pairs" && j != "setup"))
        throw SchemaError("$.approximation: expected an object, \"setup\" or \"matrix_pairs\"");
      source = j.get<std::string>();
    }
    CPApproximation a = source == "matrix_pairs" ? matrix_pair_approximation(space, ctx.seed)
                                                 : approximation_for_setup(space, setup);
    report = extract_cover(space, u, n, a, setup);
  }
  return to_json(*report);
}

Json approx_estimate(const Context& ctx) {
  FiniteMetricSpace space = ctx.space();
  const Json& s = ctx.need("scales");
  if (!s.is_array() || s.empty()) throw SchemaError("$.scales: expected a nonempty array");
  std::vector<double> scales;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s[i].is_number()) throw SchemaError("$.scales[" + std::to_string(i) + "]: expected a number");
    scales.push_back(s[i].get<double>());
  }
  std::vector<Function> probes;
  if (ctx.has("functions")) {
    probes = functions_from_json(ctx.need("functions"), space, ctx.path("functions"));
  } else if (space.coords()) {
    for (Eigen::Index k = 0; k < space.coords()->cols(); ++k) probes.push_back(space.coords()->col(k));
  }
  double probe_eps = ctx.has("probe_eps") ? ctx.number("probe_eps") : 0.25;
  int net_seeds = ctx.has("net_seeds") ? ctx.integer("net_seeds") : 4;
  Json out = to_json(estimate_cpr_commutative(space, scales, probes, probe_eps, net_seeds));
  out["probe_eps"] = probe_eps;
  out["label"] = "at scale";
  return out;
}

// cpmap ---------------------------------------------------------------------

Json cpmap_choi(const Context& ctx) {
  double tol = ctx.tol_or(kDefaultTol);
  Json out = to_json(choi_blocks(ctx.map(), tol));
  out["tol"] = tol;
  return out;
}

Json cpmap_stinespring(const Context& ctx) {
  double tol = ctx.tol_or(kDefaultTol);
  Json out = to_json(stinespring(ctx.map(), tol));
  out["tol"] = tol;
  return out;
}

Json cpmap_order_bounds(const Context& ctx) {
  double tol = ctx.tol_or(kOrthogonalityTol);
  Json out = to_json(strict_order_bounds(ctx.map(), tol, ctx.seed));
  out["tol"] = tol;
  return out;
}

Json cpmap_order_zero(const Context& ctx) {
  CPMap phi = ctx.map();
  double tol = ctx.tol_or(kOrthogonalityTol);
  OrderZeroCertificate c = certify_order_zero(phi, tol);
  Json out = to_json(c);
  out["projection_case"] = nullptr;
  if (c.order_zero) {
    ProjectionCaseReport p = check_projection_case(phi, tol);
    out["projection_case"] = Json{{"verdict", to_string(p.verdict)},
                                  {"projection_defect", p.projection_defect},
                                  {"multiplicativity_defect", p.multiplicativity_defect}};
  }
  return out;
}

Json cpmap_repair(const Context& ctx) {
  if (ctx.has("element")) {
    Element h = element_from_json(ctx.need("element"), ctx.max_block, ctx.path("element"));
    double eps = ctx.number("eps");
    double tol = ctx.tol_or(kDefaultTol);
    Json out = to_json(repair_almost_projection(h, eps, tol));
    out["kind"] = "almost_projection";
    out["eps"] = eps;
    out["tol"] = tol;
    out["dist_p_h_bound"] = 2 * eps;
    out["dist_p_c_bound"] = 4 * eps;
    return out;
  }
  if (ctx.has("map")) {
    double gamma = ctx.number("gamma");
    double tol = ctx.tol_or(kOrthogonalityTol);
    Json out = to_json(perturb_to_hom(ctx.map(), gamma, tol, ctx.seed));
    out["kind"] = "order_zero_map";
    out["gamma"] = gamma;
    out["tol"] = tol;
    return out;
  }
  throw SchemaError("$: repair needs either 'element' and 'eps' or 'map' and 'gamma'");
}

Json cpmap_decompose(const Context& ctx) {
  double tol = ctx.tol_or(kOrthogonalityTol);
  Json out = to_json(decompose_order_zero(ctx.map(), tol));
  out["tol"] = tol;
  return out;
}

using Handler = std::function<Json(const Context&)>;

const std::map<std::string, std::map<std::string, Handler>>& handlers() {
  static const std::map<std::string, std::map<std::string, Handler>> table{
      {"cover",
       {{"order", cover_order},
        {"strict-order", cover_strict_order},
        {"nerve", cover_nerve},
        {"refine", cover_refine},
        {"check-refines", cover_check_refines}}},
      {"approx",
       {{"build", approx_build},
        {"verify", approx_verify},
        {"tensor", approx_tensor},
        {"sum", approx_sum},
        {"extract-cover", approx_extract_cover},
        {"estimate", approx_estimate}}},
      {"cpmap",
       {{"choi", cpmap_choi},
        {"stinespring", cpmap_stinespring},
        {"order-bounds", cpmap_order_bounds},
        {"order-zero", cpmap_order_zero},
        {"repair", cpmap_repair},
        {"decompose", cpmap_decompose}}},
  };
  return table;
}

void emit(const Json& report, const std::string& out_path, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw Error(out_path + ": cannot open output");
  f << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Completely positive rank toolkit", "cprtool"};
  Context ctx;
  double tol = 0.0;
  std::vector<std::string> inputs;
  std::string out_path;
  app.add_option("--seed", ctx.seed, "random seed (default 0)");
  auto* tol_opt = app.add_option("--tol", tol, "tolerance override")->check(CLI::PositiveNumber);
  app.add_option("--max-block", ctx.max_block, "largest block size accepted")->check(CLI::Range(1, 4096));
  app.add_option("--in", inputs, "input JSON file (repeatable; fields are merged)")->allow_extra_args(false);
  app.add_option("--out", out_path, "output JSON file (default stdout)");
  app.require_subcommand(1);

  std::string group, action;
  for (const auto& [name, actions] : handlers()) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
    std::vector<std::string> names;
    for (const auto& [a, h] : actions) names.push_back(a);
    sub->add_option("action", action)->required()->check(CLI::IsMember(names));
    sub->callback([&group, name = name] { group = name; });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kSchema;
  }
  if (tol_opt->count() > 0) ctx.tol = tol;

  auto fail = [&](int code, const std::string& kind, const std::string& message, const std::string& step) {
    err << "error (" << kind << "): " << message << "\n";
    if (!out_path.empty()) {
      Json report{{"error", Json{{"kind", kind}, {"message", message}}}, {"exit_code", code}};
      if (!step.empty()) report["error"]["step"] = step;
      try {
        emit(report, out_path, out);
      } catch (const std::exception&) {
      }
    }
    return code;
  };

  try {
    ctx.in = read_inputs(inputs);
    Json report = handlers().at(group).at(action)(ctx);
    emit(report, out_path, out);
    return kOk;
  } catch (const SchemaError& e) {
    return fail(kSchema, "schema", e.what(), "");
  } catch (const Json::exception& e) {
    return fail(kSchema, "schema", e.what(), "");
  } catch (const PreconditionError& e) {
    return fail(kPrecondition, "precondition", e.what(), "");
  } catch (const PipelineError& e) {
    return fail(kPipeline, "pipeline", e.what(), e.step());
  } catch (const std::exception& e) {
    return fail(kFailure, "internal", e.what(), "");
  }
}

}  // namespace cpr::cli
