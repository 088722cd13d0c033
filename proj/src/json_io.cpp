#include "cpr/json_io.hpp"

#include <algorithm>
#include <cmath>

#include "cpr/error.hpp"

namespace cpr {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path, std::string("missing field '") + key + "'");
  return *it;
}

std::string sub(const std::string& path, const std::string& key) { return path + "." + key; }
std::string sub(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

int as_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  auto v = j.get<std::int64_t>();
  if (v < INT32_MIN || v > INT32_MAX) fail(path, "integer out of range");
  return static_cast<int>(v);
}

int as_index(const Json& j, const std::string& path) {
  int v = as_int(j, path);
  if (v < 0) fail(path, "expected a nonnegative integer");
  return v;
}

double as_double(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

const Json& as_array(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

std::vector<int> index_list(const Json& j, const std::string& path) {
  std::vector<int> out;
  for (std::size_t i = 0; i < as_array(j, path).size(); ++i) out.push_back(as_index(j[i], sub(path, i)));
  return out;
}

std::vector<std::string> string_list(const Json& j, const std::string& path) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < as_array(j, path).size(); ++i) {
    if (!j[i].is_string()) fail(sub(path, i), "expected a string");
    out.push_back(j[i].get<std::string>());
  }
  return out;
}

Eigen::MatrixXd real_matrix(const Json& j, const std::string& path) {
  as_array(j, path);
  if (j.empty()) fail(path, "empty matrix");
  const std::size_t cols = as_array(j[0], sub(path, 0)).size();
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto rp = sub(path, r);
    if (as_array(j[r], rp).size() != cols) fail(rp, "ragged rows");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = as_double(j[r][c], sub(rp, c));
  }
  return m;
}

Json real_matrix_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

template <class T>
Json list_json(const std::vector<T>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(x);
  return out;
}

Json cover_list_json(const std::vector<std::vector<int>>& v) {
  Json out = Json::array();
  for (const auto& m : v) out.push_back(list_json(m));
  return out;
}

// The image of a unit in the encoding of the codomain kind.
Json value_json(const Element& e, CodomainKind kind) {
  switch (kind) {
    case CodomainKind::matrix:
      return to_json(Matrix(e.block(0)));
    case CodomainKind::functions: {
      Json out = Json::array();
      for (Eigen::Index i = 0; i < e.coefficients().size(); ++i) out.push_back(to_json(e.coefficients()(i)));
      return out;
    }
    case CodomainKind::matrix_functions: {
      Json out = Json::array();
      for (int b = 0; b < e.block_count(); ++b) out.push_back(to_json(Matrix(e.block(b))));
      return out;
    }
    case CodomainKind::algebra:
      break;
  }
  return to_json(e);
}

Element value_from_json(const Json& j, const Algebra& codomain, CodomainKind kind, int max_block,
                        const std::string& path) {
  Element e(codomain);
  if (j.is_object()) {
    e = element_from_json(j, max_block, path);
  } else if (kind == CodomainKind::matrix) {
    e = Element(codomain, std::vector<Matrix>{matrix_from_json(j, path)});
  } else if (kind == CodomainKind::functions) {
    as_array(j, path);
    if (static_cast<int>(j.size()) != codomain.dimension()) fail(path, "expected one value per point");
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(i) = complex_from_json(j[i], sub(path, i));
    e = Element::from_coefficients(codomain, v);
  } else if (kind == CodomainKind::matrix_functions) {
    as_array(j, path);
    if (static_cast<int>(j.size()) != codomain.block_count()) fail(path, "expected one matrix per point");
    std::vector<Matrix> blocks;
    for (std::size_t i = 0; i < j.size(); ++i) blocks.push_back(matrix_from_json(j[i], sub(path, i)));
    try {
      e = Element(codomain, blocks);
    } catch (const Error& ex) {
      fail(path, ex.what());
    }
  } else {
    fail(path, "expected an element {\"blocks\": ...}");
  }
  if (!(e.algebra() == codomain)) fail(path, "value does not lie in the codomain");
  return e;
}

Json codomain_json(const Algebra& a, CodomainKind kind) {
  Json out = Json::object();
  switch (kind) {
    case CodomainKind::matrix:
      out["matrix"] = a.block_size(0);
      break;
    case CodomainKind::functions:
      out["space"] = a.block_count();
      break;
    case CodomainKind::matrix_functions:
      out["space"] = a.block_count();
      out["matrix"] = a.block_count() > 0 ? a.block_size(0) : 0;
      break;
    case CodomainKind::algebra:
      out = to_json(a);
      break;
  }
  return out;
}

int space_points(const Json& j, const std::string& path) {
  if (j.is_object()) return space_from_json(j, path).size();
  int p = as_int(j, path);
  if (p < 1) fail(path, "expected a positive point count");
  return p;
}

std::pair<Algebra, CodomainKind> codomain_from_json(const Json& j, int max_block, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  try {
    const bool has_space = j.contains("space");
    const bool has_matrix = j.contains("matrix");
    if (has_space && has_matrix) {
      int p = space_points(j["space"], sub(path, "space"));
      int n = as_int(j["matrix"], sub(path, "matrix"));
      return {Algebra(std::vector<int>(p, n), max_block), CodomainKind::matrix_functions};
    }
    if (has_space) return {Algebra::abelian(space_points(j["space"], sub(path, "space"))), CodomainKind::functions};
    if (has_matrix) return {Algebra::matrix(as_int(j["matrix"], sub(path, "matrix")), max_block), CodomainKind::matrix};
    return {algebra_from_json(j, max_block, path), CodomainKind::algebra};
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& ex) {
    fail(path, ex.what());
  }
}

Json elements_json(const std::vector<Element>& v) {
  Json out = Json::array();
  for (const auto& e : v) out.push_back(to_json(e));
  return out;
}

}  // namespace

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) fail(path, "expected [re, im]");
  return {as_double(j[0], sub(path, 0)), as_double(j[1], sub(path, 1))};
}

Json to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

Matrix matrix_from_json(const Json& j, const std::string& path) {
  as_array(j, path);
  if (j.empty()) fail(path, "empty matrix");
  const std::size_t cols = as_array(j[0], sub(path, 0)).size();
  Matrix m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto rp = sub(path, r);
    if (as_array(j[r], rp).size() != cols) fail(rp, "ragged rows");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c], sub(rp, c));
  }
  return m;
}

Json to_json(const Algebra& a) {
  Json sizes = Json::array();
  for (int r : a.block_sizes()) sizes.push_back(r);
  return Json{{"block_sizes", sizes}};
}

Algebra algebra_from_json(const Json& j, int max_block, const std::string& path) {
  if (j.is_object() && j.contains("matrix") && !j.contains("block_sizes")) {
    int n = as_int(j["matrix"], sub(path, "matrix"));
    try {
      return Algebra::matrix(n, max_block);
    } catch (const Error& ex) {
      fail(path, ex.what());
    }
  }
  const auto p = sub(path, "block_sizes");
  std::vector<int> sizes;
  const Json& s = field(j, "block_sizes", path);
  for (std::size_t i = 0; i < as_array(s, p).size(); ++i) sizes.push_back(as_int(s[i], sub(p, i)));
  try {
    return Algebra(sizes, max_block);
  } catch (const Error& ex) {
    fail(path, ex.what());
  }
}

Json to_json(const Element& e) {
  Json blocks = Json::array();
  for (int b = 0; b < e.block_count(); ++b) blocks.push_back(to_json(Matrix(e.block(b))));
  return Json{{"blocks", blocks}};
}

Element element_from_json(const Json& j, int max_block, const std::string& path) {
  const auto p = sub(path, "blocks");
  const Json& b = field(j, "blocks", path);
  std::vector<Matrix> blocks;
  std::vector<int> sizes;
  for (std::size_t i = 0; i < as_array(b, p).size(); ++i) {
    blocks.push_back(matrix_from_json(b[i], sub(p, i)));
    if (blocks.back().rows() != blocks.back().cols()) fail(sub(p, i), "block is not square");
    sizes.push_back(static_cast<int>(blocks.back().rows()));
  }
  try {
    return Element(Algebra(sizes, max_block), blocks);
  } catch (const Error& ex) {
    fail(path, ex.what());
  }
}

Json to_json(const CPMap& phi) {
  Json images = Json::array();
  const Algebra& dom = phi.domain();
  for (int k = 0; k < dom.dimension(); ++k) {
    if (phi.images().col(k).isZero(0.0)) continue;
    UnitIndex u = dom.unit(k);
    images.push_back(Json{{"block", u.block},
                          {"row", u.row},
                          {"col", u.col},
                          {"value", value_json(phi.image(k), phi.codomain_kind())}});
  }
  return Json{{"domain", to_json(dom)},
              {"codomain", codomain_json(phi.codomain(), phi.codomain_kind())},
              {"unit_images", images}};
}

CPMap cpmap_from_json(const Json& j, int max_block, const std::string& path) {
  Algebra dom = algebra_from_json(field(j, "domain", path), max_block, sub(path, "domain"));
  auto [cod, kind] = codomain_from_json(field(j, "codomain", path), max_block, sub(path, "codomain"));
  std::vector<Element> images(dom.dimension(), Element(cod));
  std::vector<bool> seen(dom.dimension(), false);
  const auto ip = sub(path, "unit_images");
  const Json& list = j.contains("unit_images") ? j["unit_images"] : Json::array();
  for (std::size_t i = 0; i < as_array(list, ip).size(); ++i) {
    const auto ep = sub(ip, i);
    const Json& entry = list[i];
    int b = as_index(field(entry, "block", ep), sub(ep, "block"));
    int r = as_index(field(entry, "row", ep), sub(ep, "row"));
    int c = as_index(field(entry, "col", ep), sub(ep, "col"));
    if (b >= dom.block_count() || r >= dom.block_size(b) || c >= dom.block_size(b)) fail(ep, "unit outside the domain");
    int flat = dom.unit_flat(b, r, c);
    if (seen[flat]) fail(ep, "duplicate unit image");
    seen[flat] = true;
    images[flat] = value_from_json(field(entry, "value", ep), cod, kind, max_block, sub(ep, "value"));
  }
  return CPMap(dom, cod, std::move(images), kind);
}

Json to_json(const FiniteMetricSpace& space) {
  Json out{{"metric", real_matrix_json(space.metric())}};
  if (space.coords()) out["coords"] = real_matrix_json(*space.coords());
  return out;
}

FiniteMetricSpace space_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  try {
    if (j.contains("interval")) return FiniteMetricSpace::interval_grid(as_int(j["interval"], sub(path, "interval")));
    if (j.contains("circle")) return FiniteMetricSpace::circle_grid(as_int(j["circle"], sub(path, "circle")));
    if (j.contains("torus")) return FiniteMetricSpace::torus_grid(as_int(j["torus"], sub(path, "torus")));
    const Json& metric = field(j, "metric", path);
    if (metric.is_string()) {
      if (metric.get<std::string>() != "euclidean") fail(sub(path, "metric"), "unknown metric name");
      return FiniteMetricSpace::euclidean(real_matrix(field(j, "coords", path), sub(path, "coords")));
    }
    Eigen::MatrixXd d = real_matrix(metric, sub(path, "metric"));
    if (j.contains("coords")) return FiniteMetricSpace(d, real_matrix(j["coords"], sub(path, "coords")));
    return FiniteMetricSpace(d);
  } catch (const SchemaError&) {
    throw;
  } catch (const Error& ex) {
    fail(path, ex.what());
  }
}

Json to_json(const Cover& c) {
  Json out{{"members", cover_list_json(c.members)}};
  if (!c.labels.empty()) out["labels"] = list_json(c.labels);
  return out;
}

Cover cover_from_json(const Json& j, const std::string& path) {
  const auto mp = sub(path, "members");
  const Json& m = field(j, "members", path);
  std::vector<std::vector<int>> members;
  for (std::size_t i = 0; i < as_array(m, mp).size(); ++i) members.push_back(index_list(m[i], sub(mp, i)));
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = string_list(j["labels"], sub(path, "labels"));
  try {
    return Cover(std::move(members), std::move(labels));
  } catch (const Error& ex) {
    fail(path, ex.what());
  }
}

Json to_json(const SimplicialComplex& k) {
  Json out{{"vertex_count", k.vertex_count()},
           {"faces", cover_list_json(k.facets())},
           {"dimension", k.dimension()},
           {"f_vector", list_json(k.f_vector())}};
  if (!k.labels().empty()) out["labels"] = list_json(k.labels());
  return out;
}

SimplicialComplex simplicial_from_json(const Json& j, const std::string& path) {
  const auto fp = sub(path, "faces");
  const Json& f = field(j, "faces", path);
  std::vector<std::vector<int>> faces;
  int bound = 0;
  for (std::size_t i = 0; i < as_array(f, fp).size(); ++i) {
    faces.push_back(index_list(f[i], sub(fp, i)));
    for (int v : faces.back()) bound = std::max(bound, v + 1);
  }
  int n = j.contains("vertex_count") ? as_index(j["vertex_count"], sub(path, "vertex_count")) : bound;
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = string_list(j["labels"], sub(path, "labels"));
  try {
    return SimplicialComplex(n, std::move(faces), std::move(labels));
  } catch (const Error& ex) {
    fail(path, ex.what());
  }
}

std::vector<Function> functions_from_json(const Json& j, const FiniteMetricSpace& space, const std::string& path) {
  std::vector<Function> out;
  const int n = space.size();
  for (std::size_t i = 0; i < as_array(j, path).size(); ++i) {
    const auto p = sub(path, i);
    const Json& e = j[i];
    Function f(n);
    if (e.is_array()) {
      if (static_cast<int>(e.size()) != n) fail(p, "expected one value per point");
      for (int x = 0; x < n; ++x) f(x) = as_double(e[x], sub(p, x));
    } else if (e.is_object() && e.contains("coordinate")) {
      int k = as_index(e["coordinate"], sub(p, "coordinate"));
      if (!space.coords() || k >= space.coords()->cols()) fail(p, "the space has no such coordinate");
      f = space.coords()->col(k);
    } else if (e.is_object() && e.contains("bump")) {
      const auto bp = sub(p, "bump");
      int c = as_index(field(e["bump"], "center", bp), sub(bp, "center"));
      double r = as_double(field(e["bump"], "radius", bp), sub(bp, "radius"));
      if (c >= n) fail(bp, "center outside the space");
      if (!(r > 0)) fail(bp, "radius must be positive");
      for (int x = 0; x < n; ++x) f(x) = std::max(0.0, 1.0 - space.distance(c, x) / r);
    } else {
      fail(p, "expected values, {\"coordinate\"} or {\"bump\"}");
    }
    out.push_back(std::move(f));
  }
  return out;
}

Json to_json(const CPApproximation& a) {
  return Json{{"space", to_json(a.space)},
              {"matrix_size", a.matrix_size},
              {"F", to_json(a.F())},
              {"psi", to_json(a.psi)},
              {"phi", to_json(a.phi)},
              {"points", list_json(a.points)}};
}

CPApproximation approximation_from_json(const Json& j, int max_block, const std::string& path) {
  FiniteMetricSpace space = space_from_json(field(j, "space", path), sub(path, "space"));
  int r = j.contains("matrix_size") ? as_int(j["matrix_size"], sub(path, "matrix_size")) : 1;
  if (r < 1) fail(sub(path, "matrix_size"), "expected a positive size");
  CPMap psi = cpmap_from_json(field(j, "psi", path), max_block, sub(path, "psi"));
  CPMap phi = cpmap_from_json(field(j, "phi", path), max_block, sub(path, "phi"));
  std::vector<int> points;
  if (j.contains("points")) points = index_list(j["points"], sub(path, "points"));
  Algebra a(std::vector<int>(space.size(), r), max_block);
  if (!(psi.domain() == a)) fail(sub(path, "psi"), "domain is not C(X, M_r) for the space");
  if (!(phi.codomain() == a)) fail(sub(path, "phi"), "codomain is not C(X, M_r) for the space");
  if (!(psi.codomain() == phi.domain())) fail(path, "psi and phi disagree on F");
  if (j.contains("F") && !(algebra_from_json(j["F"], max_block, sub(path, "F")) == psi.codomain()))
    fail(sub(path, "F"), "does not match psi");
  for (std::size_t i = 0; i < points.size(); ++i)
    if (points[i] >= space.size()) fail(sub(sub(path, "points"), i), "point outside the space");
  return CPApproximation{std::move(space), r, std::move(psi), std::move(phi), std::move(points), std::nullopt};
}

Json to_json(const OrderZeroDecomposition& d) {
  Json blocks = Json::array();
  for (const auto& part : d.blocks) {
    Json sigma = Json::array();
    const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(part.sigma.size()))));
    for (std::size_t k = 0; k < part.sigma.size(); ++k)
      sigma.push_back(Json{{"row", static_cast<int>(k) % r}, {"col", static_cast<int>(k) / r}, {"value", to_json(part.sigma[k])}});
    blocks.push_back(Json{{"support", list_json(part.support)},
                          {"h", to_json(part.h)},
                          {"support_projection", to_json(part.support_projection)},
                          {"sigma", sigma}});
  }
  return Json{{"blocks", blocks},
              {"reconstruction_error", d.reconstruction_error},
              {"multiplicativity_defect", d.multiplicativity_defect}};
}

OrderZeroDecomposition decomposition_from_json(const Json& j, int max_block, const std::string& path) {
  OrderZeroDecomposition d;
  const auto bp = sub(path, "blocks");
  const Json& blocks = field(j, "blocks", path);
  for (std::size_t i = 0; i < as_array(blocks, bp).size(); ++i) {
    const auto p = sub(bp, i);
    const Json& b = blocks[i];
    OrderZeroPart part{{}, element_from_json(field(b, "h", p), max_block, sub(p, "h")), Element(Algebra::zero()), {}};
    const auto sp = sub(p, "support");
    const Json& s = field(b, "support", p);
    for (std::size_t k = 0; k < as_array(s, sp).size(); ++k) part.support.push_back(as_double(s[k], sub(sp, k)));
    part.support_projection = b.contains("support_projection")
                                  ? element_from_json(b["support_projection"], max_block, sub(p, "support_projection"))
                                  : support_projection(part.h);
    const auto gp = sub(p, "sigma");
    const Json& g = field(b, "sigma", p);
    as_array(g, gp);
    const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(g.size()))));
    if (r * r != static_cast<int>(g.size())) fail(gp, "expected a full table of matrix units");
    part.sigma.assign(g.size(), Element(part.h.algebra()));
    std::vector<bool> seen(g.size(), false);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto ep = sub(gp, k);
      int row = as_index(field(g[k], "row", ep), sub(ep, "row"));
      int col = as_index(field(g[k], "col", ep), sub(ep, "col"));
      if (row >= r || col >= r) fail(ep, "unit outside the block");
      int flat = col * r + row;
      if (seen[flat]) fail(ep, "duplicate unit");
      seen[flat] = true;
      part.sigma[flat] = element_from_json(field(g[k], "value", ep), max_block, sub(ep, "value"));
      if (!(part.sigma[flat].algebra() == part.h.algebra())) fail(ep, "value is not in the algebra of h");
    }
    d.blocks.push_back(std::move(part));
  }
  if (j.contains("reconstruction_error"))
    d.reconstruction_error = as_double(j["reconstruction_error"], sub(path, "reconstruction_error"));
  if (j.contains("multiplicativity_defect"))
    d.multiplicativity_defect = as_double(j["multiplicativity_defect"], sub(path, "multiplicativity_defect"));
  return d;
}

Json to_json(const OrderBounds& b) {
  Json out{{"lower", b.lower},
           {"upper", b.upper},
           {"exact", b.exact},
           {"method", b.method},
           {"block_order_zero", list_json(b.block_order_zero)}};
  if (b.witness) {
    out["witness"] = Json{{"projections", elements_json(b.witness->projections)},
                          {"blocks", list_json(b.witness->blocks)},
                          {"min_product", b.witness->min_product},
                          {"orthogonality", b.witness->orthogonality},
                          {"evaluations", b.witness->evaluations}};
  }
  return out;
}

Json to_json(const OrderZeroCertificate& c) {
  Json out{{"order_zero", c.order_zero}, {"tol", c.tol}, {"max_defect", c.max_defect}};
  if (c.witness) {
    out["witness"] = Json{{"check", c.witness->check},
                          {"block", c.witness->block},
                          {"other", c.witness->other},
                          {"unit", c.witness->unit},
                          {"value", c.witness->value}};
  }
  Json blocks = Json::array();
  for (const auto& b : c.blocks) blocks.push_back(Json{{"h", to_json(b.h)}, {"support", to_json(b.support)}});
  out["blocks"] = blocks;
  return out;
}

Json to_json(const ChoiReport& r) {
  Json blocks = Json::array();
  for (const auto& b : r.blocks) {
    blocks.push_back(Json{{"domain_block", b.domain_block},
                          {"codomain_block", b.codomain_block},
                          {"matrix", to_json(b.matrix)},
                          {"min_eigenvalue", b.min_eigenvalue},
                          {"psd", b.psd}});
  }
  return Json{{"blocks", blocks},
              {"adjoint_defect", r.adjoint_defect},
              {"min_eigenvalue", r.min_eigenvalue},
              {"completely_positive", r.completely_positive}};
}

Json to_json(const StinespringDilation& s) {
  return Json{{"rep_dimension", s.rep_dimension},
              {"kraus_counts", list_json(s.kraus_counts)},
              {"v", to_json(s.v)},
              {"pi", to_json(s.pi)},
              {"reconstruction_error", s.reconstruction_error},
              {"homomorphism_defect", s.homomorphism_defect},
              {"v_norm_squared", s.v_norm_squared},
              {"isometry", s.isometry}};
}

Json to_json(const RepairResult& r) {
  return Json{{"p", to_json(r.p)},
              {"c", to_json(r.c)},
              {"defect", r.defect},
              {"dist_p_h", r.dist_p_h},
              {"dist_p_c", r.dist_p_c},
              {"chc_defect", r.chc_defect}};
}

Json to_json(const PerturbResult& r) {
  return Json{{"phi_prime", to_json(r.phi_prime)},
              {"p", to_json(r.p)},
              {"c", to_json(r.c)},
              {"unit_defect", r.unit_defect},
              {"homomorphism_defect", r.homomorphism_defect},
              {"distance", Json{{"lower", r.distance.lower}, {"upper", r.distance.upper}}},
              {"unit_distance", r.unit_distance},
              {"bound", r.bound}};
}

Json to_json(const ExtractionConstants& c) {
  return Json{{"n", c.n}, {"C", c.C}, {"beta", c.beta}, {"alpha", c.alpha}, {"theta", c.theta}, {"eta", c.eta}};
}

Json to_json(const ExtractionReport& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    steps.push_back(Json{{"name", s.name},
                         {"measured", s.measured},
                         {"bound", s.bound},
                         {"holds", s.holds},
                         {"where", s.where}});
  }
  Json classes = Json::array();
  for (const auto& c : r.classes) {
    classes.push_back(Json{{"block", c.block},
                           {"lambdas", list_json(c.lambdas)},
                           {"region", list_json(c.region)},
                           {"w", list_json(c.w)}});
  }
  return Json{{"constants", to_json(r.constants)},
              {"delta", r.delta},
              {"upper_order", r.upper_order},
              {"A", cover_list_json(r.a_sets)},
              {"classes", classes},
              {"steps", steps},
              {"W", to_json(r.w)},
              {"order", r.order},
              {"refines", r.refinement.ok},
              {"assignment", list_json(r.refinement.assignment)},
              {"covers", r.covers}};
}

Json to_json(const ApproxVerification& v) {
  return Json{{"errors", list_json(v.errors)},
              {"max_error", v.max_error},
              {"within", v.within},
              {"psi_cp", v.psi_cp},
              {"phi_cp", v.phi_cp},
              {"psi_contractive", v.psi_contractive},
              {"phi_contractive", v.phi_contractive},
              {"psi_norm", v.psi_norm},
              {"phi_norm", v.phi_norm},
              {"phi_order", to_json(v.phi_order)}};
}

Json to_json(const BuildInfo& b) {
  return Json{{"radius", b.radius},
              {"net", to_json(b.net)},
              {"refinement", to_json(b.refinement)},
              {"support", to_json(b.support)},
              {"net_order", b.net_order},
              {"refinement_order", b.refinement_order},
              {"refinement_strict_order", b.refinement_strict_order},
              {"max_oscillation", b.max_oscillation}};
}

Json to_json(const CprEstimate& e) {
  Json scales = Json::array();
  for (const auto& s : e.scales) {
    scales.push_back(Json{{"scale", s.scale},
                          {"cover", s.cover},
                          {"strict_order", s.strict_order},
                          {"input_order", s.input_order},
                          {"names", list_json(s.names)},
                          {"candidates", list_json(s.candidates)}});
  }
  return Json{{"value", e.value}, {"scales", scales}, {"builder_order", e.builder_order}};
}

}  // namespace cpr
