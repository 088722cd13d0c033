#include "cpr/cprlab.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "cpr/error.hpp"
#include "cpr/projkit.hpp"
#include "cpr/random.hpp"

namespace cpr {

namespace {

// Closed comparison for the "> C" thresholds.
constexpr double kThresholdSlack = 1e-12;

struct Pruned {
  Cover cover;
  std::vector<int> exclusive;  // an exclusive point of each kept member
};

// Repeatedly drops members without an exclusive point. A dropped member's
// points all lie in other members, so the rest still covers.
Pruned prune_to_exclusive(const Cover& cover, int point_count) {
  int m = cover.size();
  std::vector<int> count(static_cast<size_t>(point_count), 0);
  for (const auto& mem : cover.members) {
    for (int x : mem) ++count[static_cast<size_t>(x)];
  }
  std::vector<char> alive(static_cast<size_t>(m), 1);
  auto exclusive_point = [&](int l) {
    for (int x : cover.members[static_cast<size_t>(l)]) {
      if (count[static_cast<size_t>(x)] == 1) return x;
    }
    return -1;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (int l = 0; l < m; ++l) {
      if (!alive[static_cast<size_t>(l)] || exclusive_point(l) >= 0) continue;
      alive[static_cast<size_t>(l)] = 0;
      for (int x : cover.members[static_cast<size_t>(l)]) --count[static_cast<size_t>(x)];
      changed = true;
    }
  }
  Pruned out;
  std::vector<std::vector<int>> members;
  std::vector<std::string> labels;
  for (int l = 0; l < m; ++l) {
    if (!alive[static_cast<size_t>(l)]) continue;
    members.push_back(cover.members[static_cast<size_t>(l)]);
    if (!cover.labels.empty()) labels.push_back(cover.labels[static_cast<size_t>(l)]);
    out.exclusive.push_back(exclusive_point(l));
  }
  out.cover = Cover(std::move(members), std::move(labels));
  return out;
}

double max_oscillation(const std::vector<Function>& a, const Cover& cover) {
  double worst = 0.0;
  for (const auto& f : a) {
    for (const auto& mem : cover.members) worst = std::max(worst, oscillation(f, mem));
  }
  return worst;
}

Function values_of(const Element& e) {
  Function f(e.coefficients().size());
  for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = e.coefficients()(i).real();
  return f;
}

double sup_distance(const Function& a, const Function& b) { return (a - b).cwiseAbs().maxCoeff(); }

double diameter_of(const FiniteMetricSpace& space, const std::vector<int>& pts) {
  double d = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    for (size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, space.distance(pts[i], pts[j]));
  }
  return d;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
  }
};

void require_scalar_functions(const CPApproximation& approx) {
  int p = approx.space.size();
  if (approx.matrix_size != 1 || !(approx.psi.domain() == Algebra::abelian(p)) ||
      !(approx.phi.codomain() == Algebra::abelian(p))) {
    throw PreconditionError("approximation is not over scalar functions on the space");
  }
}

}  // namespace

Element function_element(const Function& f) { return Element::from_values(RealVector(f)); }

Element function_tensor(const Function& a, const Matrix& b) {
  if (b.rows() != b.cols()) throw PreconditionError("matrix factor must be square");
  Algebra alg(std::vector<int>(static_cast<size_t>(a.size()), static_cast<int>(b.rows())),
              std::max(static_cast<int>(b.rows()), kDefaultMaxBlock));
  std::vector<Matrix> blocks;
  for (Eigen::Index x = 0; x < a.size(); ++x) blocks.push_back(a(x) * b);
  return Element(alg, blocks);
}

double oscillation(const Function& f, const std::vector<int>& member) {
  if (member.empty()) return 0.0;
  double lo = INFINITY, hi = -INFINITY;
  for (int x : member) {
    lo = std::min(lo, f(x));
    hi = std::max(hi, f(x));
  }
  return hi - lo;
}

CPApproximation build_cp_approx(const FiniteMetricSpace& space, const std::vector<Function>& a, double eps) {
  if (!(eps > 0.0)) throw PreconditionError("approximation tolerance must be positive");
  int p = space.size();
  for (const auto& f : a) {
    if (f.size() != p) throw SchemaError("function length does not match the number of points");
  }
  BuildInfo info;
  double r = space.diameter() > 0.0 ? space.diameter() : 1.0;
  for (int iter = 0;; ++iter) {
    info.net = net_cover(space, r, 0.5 * r);
    info.max_oscillation = max_oscillation(a, info.net);
    if (info.max_oscillation < 2.0 * eps / 3.0) break;
    if (iter > 200) throw InternalError("net refinement did not reach the oscillation bound");
    r *= 0.5;
  }
  info.radius = r;
  info.net_order = cover_order(info.net);
  StrictRefinement sr = strict_refinement(space, info.net);
  info.refinement = sr.cover;
  info.refinement_order = cover_order(sr.cover);
  info.refinement_strict_order = cover_strict_order(sr.cover);
  Pruned pruned = prune_to_exclusive(sr.cover, p);
  info.support = pruned.cover;
  PartitionOfUnity pou = partition_of_unity(space, pruned.cover);

  int s = pruned.cover.size();
  Algebra dom = Algebra::abelian(p);
  Algebra f_alg = Algebra::abelian(s);
  Matrix psi_img = Matrix::Zero(s, p);
  for (int l = 0; l < s; ++l) psi_img(l, pruned.exclusive[static_cast<size_t>(l)]) = 1.0;
  Matrix phi_img = pou.weights.transpose().cast<Complex>();
  return CPApproximation{space,
                         1,
                         CPMap::from_matrix(dom, f_alg, std::move(psi_img)),
                         CPMap::from_matrix(f_alg, dom, std::move(phi_img), CodomainKind::functions),
                         pruned.exclusive,
                         std::move(info)};
}

ApproxVerification verify_cp_approx(const CPApproximation& approx, const std::vector<Element>& a, double eps,
                                    double tol) {
  ApproxVerification v;
  for (const auto& x : a) {
    if (!(x.algebra() == approx.psi.domain())) throw SchemaError("element outside the approximated algebra");
    double e = norm(approx.phi(approx.psi(x)) - x);
    v.errors.push_back(e);
    v.max_error = std::max(v.max_error, e);
  }
  v.within = v.max_error <= eps;
  v.psi_cp = is_completely_positive(approx.psi, tol);
  v.phi_cp = is_completely_positive(approx.phi, tol);
  v.psi_norm = norm(approx.psi.unit_image());
  v.phi_norm = norm(approx.phi.unit_image());
  v.psi_contractive = v.psi_cp && v.psi_norm <= 1.0 + tol;
  v.phi_contractive = v.phi_cp && v.phi_norm <= 1.0 + tol;
  if (v.phi_cp) v.phi_order = strict_order_bounds(approx.phi);
  return v;
}

ApproxVerification verify_cp_approx(const CPApproximation& approx, const std::vector<Function>& a, double eps,
                                    double tol) {
  std::vector<Element> elems;
  for (const auto& f : a) {
    if (f.size() != approx.space.size()) throw SchemaError("function length does not match the number of points");
    if (approx.matrix_size == 1) {
      elems.push_back(function_element(f));
    } else {
      elems.push_back(function_tensor(f, Matrix::Identity(approx.matrix_size, approx.matrix_size)));
    }
  }
  return verify_cp_approx(approx, elems, eps, tol);
}

CPApproximation tensor_approx(const CPApproximation& approx, int r) {
  if (r < 1) throw PreconditionError("matrix size must be at least 1");
  if (approx.matrix_size != 1) throw PreconditionError("approximation is already matrix-valued");
  if (!approx.F().is_abelian()) throw PreconditionError("tensor_approx needs an abelian F");
  if (r == 1) return approx;
  CPMap psi = tensor_with_identity(approx.psi, r);
  CPMap phi = tensor_with_identity(approx.phi, r);
  return CPApproximation{approx.space,
                         r,
                         CPMap::from_matrix(psi.domain(), psi.codomain(), psi.images()),
                         CPMap::from_matrix(phi.domain(), phi.codomain(), phi.images(),
                                            CodomainKind::matrix_functions),
                         approx.points,
                         std::nullopt};
}

CPApproximation direct_sum_approx(const CPApproximation& a, const std::optional<CPApproximation>& b) {
  if (!b) return a;
  if (a.matrix_size != b->matrix_size) throw PreconditionError("summands approximate different matrix sizes");
  double gap = 1.0 + std::max(a.space.diameter(), b->space.diameter());
  FiniteMetricSpace space = FiniteMetricSpace::disjoint_union(a.space, b->space, gap);
  std::vector<int> points = a.points;
  for (int x : b->points) points.push_back(x + a.space.size());
  return CPApproximation{space,           a.matrix_size, direct_sum(a.psi, b->psi), direct_sum(a.phi, b->phi),
                         std::move(points), std::nullopt};
}

CPApproximation matrix_pair_approximation(const FiniteMetricSpace& space, std::uint64_t seed) {
  int p = space.size();
  int half = p / 2;
  std::vector<int> sizes(static_cast<size_t>(half), 2);
  if (p % 2) sizes.push_back(1);
  Algebra f_alg(sizes);
  Algebra dom = Algebra::abelian(p);
  Matrix psi_img = Matrix::Zero(f_alg.dimension(), p);
  Matrix phi_img = Matrix::Zero(p, f_alg.dimension());
  Rng rng(seed);
  std::vector<int> points;
  for (int j = 0; j < half; ++j) {
    Matrix u = random_unitary(2, rng);
    int pts[2] = {j, j + half};
    for (int k = 0; k < 2; ++k) {
      Matrix proj = u.col(k) * u.col(k).adjoint();
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) psi_img(f_alg.unit_flat(j, a, b), pts[k]) = proj(a, b);
      }
    }
    // phi(y)(pts[k]) = (U* y U)_kk, so phi(e_ab)(pts[k]) = conj(U_ak) U_bk.
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        for (int k = 0; k < 2; ++k) phi_img(pts[k], f_alg.unit_flat(j, a, b)) = std::conj(u(a, k)) * u(b, k);
      }
    }
    points.push_back(pts[0]);
  }
  if (p % 2) {
    psi_img(f_alg.unit_flat(half, 0, 0), p - 1) = 1.0;
    phi_img(p - 1, f_alg.unit_flat(half, 0, 0)) = 1.0;
    points.push_back(p - 1);
  }
  return CPApproximation{space,
                         1,
                         CPMap::from_matrix(dom, f_alg, std::move(psi_img)),
                         CPMap::from_matrix(f_alg, dom, std::move(phi_img), CodomainKind::functions),
                         std::move(points),
                         std::nullopt};
}

ExtractionConstants extraction_constants(int n) {
  if (n < 0) throw PreconditionError("order parameter must be non-negative");
  ExtractionConstants c;
  c.n = n;
  c.C = 1.0 / (2.0 * (n + 1));
  c.beta = c.C / 2.0;
  c.alpha = alpha_for(n + 1, c.beta, n);
  c.theta = 1.0 / c.alpha;
  c.eta = (1.0 - c.theta) * c.C / 2.0;
  return c;
}

ExtractionSetup extraction_setup(const FiniteMetricSpace& space, const Cover& u, int n) {
  ExtractionSetup s;
  s.constants = extraction_constants(n);
  if (u.size() == 0) throw PreconditionError("cover to refine is empty");
  s.f = partition_of_unity(space, u);
  s.level = 1.0 / u.size();
  int p = space.size();
  s.delta = INFINITY;
  for (int x = 0; x < p; ++x) {
    for (int y = x + 1; y < p; ++y) {
      double jump = (s.f.weights.col(x) - s.f.weights.col(y)).cwiseAbs().maxCoeff();
      if (jump >= s.level) s.delta = std::min(s.delta, space.distance(x, y));
    }
  }
  if (!std::isfinite(s.delta)) s.delta = 2.0 * space.diameter() + 1.0;
  s.fine_bound = s.delta / (3.0 * (n + 1));
  double r = 0.5 * s.fine_bound;
  for (int iter = 0;; ++iter) {
    s.fine = net_cover(space, r, 0.5 * r);
    if (max_member_diameter(space, s.fine) < s.fine_bound) break;
    if (iter > 200) throw InternalError("fine cover did not reach the diameter bound");
    r *= 0.5;
  }
  s.h = partition_of_unity(space, s.fine);
  for (int l = 0; l < s.fine.size(); ++l) s.h_functions.push_back(s.h.weights.row(l).transpose());
  return s;
}

CPApproximation approximation_for_setup(const FiniteMetricSpace& space, const ExtractionSetup& setup) {
  double eps = setup.constants.eta / (static_cast<double>(setup.fine.size()) + 1.0);
  return build_cp_approx(space, setup.h_functions, eps);
}

ExtractionReport extract_cover(const FiniteMetricSpace& space, const Cover& u, int n, const CPApproximation& approx) {
  return extract_cover(space, u, n, approx, extraction_setup(space, u, n));
}

ExtractionReport extract_cover(const FiniteMetricSpace& space, const Cover& u, int n, const CPApproximation& approx,
                               const ExtractionSetup& setup) {
  require_scalar_functions(approx);
  if (approx.space.size() != space.size()) throw PreconditionError("approximation lives on a different space");
  if (setup.constants.n != n) throw PreconditionError("setup was prepared for a different order");
  const int p = space.size();
  const ExtractionConstants& k = setup.constants;
  const CPMap& psi = approx.psi;
  const CPMap& phi = approx.phi;
  const Algebra& f_alg = approx.F();

  ExtractionReport rep;
  rep.constants = k;
  rep.delta = setup.delta;
  OrderBounds bounds = strict_order_bounds(phi);
  rep.upper_order = bounds.upper;
  if (bounds.upper > n) {
    std::ostringstream os;
    os << "strict order of phi is only bounded by " << bounds.upper << " > n = " << n;
    throw PreconditionError(os.str());
  }

  // Steps keep their first-seen order; each keeps its worst measurement.
  std::map<std::string, size_t> index;
  auto record = [&](const std::string& name, double measured, double bound, bool strict, const std::string& where) {
    auto it = index.find(name);
    if (it == index.end()) {
      index[name] = rep.steps.size();
      rep.steps.push_back({name, -INFINITY, bound, true, ""});
      it = index.find(name);
    }
    ExtractionStep& st = rep.steps[it->second];
    bool ok = strict ? measured < bound : measured <= bound + kThresholdSlack;
    if (measured > st.measured) {
      st.measured = measured;
      st.where = where;
    }
    st.holds = st.holds && ok;
  };
  auto at = [](int x, int j, int i) {
    std::ostringstream os;
    os << "x=" << x << ", j=" << j << ", i=" << i;
    return os.str();
  };

  record("eta/C <= 1/(n+2)", k.eta / k.C, 1.0 / (n + 2.0), false, "");
  record("beta = 1/(4(n+1))", std::abs(k.beta - 1.0 / (4.0 * (n + 1))), 0.0, false, "");
  record("C < (1-eta)/(n+1)", k.C - (1.0 - k.eta) / (n + 1.0), 0.0, true, "");

  // Quality of the approximation on the sets the pipeline uses.
  auto approx_error = [&](const Function& f) { return sup_distance(values_of(phi(psi(function_element(f)))), f); };
  double single = 0.0;
  for (const auto& h : setup.h_functions) single = std::max(single, approx_error(h));
  record("linearity: |Lambda| max_l ||phi psi(h_l) - h_l|| < eta", single * setup.fine.size(), k.eta, true, "");
  Function unit_vals = values_of(phi.unit_image());
  double unit_gap = (unit_vals.array() - 1.0).abs().maxCoeff();
  record("|phi(1_F)(x) - 1| < eta", unit_gap, k.eta, true, "");

  std::vector<std::vector<int>> member_of(static_cast<size_t>(p));
  for (int l = 0; l < setup.fine.size(); ++l) {
    for (int x : setup.fine.members[static_cast<size_t>(l)]) member_of[static_cast<size_t>(x)].push_back(l);
  }
  std::vector<std::vector<int>> regions;
  std::vector<std::string> region_labels;

  for (int j = 0; j < f_alg.block_count(); ++j) {
    int r = f_alg.block_size(j);
    Element one_j = Element::block_identity(f_alg, j);
    Function g = values_of(phi(one_j));
    std::vector<int> a_set;
    for (int x = 0; x < p; ++x) {
      if (g(x) > k.C - kThresholdSlack) a_set.push_back(x);
    }
    rep.a_sets.push_back(a_set);
    if (a_set.empty()) continue;

    UnionFind uf(setup.fine.size());
    std::vector<char> in_lambda(static_cast<size_t>(setup.fine.size()), 0);
    for (int x : a_set) {
      const auto& ls = member_of[static_cast<size_t>(x)];
      for (int l : ls) {
        in_lambda[static_cast<size_t>(l)] = 1;
        uf.unite(ls.front(), l);
      }
    }
    std::map<int, std::vector<int>> by_root;
    for (int l = 0; l < setup.fine.size(); ++l) {
      if (in_lambda[static_cast<size_t>(l)]) by_root[uf.find(l)].push_back(l);
    }

    std::vector<Element> qs;
    size_t first_class = rep.classes.size();
    for (auto& [root, lambdas] : by_root) {
      int i = static_cast<int>(rep.classes.size() - first_class);
      ExtractionClass cls{j, lambdas, {}, Element(Algebra::matrix(r, std::max(r, kDefaultMaxBlock))),
                          Element(Algebra::matrix(r, std::max(r, kDefaultMaxBlock))), {}};
      std::vector<char> in_class(static_cast<size_t>(setup.fine.size()), 0);
      for (int l : lambdas) in_class[static_cast<size_t>(l)] = 1;
      for (int x : a_set) {
        const auto& ls = member_of[static_cast<size_t>(x)];
        if (std::any_of(ls.begin(), ls.end(), [&](int l) { return in_class[static_cast<size_t>(l)]; })) {
          cls.region.push_back(x);
        }
      }
      Function h = Function::Zero(p);
      for (int l : lambdas) h += setup.h_functions[static_cast<size_t>(l)];
      std::ostringstream cl;
      cl << "j=" << j << ", i=" << i;
      record("||phi psi(h_j^(i)) - h_j^(i)|| < eta", approx_error(h), k.eta, true, cl.str());
      for (int x : cls.region) record("h_j^(i) = 1 on V~_j^(i)", std::abs(1.0 - h(x)), 0.0, false, at(x, j, i));

      Element psi_h = psi(function_element(h));
      Matrix psi_j = psi_h.block(j);
      Element rest = one_j;
      rest.block(j) -= psi_j;
      Function rest_vals = values_of(phi(rest));
      for (int x : cls.region) {
        record("phi(1_j - psi_j(h_j^(i)))(x) < eta on V~_j^(i)", rest_vals(x), k.eta, true, at(x, j, i));
      }
      Element local = Element::from_matrix(psi_j);
      cls.q = apply_function(local, ScalarFunction::threshold(k.theta), 1e-9);
      Element q_full(f_alg);
      q_full.block(j) = cls.q.block(0);
      Function miss = values_of(phi(one_j - q_full));
      for (int x : cls.region) {
        record("(1): phi(1_j - q_j^(i))(x) < C/2 on V~_j^(i)", miss(x), k.C / 2.0, true, at(x, j, i));
      }
      qs.push_back(cls.q);
      rep.classes.push_back(std::move(cls));
    }

    Element sum_q = qs.front();
    for (size_t t = 1; t < qs.size(); ++t) sum_q += qs[t];
    std::ostringstream bj;
    bj << "j=" << j;
    record("||sum_i q_j^(i)|| <= alpha", norm(sum_q), k.alpha, false, bj.str());
    FamilyResult fam;
    try {
      fam = orthogonalize_family(qs, k.alpha, 1e-9);
    } catch (const PreconditionError& e) {
      throw PipelineError("orthogonalization", e.what());
    } catch (const PipelineError& e) {
      throw PipelineError("orthogonalization " + e.step(), e.what());
    }
    record("orthogonality of p_j^(i)", max_pairwise_product(fam.projections), 1e-10, false, bj.str());

    Element sum_p(f_alg);
    std::vector<Function> p_vals;
    for (size_t t = 0; t < qs.size(); ++t) {
      ExtractionClass& cls = rep.classes[first_class + t];
      int i = static_cast<int>(t);
      cls.p = fam.projections[t];
      std::ostringstream cl;
      cl << "j=" << j << ", i=" << i;
      record("||p_j^(i) - q_j^(i)|| < beta", norm(cls.p - cls.q), k.beta, true, cl.str());
      Element p_full(f_alg);
      p_full.block(j) = cls.p.block(0);
      sum_p += p_full;
      Function pv = values_of(phi(p_full));
      p_vals.push_back(pv);
      for (int x = 0; x < p; ++x) {
        if (pv(x) > k.C - kThresholdSlack) cls.w.push_back(x);
      }
      Function off = values_of(phi(one_j - p_full));
      for (int x : cls.region) {
        record("(*): phi(1_j - p_j^(i))(x) < C on V~_j^(i)", off(x), k.C, true, at(x, j, i));
      }
      bool inside = std::includes(cls.region.begin(), cls.region.end(), cls.w.begin(), cls.w.end());
      record("W_j^(i) inside V~_j^(i)", inside ? 0.0 : 1.0, 0.0, false, cl.str());
      record("diam V~_j^(i) < delta", diameter_of(space, cls.region), setup.delta, true, cl.str());
      regions.push_back(cls.region);
      region_labels.push_back(cl.str());
    }
    Function leftover = values_of(phi(one_j - sum_p));
    for (int x = 0; x < p; ++x) {
      record("phi(1_j - sum_i p_j^(i))(x) <= C", leftover(x), k.C, false, at(x, j, -1));
    }
  }

  std::vector<std::vector<int>> w_members;
  std::vector<std::string> w_labels;
  for (size_t c = 0; c < rep.classes.size(); ++c) {
    const ExtractionClass& cls = rep.classes[c];
    if (cls.w.empty()) continue;
    w_members.push_back(cls.w);
    w_labels.push_back(region_labels[c]);
  }
  rep.w = Cover(std::move(w_members), std::move(w_labels));
  rep.covers = rep.w.covers(p);
  rep.order = cover_order(rep.w);
  rep.refinement = refines(rep.w, u);
  RefinementCheck region_check = refines(Cover(regions), u);

  record("W covers X", rep.covers ? 0.0 : 1.0, 0.0, false, "");
  record("order(W) <= n", rep.order, n, false, "");
  record("V~_j^(i) inside some U", region_check.ok ? 0.0 : 1.0, 0.0, false, "");
  record("W refines U", rep.refinement.ok ? 0.0 : 1.0, 0.0, false, "");

  for (const ExtractionStep& st : rep.steps) {
    if (!st.holds) {
      std::ostringstream os;
      os << "violated: measured " << st.measured << " against " << st.bound;
      if (!st.where.empty()) os << " at " << st.where;
      throw PipelineError(st.name, os.str());
    }
  }
  return rep;
}

CprEstimate estimate_cpr_commutative(const FiniteMetricSpace& space, const std::vector<double>& scales,
                                     const std::vector<Function>& probes, double probe_eps, int net_seeds) {
  if (scales.empty()) throw PreconditionError("at least one scale is required");
  CprEstimate est;
  est.value = -1;
  double grid = resolution(space);
  for (double s : scales) {
    if (!(s > 0.0)) throw PreconditionError("scales must be positive");
    ScaleEvidence ev;
    ev.scale = s;
    ev.strict_order = -1;
    // Covers thinner than the point spacing can separate neighbours and say
    // nothing about the space at this scale; balls within two grid steps are
    // lattice-shaped and their refinements degenerate the same way.
    double thickness = std::min(1.5 * grid, s);
    std::vector<std::pair<std::string, Cover>> candidates;
    if (s >= 2.0 * grid) candidates.emplace_back("ball", ball_cover(space, s));
    for (int k = 0; k < net_seeds; ++k) {
      std::optional<std::uint64_t> seed;
      if (k > 0) seed = static_cast<std::uint64_t>(k);
      candidates.emplace_back("net/" + std::to_string(k), net_cover(space, s, s, seed));
    }
    for (auto& [name, cover] : candidates) {
      ev.names.push_back(name);
      if (lebesgue_number(space, cover) < thickness) {
        ev.candidates.push_back(-1);
        continue;
      }
      int so = cover_strict_order(strict_refinement(space, cover).cover);
      ev.candidates.push_back(so);
      if (ev.strict_order < 0 || so < ev.strict_order) {
        ev.strict_order = so;
        ev.cover = name;
        ev.input_order = cover_order(cover);
      }
    }
    if (ev.strict_order >= 0 && (est.value < 0 || ev.strict_order < est.value)) est.value = ev.strict_order;
    est.scales.push_back(std::move(ev));
  }
  if (!probes.empty()) {
    CPApproximation ap = build_cp_approx(space, probes, probe_eps);
    est.builder_order = strict_order_abelian(ap.phi);
  }
  return est;
}

}  // namespace cpr
