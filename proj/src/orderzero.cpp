#include "cpr/orderzero.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "cpr/error.hpp"
#include "cpr/projkit.hpp"
#include "cpr/random.hpp"

namespace cpr {

namespace {

std::string describe(const OrderZeroWitness& w) {
  std::ostringstream os;
  os << "order zero certification failed at check '" << w.check << "' (block " << w.block;
  if (w.other >= 0) os << ", other " << w.other;
  if (w.unit >= 0) os << ", unit " << w.unit;
  os << ", value " << w.value << ")";
  return os.str();
}

OrderZeroCertificate require_order_zero(const CPMap& phi, double tol, double rank_cut = kDefaultRankCut) {
  OrderZeroCertificate cert = certify_order_zero(phi, tol, rank_cut);
  if (!cert.order_zero) throw PreconditionError(describe(*cert.witness));
  return cert;
}

// Largest ||s(e_a) s(e_b) - s(e_a e_b)|| for unit images listed in the flat
// order of one block of size r.
double block_multiplicativity(const std::vector<Element>& s, int r) {
  double worst = 0.0;
  for (int a = 0; a < r * r; ++a) {
    int ar = a % r, ac = a / r;
    for (int b = 0; b < r * r; ++b) {
      int br = b % r, bc = b / r;
      Element prod = s[static_cast<size_t>(a)] * s[static_cast<size_t>(b)];
      if (ac == br) prod -= s[static_cast<size_t>(bc * r + ar)];
      worst = std::max(worst, norm(prod));
    }
  }
  return worst;
}

}  // namespace

OrderZeroDecomposition decompose_order_zero(const CPMap& phi, double tol, double rank_cut) {
  OrderZeroCertificate cert = require_order_zero(phi, tol, rank_cut);
  const Algebra& dom = phi.domain();
  OrderZeroDecomposition d;
  for (int i = 0; i < dom.block_count(); ++i) {
    OrderZeroBlock& b = cert.blocks[static_cast<size_t>(i)];
    OrderZeroPart part{{}, b.h, b.support, b.sigma};
    for (double t : spectrum(b.h, std::max(tol, 1e-9))) {
      if (t <= rank_cut) continue;
      if (part.support.empty() || t - part.support.back() > 1e-9) part.support.push_back(t);
    }
    int r = dom.block_size(i);
    double mult = block_multiplicativity(b.sigma, r);
    if (mult > tol) {
      std::ostringstream os;
      os << "sigma on block " << i << " is not multiplicative: defect " << mult << " > " << tol;
      throw PreconditionError(os.str());
    }
    d.multiplicativity_defect = std::max(d.multiplicativity_defect, mult);
    for (int a = 0; a < r * r; ++a) {
      const Element& e = phi.image(dom.offset(i) + a);
      const Element& s = b.sigma[static_cast<size_t>(a)];
      d.reconstruction_error = std::max({d.reconstruction_error, norm(e - b.h * s), norm(e - s * b.h)});
    }
    d.blocks.push_back(std::move(part));
  }
  return d;
}

CPMap recompose(const OrderZeroDecomposition& d, const Algebra& domain, CodomainKind kind) {
  if (static_cast<int>(d.blocks.size()) != domain.block_count() || d.blocks.empty()) {
    throw SchemaError("decomposition does not match the domain blocks");
  }
  Algebra cod = d.blocks.front().h.algebra();
  std::vector<Element> images;
  for (int i = 0; i < domain.block_count(); ++i) {
    const OrderZeroPart& part = d.blocks[static_cast<size_t>(i)];
    int r = domain.block_size(i);
    if (static_cast<int>(part.sigma.size()) != r * r) throw SchemaError("sigma table has the wrong size");
    for (const Element& s : part.sigma) images.push_back(part.h * s);
  }
  return CPMap(domain, cod, std::move(images), kind);
}

double homomorphism_defect(const CPMap& phi) {
  const Algebra& dom = phi.domain();
  std::vector<Element> img = phi.unit_images();
  double worst = phi.adjoint_defect();
  for (int a = 0; a < dom.dimension(); ++a) {
    UnitIndex ua = dom.unit(a);
    for (int b = 0; b < dom.dimension(); ++b) {
      UnitIndex ub = dom.unit(b);
      Element prod = img[static_cast<size_t>(a)] * img[static_cast<size_t>(b)];
      if (ua.block == ub.block && ua.col == ub.row) {
        prod -= img[static_cast<size_t>(dom.unit_flat(ua.block, ua.row, ub.col))];
      }
      worst = std::max(worst, norm(prod));
    }
  }
  return worst;
}

ProjectionCaseReport check_projection_case(const CPMap& phi, double tol) {
  require_order_zero(phi, tol);
  ProjectionCaseReport rep;
  Validation v = validate(phi.unit_image(), Predicate::projection, tol);
  rep.projection_defect = v.defect;
  if (!v.ok) {
    rep.verdict = ProjectionCase::inapplicable;
    return rep;
  }
  rep.multiplicativity_defect = homomorphism_defect(phi);
  rep.verdict = rep.multiplicativity_defect <= tol ? ProjectionCase::holds : ProjectionCase::fails;
  return rep;
}

std::string to_string(ProjectionCase c) {
  switch (c) {
    case ProjectionCase::holds: return "true";
    case ProjectionCase::fails: return "false";
    case ProjectionCase::inapplicable: return "inapplicable";
  }
  return "?";
}

MapDistance map_distance(const CPMap& a, const CPMap& b, std::uint64_t seed, int samples) {
  if (!(a.domain() == b.domain()) || !(a.codomain() == b.codomain())) {
    throw PreconditionError("maps have different domains or codomains");
  }
  const Algebra& dom = a.domain();
  const Algebra& cod = a.codomain();
  CPMap diff = CPMap::from_matrix(dom, cod, a.images() - b.images());
  MapDistance out;
  auto probe = [&](const Element& x) { out.lower = std::max(out.lower, norm(diff(x))); };
  probe(Element::identity(dom));
  for (int i = 0; i < dom.block_count(); ++i) {
    int r = dom.block_size(i);
    for (int j = 0; j < r; ++j) {
      probe(Element::unit(dom, i, j, j));
      for (int k = j + 1; k < r; ++k) {
        Element ejk = Element::unit(dom, i, j, k);
        Element ekj = Element::unit(dom, i, k, j);
        probe(ejk + ekj);
        probe(Complex(0, 1) * (ejk - ekj));
      }
    }
  }
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) probe(random_contraction(dom, rng));

  // Split each Choi block of the (hermitian-preserving) difference into
  // positive and negative parts; the two resulting cp maps bound the cb-norm
  // by the norms of their values at 1.
  ChoiReport choi = choi_blocks(diff, 1e-7);
  std::vector<Matrix> pos, neg;
  for (int c = 0; c < cod.block_count(); ++c) {
    int n = cod.block_size(c);
    pos.push_back(Matrix::Zero(n, n));
    neg.push_back(Matrix::Zero(n, n));
  }
  for (const ChoiBlock& cb : choi.blocks) {
    int r = dom.block_size(cb.domain_block);
    int n = cod.block_size(cb.codomain_block);
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (cb.matrix + cb.matrix.adjoint())));
    RealVector lp = es.eigenvalues().cwiseMax(0.0);
    RealVector ln = (-es.eigenvalues()).cwiseMax(0.0);
    Matrix cp = es.eigenvectors() * lp.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    Matrix cn = es.eigenvectors() * ln.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    for (int j = 0; j < r; ++j) {
      pos[static_cast<size_t>(cb.codomain_block)] += cp.block(j * n, j * n, n, n);
      neg[static_cast<size_t>(cb.codomain_block)] += cn.block(j * n, j * n, n, n);
    }
  }
  double up = 0.0, un = 0.0;
  for (size_t c = 0; c < pos.size(); ++c) {
    up = std::max(up, operator_norm(pos[c]));
    un = std::max(un, operator_norm(neg[c]));
  }
  out.upper = std::max(up + un, out.lower);
  return out;
}

PerturbResult perturb_to_hom(const CPMap& phi, double gamma, double tol, std::uint64_t seed) {
  if (!(gamma > 0.0 && gamma < 0.25)) {
    std::ostringstream os;
    os << "perturbation needs 0 < gamma < 1/4, got " << gamma;
    throw PreconditionError(os.str());
  }
  require_order_zero(phi, tol);
  Element h = phi.unit_image();
  double defect = norm(h - h * h);
  if (!(defect < gamma)) {
    std::ostringstream os;
    os << "perturbation needs ||phi(1) - phi(1)^2|| < gamma: measured " << defect << " >= " << gamma;
    throw PreconditionError(os.str());
  }
  RepairResult rep = repair_almost_projection(h, gamma, std::max(tol, 1e-9));
  CPMap phi_prime = compress(phi, rep.c);
  PerturbResult out{phi_prime, rep.p, rep.c, 0.0, 0.0, {}, 0.0, 0.0};
  out.unit_defect = defect;
  out.homomorphism_defect = homomorphism_defect(phi_prime);
  out.distance = map_distance(phi_prime, phi, seed);
  for (int k = 0; k < phi.domain().dimension(); ++k) {
    out.unit_distance = std::max(out.unit_distance, norm(phi_prime.image(k) - phi.image(k)));
  }
  out.bound = 12.0 * gamma + 2.0 * std::sqrt(gamma);
  return out;
}

double dist_to_hom_image(const Element& a, const CPMap& hom) {
  if (!(a.algebra() == hom.codomain())) throw PreconditionError("element outside the codomain of the map");
  const Matrix& basis = hom.images();
  Vector coeffs = basis.completeOrthogonalDecomposition().solve(a.coefficients());
  Vector residual = a.coefficients() - basis * coeffs;
  return norm(Element::from_coefficients(a.algebra(), residual));
}

AfStepResult af_local_step(const std::vector<Element>& a, const CPTriple& approx, const Element& u, double eps,
                           double tol) {
  const CPMap& psi = approx.psi;
  const CPMap& phi = approx.phi;
  if (!(psi.codomain() == phi.domain()) || !(psi.domain() == phi.codomain())) {
    throw SchemaError("approximation maps do not compose to A -> F -> A");
  }
  const Algebra& alg_a = phi.codomain();
  const Algebra& alg_f = phi.domain();
  if (!(u.algebra() == alg_a)) throw SchemaError("approximate unit lies outside A");
  for (const Element& x : a) {
    if (!(x.algebra() == alg_a)) throw SchemaError("element lies outside A");
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    std::ostringstream os;
    os << "local step needs 0 < eps < 1, got " << eps;
    throw PreconditionError(os.str());
  }

  AfStepResult out{{}, {}, Algebra::zero(), CPMap::zero(alg_f, alg_f), CPMap::zero(alg_f, alg_a), 0.0, 0.0, {}, 0.0, {}, {}, std::nullopt};
  auto check = [&](std::string name, double measured, double bound) {
    Inequality q{std::move(name), measured, bound, measured < bound};
    out.hypotheses.push_back(q);
    if (!q.holds) {
      std::ostringstream os;
      os << "measured " << q.measured << " >= " << q.bound;
      throw PipelineError(q.name, os.str());
    }
  };

  Element h = phi.unit_image();
  Element pu = phi(psi(u));
  double m1 = 0.0, m3 = 0.0;
  for (const Element& x : a) {
    m1 = std::max(m1, norm(phi(psi(x)) - x));
    m3 = std::max(m3, norm(pu * x - x));
  }
  check("(i) ||phi psi(a) - a||", m1, eps);
  check("(ii) ||phi psi(u) - u||", norm(pu - u), eps);
  check("(iii) ||phi psi(u) a - a||", m3, eps);
  check("(iv) ||u - h u||", norm(u - h * u), eps);
  check("(v) ||phi psi(u) - h phi psi(u)||", norm(pu - h * pu), eps);
  OrderZeroCertificate cert = certify_order_zero(phi, tol);
  if (!cert.order_zero) {
    out.hypotheses.push_back({"(vi) order zero", cert.witness->value, tol, false});
    throw PipelineError("(vi) order zero", describe(*cert.witness));
  }
  out.hypotheses.push_back({"(vi) order zero", cert.max_defect, tol, true});

  // q: spectral projection of psi(u) for eigenvalues >= sqrt(eps), with
  // qFq = sum of M_{rank q_i} realized by the isometries W_i.
  Eigendecomposition ed = eigendecompose(psi(u), std::max(tol, 1e-9));
  double cut = std::sqrt(eps);
  std::vector<int> sizes, source;
  std::vector<Matrix> isometries;
  for (int i = 0; i < alg_f.block_count(); ++i) {
    const RealVector& mu = ed.values[static_cast<size_t>(i)];
    std::vector<int> keep;
    for (Eigen::Index k = 0; k < mu.size(); ++k) {
      out.mu.push_back(mu(k));
      if (mu(k) >= cut) keep.push_back(static_cast<int>(k));
    }
    if (keep.empty()) continue;
    Matrix w(alg_f.block_size(i), static_cast<Eigen::Index>(keep.size()));
    for (size_t c = 0; c < keep.size(); ++c) {
      w.col(static_cast<Eigen::Index>(c)) = ed.vectors[static_cast<size_t>(i)].col(keep[c]);
    }
    sizes.push_back(static_cast<int>(keep.size()));
    source.push_back(i);
    isometries.push_back(std::move(w));
  }
  std::sort(out.mu.begin(), out.mu.end());
  if (sizes.empty()) {
    std::ostringstream os;
    os << "no eigenvalue of psi(u) reaches sqrt(eps) = " << cut;
    throw PipelineError("spectral cut", os.str());
  }
  out.sub_algebra = Algebra(sizes, std::max(*std::max_element(sizes.begin(), sizes.end()), kDefaultMaxBlock));
  const Algebra& sub = out.sub_algebra;

  auto embed = [&](const Element& x) {
    Element y(alg_f);
    for (size_t b = 0; b < sizes.size(); ++b) {
      const Matrix& w = isometries[b];
      y.block(source[b]) += w * x.block(static_cast<int>(b)) * w.adjoint();
    }
    return y;
  };
  auto shrink = [&](const Element& y) {
    std::vector<Matrix> blocks;
    for (size_t b = 0; b < sizes.size(); ++b) {
      const Matrix& w = isometries[b];
      blocks.push_back(w.adjoint() * y.block(source[b]) * w);
    }
    return Element(sub, blocks);
  };
  out.embedding = CPMap::from_function(sub, alg_f, embed);
  CPMap phi_sub = compose(phi, out.embedding);
  Element q = embed(Element::identity(sub));
  Element pq = phi(q);
  out.q_defect = norm(pq - pq * pq);

  double root4 = std::pow(eps, 0.25);
  out.gamma = root4 < 0.25 ? root4 : 0.25 - 1e-9;
  if (!(out.q_defect < out.gamma)) {
    std::ostringstream os;
    os << "||phi(q) - phi(q)^2|| = " << out.q_defect << " is not below gamma = " << out.gamma;
    throw PipelineError("perturbation", os.str());
  }
  try {
    out.perturbation = perturb_to_hom(phi_sub, out.gamma, tol);
  } catch (const PreconditionError& e) {
    throw PipelineError("perturbation", e.what());
  }
  out.phi_prime = out.perturbation->phi_prime;

  out.chain_bound = 2.0 * std::sqrt(2.0) * root4 + eps + 2.0 * std::pow(eps, 0.125);
  for (const Element& x : a) {
    Element cut_x = q * psi(x) * q;
    out.chain.push_back(norm(x - phi(cut_x)));
    double cand = norm(x - out.phi_prime(shrink(cut_x)));
    out.candidate.push_back(cand);
    out.distances.push_back(std::min(cand, dist_to_hom_image(x, out.phi_prime)));
  }
  return out;
}

}  // namespace cpr
