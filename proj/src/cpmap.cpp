#include "cpr/cpmap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cpr/clique.hpp"
#include "cpr/error.hpp"
#include "cpr/random.hpp"

namespace cpr {

// ---------------------------------------------------------------------------
// CPMap

CPMap::CPMap(Algebra domain, Algebra codomain, std::vector<Element> unit_images, CodomainKind kind)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), kind_(kind) {
  if (static_cast<int>(unit_images.size()) != domain_.dimension()) {
    std::ostringstream os;
    os << "a map on an algebra of dimension " << domain_.dimension() << " needs that many unit images, got "
       << unit_images.size();
    throw SchemaError(os.str());
  }
  images_.resize(codomain_.dimension(), domain_.dimension());
  for (size_t k = 0; k < unit_images.size(); ++k) {
    if (!(unit_images[k].algebra() == codomain_)) throw SchemaError("unit image outside the codomain");
    images_.col(static_cast<Eigen::Index>(k)) = unit_images[k].coefficients();
  }
}

CPMap::CPMap(Algebra domain, Algebra codomain, Matrix images, CodomainKind kind, int)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), kind_(kind), images_(std::move(images)) {}

CPMap CPMap::zero(Algebra domain, Algebra codomain, CodomainKind kind) {
  return from_matrix(domain, codomain, Matrix::Zero(codomain.dimension(), domain.dimension()), kind);
}

CPMap CPMap::from_function(Algebra domain, Algebra codomain, const std::function<Element(const Element&)>& f,
                           CodomainKind kind) {
  std::vector<Element> images;
  images.reserve(static_cast<size_t>(domain.dimension()));
  for (int k = 0; k < domain.dimension(); ++k) images.push_back(f(Element::unit(domain, k)));
  return CPMap(std::move(domain), std::move(codomain), std::move(images), kind);
}

CPMap CPMap::from_matrix(Algebra domain, Algebra codomain, Matrix images, CodomainKind kind) {
  if (images.rows() != codomain.dimension() || images.cols() != domain.dimension()) {
    throw SchemaError("image table does not match the algebras");
  }
  return CPMap(std::move(domain), std::move(codomain), std::move(images), kind, 0);
}

Element CPMap::image(int flat) const {
  if (flat < 0 || flat >= domain_.dimension()) throw PreconditionError("matrix unit index out of range");
  return Element::from_coefficients(codomain_, images_.col(flat));
}

Element CPMap::image(int block, int row, int col) const { return image(domain_.unit_flat(block, row, col)); }

std::vector<Element> CPMap::unit_images() const {
  std::vector<Element> out;
  out.reserve(static_cast<size_t>(domain_.dimension()));
  for (int k = 0; k < domain_.dimension(); ++k) out.push_back(image(k));
  return out;
}

Element CPMap::operator()(const Element& x) const {
  if (!(x.algebra() == domain_)) throw PreconditionError("argument outside the domain of the map");
  return Element::from_coefficients(codomain_, images_ * x.coefficients());
}

Element CPMap::unit_image() const { return (*this)(Element::identity(domain_)); }

double CPMap::adjoint_defect() const {
  double d = 0.0;
  for (int b = 0; b < domain_.block_count(); ++b) {
    int r = domain_.block_size(b);
    for (int j = 0; j < r; ++j) {
      for (int k = j; k < r; ++k) {
        Element a = image(b, j, k);
        Element c = image(b, k, j);
        d = std::max(d, (a.adjoint() - c).coefficients().cwiseAbs().maxCoeff());
      }
    }
  }
  return d;
}

double map_distance_units(const CPMap& a, const CPMap& b) {
  if (!(a.domain() == b.domain()) || !(a.codomain() == b.codomain())) {
    throw PreconditionError("maps have different domains or codomains");
  }
  double d = 0.0;
  for (int k = 0; k < a.domain().dimension(); ++k) d = std::max(d, norm(a.image(k) - b.image(k)));
  return d;
}

// ---------------------------------------------------------------------------
// Complete positivity

ChoiReport choi_blocks(const CPMap& phi, double tol) {
  ChoiReport rep;
  rep.adjoint_defect = phi.adjoint_defect();
  if (rep.adjoint_defect > tol) {
    std::ostringstream os;
    os << "unit images are not adjoint-symmetric (defect " << rep.adjoint_defect << ")";
    throw PreconditionError(os.str());
  }
  const Algebra& dom = phi.domain();
  const Algebra& cod = phi.codomain();
  const Matrix& img = phi.images();
  rep.min_eigenvalue = INFINITY;
  for (int i = 0; i < dom.block_count(); ++i) {
    int r = dom.block_size(i);
    int o = dom.offset(i);
    for (int b = 0; b < cod.block_count(); ++b) {
      int n = cod.block_size(b);
      int co = cod.offset(b);
      ChoiBlock cb;
      cb.domain_block = i;
      cb.codomain_block = b;
      cb.matrix.resize(r * n, r * n);
      for (int j = 0; j < r; ++j) {
        for (int k = 0; k < r; ++k) {
          for (int s = 0; s < n; ++s) {
            for (int t = 0; t < n; ++t) cb.matrix(j * n + s, k * n + t) = img(co + t * n + s, o + k * r + j);
          }
        }
      }
      if (cb.matrix.rows() == 1) {
        cb.min_eigenvalue = cb.matrix(0, 0).real();
      } else {
        Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (cb.matrix + cb.matrix.adjoint())),
                                                 Eigen::EigenvaluesOnly);
        cb.min_eigenvalue = es.eigenvalues()(0);
      }
      cb.psd = cb.min_eigenvalue >= -tol;
      rep.min_eigenvalue = std::min(rep.min_eigenvalue, cb.min_eigenvalue);
      rep.blocks.push_back(std::move(cb));
    }
  }
  rep.completely_positive =
      std::all_of(rep.blocks.begin(), rep.blocks.end(), [](const ChoiBlock& c) { return c.psd; });
  return rep;
}

bool is_completely_positive(const CPMap& phi, double tol) {
  if (phi.adjoint_defect() > tol) return false;
  return choi_blocks(phi, tol).completely_positive;
}

Contractivity is_contractive(const CPMap& phi, double tol) {
  if (!is_completely_positive(phi, tol)) throw PreconditionError("map is not completely positive");
  Contractivity c;
  c.norm = norm(phi.unit_image());
  c.contractive = c.norm <= 1.0 + tol;
  return c;
}

CPMap compress(const CPMap& phi, const Element& h) {
  if (!(h.algebra() == phi.codomain())) throw PreconditionError("compressing element outside the codomain");
  Element ha = h.adjoint();
  std::vector<Element> images;
  for (int k = 0; k < phi.domain().dimension(); ++k) images.push_back(ha * phi.image(k) * h);
  return CPMap(phi.domain(), phi.codomain(), std::move(images), phi.codomain_kind());
}

CPMap unitize(const CPMap& phi, double tol) {
  Contractivity c = is_contractive(phi, tol);
  if (!c.contractive) {
    std::ostringstream os;
    os << "unitization needs a contraction, ||phi(1)|| = " << c.norm;
    throw PreconditionError(os.str());
  }
  Algebra dom = phi.domain() + Algebra::abelian(1);
  std::vector<Element> images = phi.unit_images();
  images.push_back(Element::identity(phi.codomain()) - phi.unit_image());
  return CPMap(std::move(dom), phi.codomain(), std::move(images), phi.codomain_kind());
}

CPMap direct_sum(const CPMap& a, const CPMap& b) {
  if (a.domain().is_zero() && a.codomain().is_zero()) return b;
  if (b.domain().is_zero() && b.codomain().is_zero()) return a;
  Algebra dom = a.domain() + b.domain();
  Algebra cod = a.codomain() + b.codomain();
  Matrix img = Matrix::Zero(cod.dimension(), dom.dimension());
  img.topLeftCorner(a.images().rows(), a.images().cols()) = a.images();
  img.bottomRightCorner(b.images().rows(), b.images().cols()) = b.images();
  CodomainKind kind = CodomainKind::algebra;
  if (a.codomain_kind() == b.codomain_kind() && a.codomain_kind() != CodomainKind::matrix) {
    bool same_blocks = a.codomain().block_size(0) == b.codomain().block_size(0);
    if (a.codomain_kind() == CodomainKind::functions || same_blocks) kind = a.codomain_kind();
  }
  return CPMap::from_matrix(std::move(dom), std::move(cod), std::move(img), kind);
}

CPMap tensor_with_identity(const CPMap& phi, int r) {
  if (r < 1) throw PreconditionError("tensor_with_identity needs r >= 1");
  if (r == 1) return phi;
  std::vector<int> dsizes;
  for (int s : phi.domain().block_sizes()) dsizes.push_back(s * r);
  std::vector<int> csizes;
  for (int s : phi.codomain().block_sizes()) csizes.push_back(s * r);
  int cap = std::max(kDefaultMaxBlock, std::max(*std::max_element(dsizes.begin(), dsizes.end()),
                                                *std::max_element(csizes.begin(), csizes.end())));
  Algebra dom(dsizes, cap);
  Algebra cod(csizes, cap);
  CodomainKind kind = phi.codomain_kind();
  if (kind == CodomainKind::functions) kind = CodomainKind::matrix_functions;
  std::vector<Element> images(static_cast<size_t>(dom.dimension()), Element(cod));
  for (int i = 0; i < phi.domain().block_count(); ++i) {
    int ri = phi.domain().block_size(i);
    for (int j = 0; j < ri; ++j) {
      for (int k = 0; k < ri; ++k) {
        Element base = phi.image(i, j, k);
        for (int a = 0; a < r; ++a) {
          for (int b = 0; b < r; ++b) {
            Matrix e = Matrix::Zero(r, r);
            e(a, b) = 1.0;
            Element& out = images[static_cast<size_t>(dom.unit_flat(i, j * r + a, k * r + b))];
            for (int beta = 0; beta < cod.block_count(); ++beta) out.block(beta) = kron(base.block(beta), e);
          }
        }
      }
    }
  }
  return CPMap(std::move(dom), std::move(cod), std::move(images), kind);
}

CPMap compose(const CPMap& b, const CPMap& a) {
  if (!(a.codomain() == b.domain())) throw PreconditionError("maps cannot be composed");
  return CPMap::from_matrix(a.domain(), b.codomain(), b.images() * a.images(), b.codomain_kind());
}

// ---------------------------------------------------------------------------
// Stinespring

StinespringDilation stinespring(const CPMap& phi, double tol) {
  if (phi.codomain().block_count() != 1) {
    throw PreconditionError("stinespring needs a single matrix block as codomain");
  }
  ChoiReport choi = choi_blocks(phi, tol);
  if (!choi.completely_positive) {
    std::ostringstream os;
    os << "map is not completely positive (Choi eigenvalue " << choi.min_eigenvalue << ")";
    throw PreconditionError(os.str());
  }
  const Algebra& dom = phi.domain();
  int n = phi.codomain().block_size(0);
  // Kraus operators per domain block from the Choi eigendecomposition:
  // C = sum_m w_m w_m*, w_m = sum_j e_j (x) a_mj, K_m has rows a_mj*.
  std::vector<std::vector<Matrix>> kraus(static_cast<size_t>(dom.block_count()));
  for (int i = 0; i < dom.block_count(); ++i) {
    int r = dom.block_size(i);
    const Matrix& c = choi.blocks[static_cast<size_t>(i)].matrix;
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (c + c.adjoint())));
    double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    for (Eigen::Index m = es.eigenvalues().size() - 1; m >= 0; --m) {
      double lam = es.eigenvalues()(m);
      if (lam <= 1e-14 * top) break;
      Matrix k(r, n);
      for (int j = 0; j < r; ++j) {
        for (int s = 0; s < n; ++s) k(j, s) = std::conj(std::sqrt(lam) * es.eigenvectors()(j * n + s, m));
      }
      kraus[static_cast<size_t>(i)].push_back(std::move(k));
    }
  }
  StinespringDilation out{0, CPMap::zero(dom, Algebra::matrix(1)), Matrix(), {}};
  std::vector<int> base;
  for (int i = 0; i < dom.block_count(); ++i) {
    base.push_back(out.rep_dimension);
    int mi = static_cast<int>(kraus[static_cast<size_t>(i)].size());
    out.kraus_counts.push_back(mi);
    out.rep_dimension += dom.block_size(i) * mi;
  }
  int d = out.rep_dimension;
  out.v = Matrix::Zero(d, n);
  for (int i = 0; i < dom.block_count(); ++i) {
    int mi = out.kraus_counts[static_cast<size_t>(i)];
    for (int m = 0; m < mi; ++m) {
      const Matrix& k = kraus[static_cast<size_t>(i)][static_cast<size_t>(m)];
      for (int j = 0; j < dom.block_size(i); ++j) out.v.row(base[static_cast<size_t>(i)] + j * mi + m) = k.row(j);
    }
  }
  Algebra rep = d > 0 ? Algebra::matrix(d, std::max(d, kDefaultMaxBlock)) : Algebra::matrix(1);
  std::vector<Element> pi_images;
  for (int i = 0; i < dom.block_count(); ++i) {
    int r = dom.block_size(i);
    int mi = out.kraus_counts[static_cast<size_t>(i)];
    for (int k = 0; k < r; ++k) {
      for (int j = 0; j < r; ++j) {
        Element e(rep);
        if (d > 0) {
          for (int m = 0; m < mi; ++m) {
            e.block(0)(base[static_cast<size_t>(i)] + j * mi + m, base[static_cast<size_t>(i)] + k * mi + m) = 1.0;
          }
        }
        pi_images.push_back(std::move(e));
      }
    }
  }
  out.pi = CPMap(dom, rep, std::move(pi_images), CodomainKind::matrix);
  if (d == 0) out.v = Matrix::Zero(1, n);
  for (int f = 0; f < dom.dimension(); ++f) {
    Matrix rebuilt = out.v.adjoint() * out.pi.image(f).block(0) * out.v;
    out.reconstruction_error = std::max(out.reconstruction_error, operator_norm(rebuilt - phi.image(f).block(0)));
  }
  for (int f = 0; f < dom.dimension(); ++f) {
    UnitIndex a = dom.unit(f);
    for (int g = 0; g < dom.dimension(); ++g) {
      UnitIndex b = dom.unit(g);
      Element prod = out.pi.image(f) * out.pi.image(g);
      if (a.block == b.block && a.col == b.row) prod -= out.pi.image(a.block, a.row, b.col);
      out.homomorphism_defect = std::max(out.homomorphism_defect, norm(prod));
    }
  }
  out.v_norm_squared = std::pow(operator_norm(out.v), 2);
  out.isometry = operator_norm(out.v.adjoint() * out.v - Matrix::Identity(n, n)) <= std::max(tol, 1e-9);
  return out;
}

// ---------------------------------------------------------------------------
// Inequalities

SchwarzReport schwarz_defect(const CPMap& phi, const Element& x, double tol) {
  SchwarzReport rep;
  rep.x_norm = norm(x);
  Element fx = phi(x);
  Element gap = phi(x.adjoint() * x) - fx.adjoint() * fx;
  rep.min_eigenvalue = min_eigenvalue(gap, 1e-6);
  rep.defect = rep.min_eigenvalue < -tol ? rep.min_eigenvalue : 0.0;
  return rep;
}

MultiplicativityReport multiplicativity_defect(const CPMap& phi, const Element& x, const Element& y) {
  MultiplicativityReport rep;
  Element fx = phi(x);
  rep.lhs = norm(phi(y * x) - phi(y) * fx);
  rep.eps = norm(phi(x.adjoint() * x) - fx.adjoint() * fx);
  rep.bound = std::sqrt(rep.eps);
  rep.ok = rep.lhs <= rep.bound + 1e-9;
  return rep;
}

double orthogonality_defect(const Element& x, const Element& y) {
  if (x.algebra().is_abelian()) return x.coefficients().cwiseProduct(y.coefficients()).cwiseAbs().maxCoeff();
  Element xa = x.adjoint();
  Element ya = y.adjoint();
  return std::max({norm(x * y), norm(y * x), norm(xa * y), norm(x * ya)});
}

namespace {

// Pairwise orthogonality defects of the images of the domain generators
// of an abelian domain.
Graph image_graph(const CPMap& phi, double tol) {
  int s = phi.domain().dimension();
  Graph g(s);
  if (phi.codomain().is_abelian()) {
    Eigen::MatrixXd absimg = phi.images().cwiseAbs();
    for (int i = 0; i < s; ++i) {
      for (int j = i + 1; j < s; ++j) {
        if (absimg.col(i).cwiseProduct(absimg.col(j)).maxCoeff() > tol) g.add_edge(i, j);
      }
    }
    return g;
  }
  std::vector<Element> imgs = phi.unit_images();
  for (int i = 0; i < s; ++i) {
    for (int j = i + 1; j < s; ++j) {
      if (orthogonality_defect(imgs[static_cast<size_t>(i)], imgs[static_cast<size_t>(j)]) > tol) g.add_edge(i, j);
    }
  }
  return g;
}

}  // namespace

int strict_order_abelian(const CPMap& phi, double tol, std::vector<int>* clique) {
  if (!phi.domain().is_abelian()) throw PreconditionError("strict_order_abelian needs an abelian domain");
  std::vector<int> c = max_clique(image_graph(phi, tol));
  if (clique) *clique = c;
  return static_cast<int>(c.size()) - 1;
}

// ---------------------------------------------------------------------------
// Order zero

CPMap restrict_to_block(const CPMap& phi, int block) {
  int r = phi.domain().block_size(block);
  Algebra dom = Algebra::matrix(r, std::max(r, kDefaultMaxBlock));
  return CPMap::from_matrix(dom, phi.codomain(), phi.images().middleCols(phi.domain().offset(block), r * r),
                            phi.codomain_kind());
}

OrderZeroCertificate certify_order_zero(const CPMap& phi, double tol, double rank_cut) {
  OrderZeroCertificate cert;
  cert.tol = tol;
  const Algebra& dom = phi.domain();
  auto fail = [&](std::string check, int block, int other, int unit, double value) {
    cert.order_zero = false;
    cert.witness = OrderZeroWitness{std::move(check), block, other, unit, value};
    cert.blocks.clear();
    cert.max_defect = std::max(cert.max_defect, value);
    return cert;
  };
  auto track = [&](double v) { cert.max_defect = std::max(cert.max_defect, v); };

  std::vector<Element> h;
  for (int i = 0; i < dom.block_count(); ++i) h.push_back(phi(Element::block_identity(dom, i)));
  for (int i = 0; i < dom.block_count(); ++i) {
    for (int j = i + 1; j < dom.block_count(); ++j) {
      double d = orthogonality_defect(h[static_cast<size_t>(i)], h[static_cast<size_t>(j)]);
      if (d > tol) return fail("cross_block", i, j, -1, d);
      track(d);
    }
  }
  for (int i = 0; i < dom.block_count(); ++i) {
    int r = dom.block_size(i);
    for (int j = 0; j < r; ++j) {
      for (int k = j + 1; k < r; ++k) {
        double d = orthogonality_defect(phi.image(i, j, j), phi.image(i, k, k));
        if (d > tol) return fail("diagonal_units", i, dom.unit_flat(i, k, k), dom.unit_flat(i, j, j), d);
        track(d);
      }
    }
  }
  for (int i = 0; i < dom.block_count(); ++i) {
    const Element& hi = h[static_cast<size_t>(i)];
    int r = dom.block_size(i);
    for (int f = dom.offset(i); f < dom.offset(i) + r * r; ++f) {
      Element img = phi.image(f);
      double d = norm(hi * img - img * hi);
      if (d > tol) return fail("commutator", i, -1, f, d);
      track(d);
    }
  }
  for (int i = 0; i < dom.block_count(); ++i) {
    const Element& hi = h[static_cast<size_t>(i)];
    int r = dom.block_size(i);
    OrderZeroBlock blk{hi, Element(hi.algebra()), {}};
    if (hermitian_defect(hi) > tol || min_eigenvalue(hi, 1e-6) < -tol) {
      return fail("positivity", i, -1, -1, std::max(hermitian_defect(hi), -min_eigenvalue(hi, 1e-6)));
    }
    blk.support = support_projection(hi, rank_cut, std::max(tol, 1e-9));
    Element s = apply_function(hi, ScalarFunction::inverse_sqrt_on_support(rank_cut), std::max(tol, 1e-9));
    for (int f = dom.offset(i); f < dom.offset(i) + r * r; ++f) blk.sigma.push_back(s * phi.image(f) * s);
    for (int a = 0; a < r * r; ++a) {
      UnitIndex ua = dom.unit(dom.offset(i) + a);
      for (int b = 0; b < r * r; ++b) {
        UnitIndex ub = dom.unit(dom.offset(i) + b);
        Element prod = blk.sigma[static_cast<size_t>(a)] * blk.sigma[static_cast<size_t>(b)];
        if (ua.col == ub.row) prod -= blk.sigma[static_cast<size_t>(ub.col * r + ua.row)];
        double d = norm(prod);
        if (d > tol) return fail("multiplicativity", i, dom.offset(i) + b, dom.offset(i) + a, d);
        track(d);
      }
    }
    Element sigma_one(hi.algebra());
    for (int j = 0; j < r; ++j) sigma_one += blk.sigma[static_cast<size_t>(j * r + j)];
    double unit_gap = norm(sigma_one - blk.support);
    if (unit_gap > tol) return fail("support_unit", i, -1, -1, unit_gap);
    track(unit_gap);
    for (int a = 0; a < r * r; ++a) {
      double d = norm(hi * blk.sigma[static_cast<size_t>(a)] - phi.image(dom.offset(i) + a));
      if (d > tol) return fail("reconstruction", i, -1, dom.offset(i) + a, d);
      track(d);
    }
    cert.blocks.push_back(std::move(blk));
  }
  cert.order_zero = true;
  return cert;
}

// ---------------------------------------------------------------------------
// Elementary sets

std::vector<int> max_weight_clique(const std::vector<std::vector<bool>>& adj, const std::vector<int>& weight) {
  int n = static_cast<int>(weight.size());
  std::vector<int> best;
  int best_w = -1;
  std::vector<int> cur;
  std::function<void(std::vector<int>, int)> rec = [&](std::vector<int> cand, int w) {
    if (w > best_w) {
      best_w = w;
      best = cur;
    }
    int rest = 0;
    for (int v : cand) rest += weight[static_cast<size_t>(v)];
    for (size_t idx = 0; idx < cand.size(); ++idx) {
      if (w + rest <= best_w) return;
      int v = cand[idx];
      rest -= weight[static_cast<size_t>(v)];
      std::vector<int> next;
      for (size_t j = idx + 1; j < cand.size(); ++j) {
        if (adj[static_cast<size_t>(v)][static_cast<size_t>(cand[j])]) next.push_back(cand[j]);
      }
      cur.push_back(v);
      rec(std::move(next), w + weight[static_cast<size_t>(v)]);
      cur.pop_back();
    }
  };
  std::vector<int> all(static_cast<size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  rec(all, 0);
  std::sort(best.begin(), best.end());
  return best;
}

namespace {

struct BlockStructure {
  std::vector<bool> order_zero;
  std::vector<std::vector<bool>> adj;
  std::vector<int> weight;
  std::vector<int> clique;
  int clique_weight = 0;
};

BlockStructure block_structure(const CPMap& phi, double tol) {
  const Algebra& dom = phi.domain();
  int m = dom.block_count();
  BlockStructure bs;
  bs.adj.assign(static_cast<size_t>(m), std::vector<bool>(static_cast<size_t>(m), false));
  std::vector<Element> h;
  for (int i = 0; i < m; ++i) {
    h.push_back(phi(Element::block_identity(dom, i)));
    bool oz = dom.block_size(i) == 1 || certify_order_zero(restrict_to_block(phi, i), tol).order_zero;
    bs.order_zero.push_back(oz);
    bs.weight.push_back(oz ? 1 : dom.block_size(i));
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      bool e = orthogonality_defect(h[static_cast<size_t>(i)], h[static_cast<size_t>(j)]) > tol;
      bs.adj[static_cast<size_t>(i)][static_cast<size_t>(j)] = e;
      bs.adj[static_cast<size_t>(j)][static_cast<size_t>(i)] = e;
    }
  }
  bs.clique = max_weight_clique(bs.adj, bs.weight);
  for (int v : bs.clique) bs.clique_weight += bs.weight[static_cast<size_t>(v)];
  return bs;
}

class FrameSearch {
 public:
  FrameSearch(const CPMap& phi, std::vector<int> member_blocks, Rng& rng)
      : phi_(phi), blocks_(std::move(member_blocks)), rng_(rng) {
    const Algebra& dom = phi_.domain();
    for (int b = 0; b < dom.block_count(); ++b) frames_.push_back(Matrix::Identity(dom.block_size(b), dom.block_size(b)));
    std::vector<int> used(static_cast<size_t>(dom.block_count()), 0);
    for (int b : blocks_) columns_.push_back(used[static_cast<size_t>(b)]++);
  }

  struct Score {
    double min = 0.0;
    double logsum = 0.0;
    int worst_a = 0, worst_b = 0;
    bool better_than(const Score& o) const {
      if (min > o.min * (1.0 + 1e-12) && min > o.min + 1e-300) return true;
      if (min < o.min) return false;
      return logsum > o.logsum + 1e-12;
    }
  };

  Score evaluate() {
    ++evaluations_;
    const Algebra& dom = phi_.domain();
    size_t m = blocks_.size();
    images_.clear();
    for (size_t a = 0; a < m; ++a) {
      int b = blocks_[a];
      int r = dom.block_size(b);
      Vector v = frames_[static_cast<size_t>(b)].col(columns_[a]);
      Matrix proj = v * v.adjoint();
      Vector coeff = Eigen::Map<const Vector>(proj.data(), r * r);
      images_.push_back(Element::from_coefficients(
          phi_.codomain(), phi_.images().middleCols(dom.offset(b), r * r) * coeff));
    }
    Score s;
    s.min = INFINITY;
    for (size_t a = 0; a < m; ++a) {
      for (size_t b = a + 1; b < m; ++b) {
        double p = norm(images_[a] * images_[b]);
        s.logsum += std::log(std::max(p, 1e-300));
        if (p < s.min) {
          s.min = p;
          s.worst_a = static_cast<int>(a);
          s.worst_b = static_cast<int>(b);
        }
      }
    }
    if (m < 2) s.min = INFINITY;
    return s;
  }

  bool perturbable(int member) const {
    return phi_.domain().block_size(blocks_[static_cast<size_t>(member)]) >= 2;
  }

  // Rotate the column of `member` against another column of its block by a
  // 2x2 unitary within `radius` of the identity.
  void perturb(int member, double radius) {
    int b = blocks_[static_cast<size_t>(member)];
    Matrix& f = frames_[static_cast<size_t>(b)];
    int r = static_cast<int>(f.cols());
    int c = columns_[static_cast<size_t>(member)];
    std::uniform_int_distribution<int> pick(0, r - 2);
    int k = pick(rng_);
    if (k >= c) ++k;
    Matrix g = unitary_near(Matrix::Identity(2, 2), radius, rng_);
    Matrix pair(r, 2);
    pair.col(0) = f.col(c);
    pair.col(1) = f.col(k);
    pair = pair * g;
    f.col(c) = pair.col(0);
    f.col(k) = pair.col(1);
  }

  void randomize() {
    for (auto& f : frames_) {
      if (f.rows() >= 2) f = random_unitary(static_cast<int>(f.rows()), rng_);
    }
  }

  std::vector<Matrix> frames_;
  int evaluations_ = 0;

  ElementarySet elementary_set(const Score& s) const {
    ElementarySet es;
    const Algebra& dom = phi_.domain();
    for (size_t a = 0; a < blocks_.size(); ++a) {
      int b = blocks_[a];
      Vector v = frames_[static_cast<size_t>(b)].col(columns_[a]);
      Element e(dom);
      e.block(b) = v * v.adjoint();
      es.projections.push_back(std::move(e));
      es.blocks.push_back(b);
    }
    es.min_product = s.min;
    es.orthogonality = 0.0;
    for (size_t a = 0; a < es.projections.size(); ++a) {
      for (size_t c = a + 1; c < es.projections.size(); ++c) {
        es.orthogonality = std::max(es.orthogonality, norm(es.projections[a] * es.projections[c]));
      }
    }
    es.evaluations = evaluations_;
    return es;
  }

 private:
  const CPMap& phi_;
  std::vector<int> blocks_;
  std::vector<int> columns_;
  Rng& rng_;
  std::vector<Element> images_;
};

}  // namespace

WitnessSearch witness_elementary_set(const CPMap& phi, int m, std::uint64_t seed, double tol, int budget) {
  WitnessSearch out;
  if (m < 1) {
    out.impossible = true;
    out.note = "size must be positive";
    return out;
  }
  BlockStructure bs = block_structure(phi, tol);
  if (m > bs.clique_weight) {
    out.impossible = true;
    std::ostringstream os;
    os << "no elementary set of size " << m << " can have pairwise non-orthogonal images: the block structure "
       << "allows at most " << bs.clique_weight;
    out.note = os.str();
    return out;
  }
  // Fill the heaviest admissible clique, block by block.
  std::vector<int> member_blocks;
  for (int b : bs.clique) {
    for (int c = 0; c < bs.weight[static_cast<size_t>(b)] && static_cast<int>(member_blocks.size()) < m; ++c) {
      member_blocks.push_back(b);
    }
  }
  Rng rng(seed);
  FrameSearch search(phi, member_blocks, rng);
  FrameSearch::Score cur = search.evaluate();
  int since_improvement = 0;
  double radius = 0.5;
  bool any_perturbable = false;
  for (int a = 0; a < m; ++a) any_perturbable = any_perturbable || search.perturbable(a);
  while (!(cur.min > tol) && search.evaluations_ < budget && any_perturbable) {
    if (since_improvement > 40) {
      search.randomize();
      cur = search.evaluate();
      since_improvement = 0;
      radius = 0.5;
      continue;
    }
    std::vector<Matrix> saved = search.frames_;
    std::uniform_int_distribution<int> coin(0, 1);
    int member = coin(rng) ? cur.worst_a : cur.worst_b;
    if (!search.perturbable(member)) member = member == cur.worst_a ? cur.worst_b : cur.worst_a;
    if (!search.perturbable(member)) {
      std::uniform_int_distribution<int> any(0, m - 1);
      member = any(rng);
      if (!search.perturbable(member)) {
        ++since_improvement;
        continue;
      }
    }
    search.perturb(member, radius);
    FrameSearch::Score next = search.evaluate();
    if (next.better_than(cur)) {
      cur = next;
      since_improvement = 0;
      radius = std::min(radius * 1.5, 3.0);
    } else {
      search.frames_ = std::move(saved);
      ++since_improvement;
      radius = std::max(radius * 0.8, 1e-3);
    }
  }
  out.evaluations = search.evaluations_;
  if (cur.min > tol) {
    out.set = search.elementary_set(cur);
  } else {
    std::ostringstream os;
    os << "inconclusive: best minimal product " << cur.min << " after " << out.evaluations
       << " evaluations (seed " << seed << ")";
    out.note = os.str();
  }
  return out;
}

OrderBounds strict_order_bounds(const CPMap& phi, double tol, std::uint64_t seed) {
  OrderBounds ob;
  const Algebra& dom = phi.domain();
  if (dom.is_abelian()) {
    ob.method = "abelian";
    ob.lower = ob.upper = strict_order_abelian(phi, tol);
    ob.exact = true;
    ob.block_order_zero.assign(static_cast<size_t>(dom.block_count()), true);
    return ob;
  }
  BlockStructure bs = block_structure(phi, tol);
  ob.block_order_zero = bs.order_zero;
  if (dom.block_count() == 1) {
    // Dichotomy: a contraction on M_r has strict order 0 or r - 1.
    ob.method = "single_block";
    ob.lower = ob.upper = bs.weight[0] - 1;
    ob.exact = true;
    if (!bs.order_zero[0]) {
      WitnessSearch ws = witness_elementary_set(phi, dom.block_size(0), seed, tol);
      ob.witness = ws.set;
    }
    return ob;
  }
  ob.method = "block_graph";
  ob.upper = bs.clique_weight - 1;
  int theory_lower = *std::max_element(bs.weight.begin(), bs.weight.end()) - 1;
  ob.lower = theory_lower;
  for (int m = ob.upper + 1; m > theory_lower + 1; --m) {
    WitnessSearch ws = witness_elementary_set(phi, m, seed, tol);
    if (ws.set) {
      ob.lower = m - 1;
      ob.witness = ws.set;
      break;
    }
  }
  ob.exact = ob.lower == ob.upper;
  return ob;
}

}  // namespace cpr
