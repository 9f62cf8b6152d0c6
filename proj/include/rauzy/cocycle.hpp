// Rauzy-Veech cocycle: exact elementary integer matrices along a path,
// the Omega conjugacy identity, invariant cones, growth measurement, and
// stable/central subspace approximation.
//
// Matrix products are exact (cpp_int); floating point enters only in cone
// membership tests and subspace normalization.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rauzy/bigmat.hpp"
#include "rauzy/combinatorics.hpp"
#include "rauzy/numeric.hpp"

namespace rauzy {

struct ThetaMatrix {
  BigMat m;
  CombinatorialPair before, after;
  int eps = 0;
  Letter winner = 0;
  Letter loser = 0;
};

// Theta = I + E_{loser,winner}; propagates return times and slope vectors.
inline ThetaMatrix theta_matrix(const CombinatorialPair& pair, int eps) {
  if (!validate_pair(pair).ok()) throw std::invalid_argument("theta_matrix: invalid pair");
  ThetaMatrix t;
  t.before = pair;
  t.after = rauzy_move(pair, eps);
  t.eps = eps;
  t.winner = pair.last(eps);
  t.loser = pair.last(1 - eps);
  t.m = BigMat::identity(pair.d());
  t.m(t.loser, t.winner) = 1;
  return t;
}

inline BigMat theta_inverse(const ThetaMatrix& t) {
  BigMat inv = BigMat::identity(t.m.n);
  inv(t.loser, t.winner) = -1;
  return inv;
}

// Exact check of the conjugacy identity in the form Theta Omega Theta^T = Omega'.
inline bool check_theta_omega(const CombinatorialPair& pair, int eps) {
  ThetaMatrix t = theta_matrix(pair, eps);
  BigMat lhs = t.m * omega_matrix(pair) * t.m.transpose();
  return lhs == omega_matrix(t.after);
}

struct CocyclePath {
  RauzyPath base;
  std::vector<ThetaMatrix> thetas;
  std::vector<BigMat> prefix;  // prefix[i] = Theta_i * ... * Theta_0

  static CocyclePath from(const RauzyPath& path) {
    CocyclePath c;
    c.base = path;
    for (const RauzyStep& s : path.steps) {
      ThetaMatrix t = theta_matrix(s.before, s.eps);
      if (c.prefix.empty()) c.prefix.push_back(t.m);
      else c.prefix.push_back(t.m * c.prefix.back());
      c.thetas.push_back(std::move(t));
    }
    return c;
  }

  int length() const { return static_cast<int>(thetas.size()); }
  const BigMat& product() const {
    if (prefix.empty()) throw std::logic_error("CocyclePath: empty path has no product");
    return prefix.back();
  }
};

// ---------------------------------------------------------------------------
// Cones.  T+ is cut out by partial-sum inequalities; C^s = Omega R^A_+ and
// C^u = -Omega T+ live inside Im Omega and membership needs a small
// feasibility solve (margin maximization by vertex enumeration; dimensions
// here are tiny).
// ---------------------------------------------------------------------------
enum class ConeKind { Tplus, Cs, Cu };

struct ConeMembership {
  bool in_image = true;   // v in Im Omega (always true for Tplus)
  bool member = false;
  double margin = 0.0;    // best feasibility margin found
  Eigen::VectorXd certificate;  // preimage x (Cs), tau (Cu), or v itself (Tplus)
};

namespace detail {
struct LpResult {
  bool feasible = false;
  double value = 0.0;
  Eigen::VectorXd z;
};

// maximize z[dim-1] subject to A z >= b, |z_i| <= box.
inline LpResult maximize_last(Eigen::MatrixXd A, Eigen::VectorXd b, double box = 1e6) {
  int dim = static_cast<int>(A.cols());
  int base_rows = static_cast<int>(A.rows());
  Eigen::MatrixXd fullA(base_rows + 2 * dim, dim);
  Eigen::VectorXd fullB(base_rows + 2 * dim);
  fullA.topRows(base_rows) = A;
  fullB.head(base_rows) = b;
  for (int i = 0; i < dim; ++i) {
    fullA.row(base_rows + 2 * i).setZero();
    fullA(base_rows + 2 * i, i) = 1.0;
    fullB(base_rows + 2 * i) = -box;
    fullA.row(base_rows + 2 * i + 1).setZero();
    fullA(base_rows + 2 * i + 1, i) = -1.0;
    fullB(base_rows + 2 * i + 1) = -box;
  }
  int rows = static_cast<int>(fullA.rows());
  LpResult best;
  std::vector<int> idx(dim);
  // enumerate dim-subsets of rows
  std::vector<int> comb(dim);
  for (int i = 0; i < dim; ++i) comb[i] = i;
  auto advance = [&]() {
    int i = dim - 1;
    while (i >= 0 && comb[i] == rows - dim + i) --i;
    if (i < 0) return false;
    ++comb[i];
    for (int j = i + 1; j < dim; ++j) comb[j] = comb[j - 1] + 1;
    return true;
  };
  do {
    Eigen::MatrixXd S(dim, dim);
    Eigen::VectorXd rb(dim);
    for (int i = 0; i < dim; ++i) {
      S.row(i) = fullA.row(comb[i]);
      rb(i) = fullB(comb[i]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
    if (!lu.isInvertible()) continue;
    Eigen::VectorXd z = lu.solve(rb);
    if (((fullA * z - fullB).array() < -1e-8).any()) continue;
    if (!best.feasible || z(dim - 1) > best.value) {
      best.feasible = true;
      best.value = z(dim - 1);
      best.z = z;
    }
  } while (advance());
  return best;
}

inline Eigen::MatrixXd omega_double(const CombinatorialPair& pair) {
  int d = pair.d();
  BigMat om = omega_matrix(pair);
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = to_double(om(i, j));
  return m;
}

// Rows of the T+ inequality system: partial pi0 sums positive, partial pi1
// sums negative.
inline Eigen::MatrixXd tplus_rows(const CombinatorialPair& pair) {
  int d = pair.d();
  Eigen::MatrixXd C(2 * (d - 1), d);
  C.setZero();
  for (int k = 1; k <= d - 1; ++k)
    for (Letter l = 0; l < d; ++l) {
      if (pair.pi0[l] <= k) C(k - 1, l) = 1.0;
      if (pair.pi1[l] <= k) C(d - 1 + k - 1, l) = -1.0;
    }
  return C;
}
}  // namespace detail

inline ConeMembership cone_membership(const Eigen::VectorXd& v, const CombinatorialPair& pair,
                                      ConeKind kind, double tol = 1e-10) {
  int d = pair.d();
  if (v.size() != d) throw std::invalid_argument("cone_membership: dimension mismatch");
  ConeMembership res;

  if (kind == ConeKind::Tplus) {
    Eigen::VectorXd sums = detail::tplus_rows(pair) * v;
    res.margin = sums.minCoeff();
    res.member = res.margin > tol;
    res.certificate = v;
    return res;
  }

  Eigen::MatrixXd om = detail::omega_double(pair);
  Eigen::VectorXd rhs = (kind == ConeKind::Cs) ? v : Eigen::VectorXd(-v);
  Eigen::VectorXd x0 = om.fullPivHouseholderQr().solve(rhs);
  double resid = (om * x0 - rhs).norm();
  if (resid > tol * std::max(1.0, rhs.norm())) {
    res.in_image = false;
    return res;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(om);
  lu.setThreshold(1e-9);
  Eigen::MatrixXd N = lu.kernel();  // d x k
  int k = static_cast<int>(N.cols());

  Eigen::MatrixXd C = (kind == ConeKind::Cs) ? Eigen::MatrixXd(Eigen::MatrixXd::Identity(d, d))
                                             : detail::tplus_rows(pair);
  // constraints C (x0 + N t) >= m  ->  [C*N, -1] (t, m) >= -C x0
  Eigen::MatrixXd A(C.rows(), k + 1);
  if (k > 0) A.leftCols(k) = C * N;
  A.col(k) = Eigen::VectorXd::Constant(C.rows(), -1.0);
  Eigen::VectorXd b = -(C * x0);
  detail::LpResult lp = detail::maximize_last(A, b);
  if (!lp.feasible) return res;
  res.margin = lp.value;
  Eigen::VectorXd x = x0;
  if (k > 0) x += N * lp.z.head(k);
  res.certificate = x;
  res.member = (kind == ConeKind::Cs) ? res.margin > -tol : res.margin > tol;
  return res;
}

// ---------------------------------------------------------------------------
// Growth measurement (Euclidean norms, fitted rate over the last half).
// ---------------------------------------------------------------------------
enum class GrowthDirection { forward_unstable, backward_stable };

struct GrowthEstimate {
  std::vector<double> log_norms;  // after 0,1,...,n applications
  std::vector<double> factors;    // per-step norm ratios
  double mu_hat = 0.0;
};

inline GrowthEstimate growth_estimate(const CocyclePath& path, const Eigen::VectorXd& v,
                                      GrowthDirection dir) {
  GrowthEstimate g;
  Eigen::VectorXd w = v;
  if (dir == GrowthDirection::forward_unstable) {
    ConeMembership cm = cone_membership(v, path.base.vertices.front(), ConeKind::Cu);
    if (!cm.member) throw std::invalid_argument("growth_estimate: v not in C^u of the start");
    g.log_norms.push_back(std::log(w.norm()));
    for (const ThetaMatrix& t : path.thetas) {
      w(t.loser) += w(t.winner);
      g.log_norms.push_back(std::log(w.norm()));
    }
  } else {
    ConeMembership cm = cone_membership(v, path.base.vertices.back(), ConeKind::Cs);
    if (!cm.member) throw std::invalid_argument("growth_estimate: v not in C^s of the end");
    g.log_norms.push_back(std::log(w.norm()));
    for (int i = path.length() - 1; i >= 0; --i) {
      const ThetaMatrix& t = path.thetas[i];
      w(t.loser) -= w(t.winner);
      g.log_norms.push_back(std::log(w.norm()));
    }
  }
  for (size_t i = 1; i < g.log_norms.size(); ++i)
    g.factors.push_back(std::exp(g.log_norms[i] - g.log_norms[i - 1]));
  g.mu_hat = std::exp(fit_slope(
      [&] {
        std::vector<double> xs;
        for (size_t i = g.log_norms.size() / 2; i < g.log_norms.size(); ++i)
          xs.push_back(static_cast<double>(i));
        return xs;
      }(),
      std::vector<double>(g.log_norms.begin() + g.log_norms.size() / 2, g.log_norms.end())));
  return g;
}

// ---------------------------------------------------------------------------
// Subspaces.
// ---------------------------------------------------------------------------
struct SubspaceBasis {
  std::vector<Eigen::VectorXd> vectors;  // unit norm
  double residual = 0.0;                 // diagnostic (angular diameter or defect)
};

namespace detail {
inline std::vector<Eigen::VectorXd> pulled_back_stable_rays(const CocyclePath& path, int depth,
                                                            int base_level = 0) {
  const CombinatorialPair& pm = path.base.vertices[depth];
  int d = pm.d();
  BigMat om = omega_matrix(pm);
  std::vector<Eigen::VectorXd> rays;
  for (int col = 0; col < d; ++col) {
    std::vector<BigInt> z(d);
    bool zero = true;
    for (int i = 0; i < d; ++i) {
      z[i] = om(i, col);
      if (z[i] != 0) zero = false;
    }
    if (zero) continue;
    for (int i = depth - 1; i >= base_level; --i) {
      const ThetaMatrix& t = path.thetas[i];
      z[t.loser] -= z[t.winner];
    }
    Eigen::VectorXd rd(d);
    for (int i = 0; i < d; ++i) rd(i) = to_double(z[i]);
    rays.push_back(rd.normalized());
  }
  // sign-align with the first ray
  for (auto& r : rays)
    if (r.dot(rays.front()) < 0) r = -r;
  return rays;
}

inline double angular_diameter(const std::vector<Eigen::VectorXd>& rays) {
  double worst = 0.0;
  for (size_t i = 0; i < rays.size(); ++i)
    for (size_t j = i + 1; j < rays.size(); ++j) {
      double c = std::clamp(rays[i].dot(rays[j]), -1.0, 1.0);
      worst = std::max(worst, std::acos(c));
    }
  return worst;
}
}  // namespace detail

// E^s_0 approximation: pull the stable-cone generators at level m back
// through exact inverse products; the cone collapses to a ray and the
// angular diameter is the convergence diagnostic.
inline SubspaceBasis stable_subspace_approx(const CocyclePath& path, int depth) {
  if (depth < 1 || depth > path.length())
    throw std::invalid_argument("stable_subspace_approx: bad depth");
  auto rays = detail::pulled_back_stable_rays(path, depth);
  double diam = detail::angular_diameter(rays);
  if (depth >= 4) {
    double half = detail::angular_diameter(detail::pulled_back_stable_rays(path, depth / 2));
    if (diam > half + 1e-12)
      throw std::runtime_error(
          "stable_subspace_approx: no cone contraction (path likely not k-bounded)");
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(rays.front().size());
  for (const auto& r : rays) mean += r;
  SubspaceBasis sb;
  sb.vectors.push_back(mean.normalized());
  sb.residual = diam;
  return sb;
}

// Same pullback, but stopping at an intermediate level: approximates the
// stable ray E^s_level using the window [level, depth] of the path.
inline SubspaceBasis stable_subspace_at(const CocyclePath& path, int level, int depth) {
  if (level < 0 || depth <= level || depth > path.length())
    throw std::invalid_argument("stable_subspace_at: bad window");
  auto rays = detail::pulled_back_stable_rays(path, depth, level);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(rays.front().size());
  for (const auto& r : rays) mean += r;
  SubspaceBasis sb;
  sb.vectors.push_back(mean.normalized());
  sb.residual = detail::angular_diameter(rays);
  return sb;
}

struct CentralSpace {
  SubspaceBasis basis;            // central vectors k_j + Psi(k_j), unit norm kept separately
  std::vector<Eigen::VectorXd> raw_vectors;  // k_j + Psi(k_j), unnormalized
  std::vector<Eigen::VectorXd> ker_basis;    // Ker Omega basis, doubles
  Eigen::MatrixXd psi;            // d x (d-2): Psi applied to each kernel basis vector
  int dim = 0;
};

// Fixed space of the period matrix, verified to be a graph over Ker Omega.
inline CentralSpace periodic_central_space(const CocyclePath& path) {
  if (path.length() < 1) throw std::invalid_argument("periodic_central_space: empty path");
  if (!(path.base.vertices.front() == path.base.vertices.back()))
    throw std::invalid_argument("periodic_central_space: path does not close");
  const CombinatorialPair& p0 = path.base.vertices.front();
  int d = p0.d();
  BigMat P = path.product();
  auto fixed = kernel_basis(P - BigMat::identity(d));
  if (static_cast<int>(fixed.size()) != d - 2)
    throw std::runtime_error("periodic_central_space: unexpected spectrum (dim != d-2)");

  CentralSpace cs;
  cs.dim = d - 2;
  if (d == 2) return cs;

  BigMat om = omega_matrix(p0);
  auto ker_om = kernel_basis(om);  // d-2 vectors
  // Independent columns of Omega spanning Im Omega (rank 2 in genus one).
  std::vector<std::vector<BigInt>> im_cols;
  {
    BigMat probe(d);
    int got = 0;
    for (int col = 0; col < d && got < 2; ++col) {
      for (int i = 0; i < d; ++i) probe(i, got) = om(i, col);
      if (rank(probe) == got + 1) ++got;
      else
        for (int i = 0; i < d; ++i) probe(i, got) = 0;
    }
    if (got != 2) throw std::runtime_error("periodic_central_space: Im Omega rank != 2");
    for (int j = 0; j < 2; ++j) {
      std::vector<BigInt> c(d);
      for (int i = 0; i < d; ++i) c[i] = probe(i, j);
      im_cols.push_back(std::move(c));
    }
  }

  // Solve v = K kc + W wc exactly for each fixed vector.
  BigMat basis_mat(d);
  for (int j = 0; j < d - 2; ++j)
    for (int i = 0; i < d; ++i) basis_mat(i, j) = ker_om[j][i];
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < d; ++i) basis_mat(i, d - 2 + j) = im_cols[j][i];

  std::vector<std::vector<BigRat>> kcoords, wcoords;
  for (const auto& v : fixed) {
    std::vector<BigRat> rhs(d);
    for (int i = 0; i < d; ++i) rhs[i] = BigRat(v[i]);
    auto c = solve(basis_mat, rhs);
    kcoords.push_back(std::vector<BigRat>(c.begin(), c.begin() + (d - 2)));
    wcoords.push_back(std::vector<BigRat>(c.begin() + (d - 2), c.end()));
  }
  // Graph over Ker Omega: the kernel-coordinate matrix must be invertible.
  {
    BigMat kc(d - 2);
    BigInt lcm = 1;
    for (const auto& col : kcoords)
      for (const auto& x : col) lcm = boost::multiprecision::lcm(lcm, BigInt(denominator(x)));
    for (int j = 0; j < d - 2; ++j)
      for (int i = 0; i < d - 2; ++i)
        kc(i, j) = BigInt(numerator(kcoords[j][i] * BigRat(lcm)));
    if (det(kc) == 0)
      throw std::runtime_error("periodic_central_space: fixed space is not a graph over Ker");
  }

  // Change basis so the kernel part of column j is exactly ker_om[j].
  Eigen::MatrixXd V(d, d - 2), Kc(d - 2, d - 2), K(d, d - 2);
  for (int j = 0; j < d - 2; ++j) {
    for (int i = 0; i < d; ++i) V(i, j) = to_double(BigRat(fixed[j][i]));
    for (int i = 0; i < d - 2; ++i) Kc(i, j) = to_double(kcoords[j][i]);
    for (int i = 0; i < d; ++i) K(i, j) = to_double(BigRat(ker_om[j][i]));
  }
  Eigen::MatrixXd Vg = V * Kc.inverse();  // column j = ker_om[j] + Psi(ker_om[j])
  cs.psi = Vg - K;
  for (int j = 0; j < d - 2; ++j) {
    cs.raw_vectors.push_back(Vg.col(j));
    cs.basis.vectors.push_back(Vg.col(j).normalized());
    cs.ker_basis.push_back(K.col(j));
  }
  return cs;
}

struct CentralLimit {
  std::vector<int> ladder;       // prefix depths used
  std::vector<int> periods;      // resulting closure periods
  std::vector<double> increments;  // ||Psi_{p_{i+1}} - Psi_{p_i}||_F
  CentralSpace last;
  bool accepted = false;
};

// E^c_{0,infty} by periodic closures of increasing prefixes of `path`.
inline CentralLimit central_space_limit(const RauzyPath& path, const std::vector<int>& ladder,
                                        double accept_tol = 1e-8) {
  CentralLimit cl;
  std::optional<Eigen::MatrixXd> prev_psi;
  for (int n : ladder) {
    if (n < 1 || n > path.length())
      throw std::invalid_argument("central_space_limit: ladder depth out of range");
    auto closing = find_path(path.vertices[n], path.vertices.front());
    if (!closing) throw std::runtime_error("central_space_limit: cannot close the prefix");
    RauzyPath closed = RauzyPath::start_at(path.vertices.front());
    for (int i = 0; i < n; ++i) closed.push(path.steps[i].eps);
    for (int eps : *closing) closed.push(eps);
    if (closed.length() == 0) continue;
    CentralSpace cs = periodic_central_space(CocyclePath::from(closed));
    cl.ladder.push_back(n);
    cl.periods.push_back(closed.length());
    if (prev_psi && cs.psi.size() > 0)
      cl.increments.push_back((cs.psi - *prev_psi).norm());
    prev_psi = cs.psi;
    cl.last = cs;
  }
  if (cl.last.dim == 0) cl.accepted = true;  // trivial central space
  else if (!cl.increments.empty()) cl.accepted = cl.increments.back() < accept_tol;
  return cl;
}

// Forward-propagated unstable ray u_n = Theta_{0,n-1} u0 / |.|, with the
// canonical interior point of T+ as the seed.
inline Eigen::VectorXd tplus_interior_point(const CombinatorialPair& pair) {
  int d = pair.d();
  Eigen::VectorXd tau(d);
  for (Letter l = 0; l < d; ++l) tau(l) = static_cast<double>(pair.pi1[l] - pair.pi0[l]);
  return tau;
}

inline Eigen::VectorXd canonical_unstable_seed(const CombinatorialPair& pair) {
  Eigen::VectorXd u = -detail::omega_double(pair) * tplus_interior_point(pair);
  return u.normalized();
}

}  // namespace rauzy
