#include "wavest/slab_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wavest/errors.hpp"
#include "wavest/polyquad.hpp"

namespace wavest {
namespace {

struct MethodName {
  MethodId id;
  const char* name;
};

constexpr MethodName kMethodNames[] = {
    {MethodId::Unstabilized, "unstabilized"},
    {MethodId::Stabilized2nd, "stabilized"},
    {MethodId::DgCgFirstOrder, "dgcg"},
    {MethodId::GaussLegendre2nd, "gauss-legendre"},
    {MethodId::GaussLobatto2nd, "gauss-lobatto"},
    {MethodId::GaussRkReference, "gauss-rk"},
    {MethodId::LobattoIIIABReference, "lobatto-3ab"},
};

// Exact integral over (0,1) of f_j g_k for polynomial integrands of degree <= 2p.
template <class Fj, class Gk>
Eigen::MatrixXd gram(int rows, int cols, int points, const Fj& f, const Gk& g) {
  const QuadratureRule rule = gauss_legendre_rule(points);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
  for (std::size_t q = 0; q < rule.size(); ++q)
    for (int k = 0; k < rows; ++k)
      for (int j = 0; j < cols; ++j) out(k, j) += rule.weights[q] * g(k, rule.nodes[q]) * f(j, rule.nodes[q]);
  return out;
}

Eigen::MatrixXd trial_table(const std::vector<double>& nodes, const std::vector<double>& pts) {
  Eigen::MatrixXd t(pts.size(), nodes.size());
  for (std::size_t q = 0; q < pts.size(); ++q)
    for (std::size_t j = 0; j < nodes.size(); ++j) t(q, j) = lagrange_eval(nodes, j, pts[q]);
  return t;
}

std::unique_ptr<Eigen::SparseLU<SpMat>> factorize(const SpMat& S, std::size_t slab) {
  auto lu = std::make_unique<Eigen::SparseLU<SpMat>>();
  lu->analyzePattern(S);
  lu->factorize(S);
  if (lu->info() != Eigen::Success) throw NumericalError("slab system factorization failed", slab);
  return lu;
}

Eigen::VectorXd stack(const Eigen::MatrixXd& cols) {
  return Eigen::Map<const Eigen::VectorXd>(cols.data(), cols.size());
}

Eigen::MatrixXd unstack(const Eigen::VectorXd& x, Eigen::Index rows) {
  return Eigen::Map<const Eigen::MatrixXd>(x.data(), rows, x.size() / rows);
}

}  // namespace

std::string to_string(MethodId m) {
  for (const auto& e : kMethodNames)
    if (e.id == m) return e.name;
  return "unknown";
}

MethodId parse_method(const std::string& name) {
  for (const auto& e : kMethodNames)
    if (name == e.name) return e.id;
  throw ConfigError("unknown method '" + name + "'");
}

const std::vector<MethodId>& all_methods() {
  static const std::vector<MethodId> ids = [] {
    std::vector<MethodId> v;
    for (const auto& e : kMethodNames) v.push_back(e.id);
    return v;
  }();
  return ids;
}

void FixedPointConfig::validate() const {
  if (!(tolerance > 0.0)) throw ConfigError("fixed-point tolerance must be positive");
  if (max_iterations < 1) throw ConfigError("fixed-point max_iterations must be at least 1");
  if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("fixed-point damping must lie in (0, 1]");
}

SlabFixedPointResult slab_fixed_point(const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& map,
                                      Eigen::MatrixXd guess, const FixedPointConfig& fp, std::size_t slab,
                                      bool linear) {
  fp.validate();
  SlabFixedPointResult r;
  if (linear) {
    r.value = map(guess);
    r.iterations = 1;
    r.last_update = (r.value - guess).cwiseAbs().maxCoeff();
    return r;
  }
  Eigen::MatrixXd x = std::move(guess);
  double update = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= fp.max_iterations; ++it) {
    Eigen::MatrixXd next = map(x);
    if (fp.damping != 1.0) next = (1.0 - fp.damping) * x + fp.damping * next;
    update = x.size() ? (next - x).cwiseAbs().maxCoeff() : 0.0;
    x = std::move(next);
    if (!std::isfinite(update) || !x.allFinite()) {
      r.value = std::move(x);
      r.iterations = it;
      r.last_update = update;
      return r;
    }
    const double scale = std::max(1.0, x.size() ? x.cwiseAbs().maxCoeff() : 0.0);
    if (update <= fp.tolerance * scale) {
      r.value = std::move(x);
      r.iterations = it;
      r.last_update = update;
      return r;
    }
  }
  throw ConvergenceError(slab, update, fp.max_iterations);
}

SpMat block_matrix(const Eigen::MatrixXd& alpha, const SpMat& M, const Eigen::MatrixXd& beta, const SpMat& K) {
  const Eigen::Index n = M.rows();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(alpha.size()) * (M.nonZeros() + K.nonZeros()));
  auto add = [&](const SpMat& A, double s, Eigen::Index r, Eigen::Index c) {
    if (s == 0.0) return;
    for (Eigen::Index col = 0; col < A.outerSize(); ++col)
      for (SpMat::InnerIterator it(A, col); it; ++it) trip.emplace_back(r * n + it.row(), c * n + it.col(), s * it.value());
  };
  for (Eigen::Index r = 0; r < alpha.rows(); ++r)
    for (Eigen::Index c = 0; c < alpha.cols(); ++c) {
      add(M, alpha(r, c), r, c);
      add(K, beta(r, c), r, c);
    }
  SpMat S(alpha.rows() * n, alpha.cols() * n);
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

SlabTables second_order_tables(MethodId method, int p) {
  if (p < 1 || p > 8) throw DomainError("temporal degree must be in [1, 8]");
  SlabTables t;
  t.degree = p;
  t.nodes = gauss_lobatto_rule(p + 1).nodes;
  const auto& nodes = t.nodes;
  auto psi = [&](int j, double tau) { return lagrange_eval(nodes, j, tau); };
  auto dpsi = [&](int j, double tau) { return lagrange_derivative(nodes, j, tau); };
  t.A = gram(p + 1, p + 1, p + 1, dpsi, dpsi);

  const QuadratureRule gl = gauss_legendre_rule(p);
  switch (method) {
    case MethodId::Stabilized2nd:
    case MethodId::GaussLegendre2nd:
      t.B = gram(p + 1, p + 1, p, psi, psi);
      break;
    case MethodId::Unstabilized:
      t.B = gram(p + 1, p + 1, p + 1, psi, psi);
      break;
    case MethodId::GaussLobatto2nd: {
      const QuadratureRule glo = gauss_lobatto_rule(p + 1);
      t.B = Eigen::MatrixXd::Zero(p + 1, p + 1);
      for (int k = 0; k <= p; ++k) t.B(k, k) = glo.weights[k];
      break;
    }
    default:
      throw DomainError("not a second-order scheme: " + to_string(method));
  }

  QuadratureRule rule;
  if (method == MethodId::GaussLegendre2nd)
    rule = gl;
  else if (method == MethodId::GaussLobatto2nd)
    rule = gauss_lobatto_rule(p + 1);
  else
    rule = gauss_legendre_rule(p + 4);
  t.qnodes = rule.nodes;
  t.trial = trial_table(nodes, rule.nodes);
  t.test.resize(p + 1, rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q)
    for (int k = 0; k <= p; ++k) {
      double v = psi(k, rule.nodes[q]);
      if (method == MethodId::Stabilized2nd) {
        // Pi psi_k is the Lagrange interpolant of psi_k at the p Gauss points.
        v = 0.0;
        for (int m = 0; m < p; ++m) v += psi(k, gl.nodes[m]) * lagrange_eval(gl.nodes, m, rule.nodes[q]);
      }
      t.test(k, q) = rule.weights[q] * v;
    }
  return t;
}

SecondOrderStepper::SecondOrderStepper(const SemiDiscreteSystem& system, MethodId method, int degree,
                                       FixedPointConfig fp)
    : sys_(&system), method_(method), p_(degree), fp_(fp), tab_(second_order_tables(method, degree)) {
  fp_.validate();
}

const Eigen::SparseLU<SpMat>& SecondOrderStepper::factor(double h, std::size_t slab) const {
  auto it = cache_.find(h);
  if (it != cache_.end()) return *it->second;
  const Eigen::MatrixXd alpha = -tab_.A.topRightCorner(p_, p_) / h;
  const Eigen::MatrixXd beta = h * tab_.B.topRightCorner(p_, p_);
  auto lu = factorize(block_matrix(alpha, sys_->M, beta, sys_->K), slab);
  return *cache_.emplace(h, std::move(lu)).first->second;
}

Eigen::MatrixXd SecondOrderStepper::nonlinear_terms(const Eigen::MatrixXd& nodes, double h) const {
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(nodes.rows(), p_ + 1);
  if (sys_->linear()) return N;
  for (Eigen::Index q = 0; q < tab_.trial.rows(); ++q) {
    const Eigen::VectorXd nq = sys_->N(nodes * tab_.trial.row(q).transpose());
    for (int k = 0; k <= p_; ++k)
      if (tab_.test(k, q) != 0.0) N.col(k) += h * tab_.test(k, q) * nq;
  }
  return N;
}

Eigen::MatrixXd SecondOrderStepper::source_terms(double t0, double h) const {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(sys_->size(), p_ + 1);
  if (!sys_->load) return f;
  for (std::size_t q = 0; q < tab_.qnodes.size(); ++q) {
    const Eigen::VectorXd fq = sys_->load(t0 + h * tab_.qnodes[q]);
    for (int k = 0; k <= p_; ++k) f.col(k) += h * tab_.test(k, q) * fq;
  }
  return f;
}

Eigen::VectorXd SecondOrderStepper::residual(const Eigen::MatrixXd& nodes, int k, double t0, double h) const {
  const Eigen::MatrixXd Mu = sys_->M * nodes;
  const Eigen::MatrixXd Ku = sys_->K * nodes;
  Eigen::VectorXd r = Eigen::VectorXd::Zero(nodes.rows());
  for (int j = 0; j <= p_; ++j) r += (-tab_.A(k, j) / h) * Mu.col(j) + (h * tab_.B(k, j)) * Ku.col(j);
  r += nonlinear_terms(nodes, h).col(k);
  r -= source_terms(t0, h).col(k);
  return r;
}

SecondOrderStepper::Step SecondOrderStepper::step(const Eigen::VectorXd& u0, const Eigen::VectorXd& q0, double t0,
                                                  double h, std::size_t slab, const Eigen::MatrixXd* seed) const {
  const Eigen::Index n = u0.size();
  const auto& lu = factor(h, slab);
  const Eigen::MatrixXd f = source_terms(t0, h);
  const Eigen::VectorXd Mu0 = sys_->M * u0;
  const Eigen::VectorXd Ku0 = sys_->K * u0;
  Eigen::MatrixXd base(n, p_);
  for (int k = 0; k < p_; ++k) {
    base.col(k) = f.col(k) - ((-tab_.A(k, 0) / h) * Mu0 + (h * tab_.B(k, 0)) * Ku0);
    if (k == 0) base.col(k) += q0;
  }
  Eigen::MatrixXd nodes(n, p_ + 1);
  nodes.col(0) = u0;
  auto map = [&](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd rhs = base;
    if (!sys_->linear()) {
      nodes.rightCols(p_) = x;
      rhs -= nonlinear_terms(nodes, h).leftCols(p_);
    }
    Eigen::VectorXd sol = lu.solve(stack(rhs));
    return unstack(sol, n);
  };
  Eigen::MatrixXd guess = seed ? *seed : Eigen::MatrixXd(u0.replicate(1, p_));
  const SlabFixedPointResult fpres = slab_fixed_point(map, std::move(guess), fp_, slab, sys_->linear());

  Step out;
  out.nodes.resize(n, p_ + 1);
  out.nodes.col(0) = u0;
  out.nodes.rightCols(p_) = fpres.value;
  out.iterations = fpres.iterations;
  out.last_update = fpres.last_update;
  out.q = -residual(out.nodes, p_, t0, h);
  return out;
}

DgCgStepper::DgCgStepper(const SemiDiscreteSystem& system, int degree, FixedPointConfig fp)
    : sys_(&system), p_(degree), fp_(fp) {
  if (degree < 1 || degree > 8) throw DomainError("temporal degree must be in [1, 8]");
  fp_.validate();
  nodes_ = gauss_lobatto_rule(p_ + 1).nodes;
  auto psi = [&](int j, double tau) { return lagrange_eval(nodes_, j, tau); };
  auto dpsi = [&](int j, double tau) { return lagrange_derivative(nodes_, j, tau); };
  auto leg = [](int k, double tau) { return legendre_reference(k, 2.0 * tau - 1.0); };
  D_ = gram(p_, p_ + 1, p_ + 1, dpsi, leg);
  C_ = gram(p_, p_ + 1, p_ + 1, psi, leg);
  const QuadratureRule rule = gauss_legendre_rule(p_ + 4);
  qnodes_ = rule.nodes;
  trial_ = trial_table(nodes_, rule.nodes);
  test_.resize(p_, rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q)
    for (int k = 0; k < p_; ++k) test_(k, q) = rule.weights[q] * leg(k, rule.nodes[q]);
}

const Eigen::SparseLU<SpMat>& DgCgStepper::factor(double h, std::size_t slab) const {
  auto it = cache_.find(h);
  if (it != cache_.end()) return *it->second;
  Eigen::MatrixXd alpha = Eigen::MatrixXd::Zero(2 * p_, 2 * p_);
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(2 * p_, 2 * p_);
  const Eigen::MatrixXd D = D_.rightCols(p_);
  const Eigen::MatrixXd C = C_.rightCols(p_);
  alpha.topLeftCorner(p_, p_) = D;
  alpha.topRightCorner(p_, p_) = -h * C;
  alpha.bottomRightCorner(p_, p_) = D;
  beta.bottomLeftCorner(p_, p_) = h * C;
  auto lu = factorize(block_matrix(alpha, sys_->M, beta, sys_->K), slab);
  return *cache_.emplace(h, std::move(lu)).first->second;
}

Eigen::MatrixXd DgCgStepper::nonlinear_terms(const Eigen::MatrixXd& u, double h) const {
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(u.rows(), p_);
  if (sys_->linear()) return N;
  for (Eigen::Index q = 0; q < trial_.rows(); ++q) {
    const Eigen::VectorXd nq = sys_->N(u * trial_.row(q).transpose());
    for (int k = 0; k < p_; ++k) N.col(k) += h * test_(k, q) * nq;
  }
  return N;
}

Eigen::MatrixXd DgCgStepper::source_terms(double t0, double h) const {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(sys_->size(), p_);
  if (!sys_->load) return f;
  for (std::size_t q = 0; q < qnodes_.size(); ++q) {
    const Eigen::VectorXd fq = sys_->load(t0 + h * qnodes_[q]);
    for (int k = 0; k < p_; ++k) f.col(k) += h * test_(k, q) * fq;
  }
  return f;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> DgCgStepper::residual(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
                                                                  double t0, double h) const {
  const Eigen::MatrixXd Mu = sys_->M * u;
  const Eigen::MatrixXd Mv = sys_->M * v;
  const Eigen::MatrixXd Ku = sys_->K * u;
  Eigen::MatrixXd r1 = Mu * D_.transpose() - h * Mv * C_.transpose();
  Eigen::MatrixXd r2 = Mv * D_.transpose() + h * Ku * C_.transpose() + nonlinear_terms(u, h) - source_terms(t0, h);
  return {r1, r2};
}

DgCgStepper::Step DgCgStepper::step(const Eigen::VectorXd& u0, const Eigen::VectorXd& v0, double t0, double h,
                                    std::size_t slab) const {
  const Eigen::Index n = u0.size();
  const auto& lu = factor(h, slab);
  const Eigen::VectorXd Mu0 = sys_->M * u0;
  const Eigen::VectorXd Mv0 = sys_->M * v0;
  const Eigen::VectorXd Ku0 = sys_->K * u0;
  const Eigen::MatrixXd f = source_terms(t0, h);
  Eigen::MatrixXd base(n, 2 * p_);
  for (int k = 0; k < p_; ++k) {
    base.col(k) = -(D_(k, 0) * Mu0 - h * C_(k, 0) * Mv0);
    base.col(p_ + k) = f.col(k) - (D_(k, 0) * Mv0 + h * C_(k, 0) * Ku0);
  }
  Eigen::MatrixXd ufull(n, p_ + 1);
  ufull.col(0) = u0;
  auto map = [&](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd rhs = base;
    if (!sys_->linear()) {
      ufull.rightCols(p_) = x.leftCols(p_);
      rhs.rightCols(p_) -= nonlinear_terms(ufull, h);
    }
    Eigen::VectorXd sol = lu.solve(stack(rhs));
    return unstack(sol, n);
  };
  Eigen::MatrixXd guess(n, 2 * p_);
  guess.leftCols(p_) = u0.replicate(1, p_);
  guess.rightCols(p_) = v0.replicate(1, p_);
  const SlabFixedPointResult fpres = slab_fixed_point(map, std::move(guess), fp_, slab, sys_->linear());

  Step out;
  out.u.resize(n, p_ + 1);
  out.v.resize(n, p_ + 1);
  out.u.col(0) = u0;
  out.v.col(0) = v0;
  out.u.rightCols(p_) = fpres.value.leftCols(p_);
  out.v.rightCols(p_) = fpres.value.rightCols(p_);
  out.iterations = fpres.iterations;
  out.last_update = fpres.last_update;
  return out;
}

}  // namespace wavest
