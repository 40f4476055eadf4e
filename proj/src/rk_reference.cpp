#include "wavest/rk_reference.hpp"

#include <cmath>
#include <limits>

#include "wavest/errors.hpp"
#include "wavest/polyquad.hpp"

namespace wavest {
namespace {

// int_0^x of the j-th Lagrange polynomial on `nodes`, exact for degree < nodes.size().
double lagrange_integral(const std::vector<double>& nodes, std::size_t j, double x) {
  if (x == 0.0) return 0.0;
  const QuadratureRule r = gauss_legendre_rule(static_cast<int>(nodes.size()), Interval{0.0, x});
  double s = 0.0;
  for (std::size_t q = 0; q < r.size(); ++q) s += r.weights[q] * lagrange_eval(nodes, j, r.nodes[q]);
  return s;
}

// int_0^tau P_r(2 s - 1) ds.
double legendre_integral(int r, double tau) {
  const double xi = 2.0 * tau - 1.0;
  if (r == 0) return tau;
  return 0.5 * (legendre_reference(r + 1, xi) - legendre_reference(r - 1, xi)) / (2.0 * r + 1.0);
}

Eigen::VectorXd stack(const Eigen::MatrixXd& cols) { return Eigen::Map<const Eigen::VectorXd>(cols.data(), cols.size()); }

Eigen::MatrixXd unstack(const Eigen::VectorXd& x, Eigen::Index rows) {
  return Eigen::Map<const Eigen::MatrixXd>(x.data(), rows, x.size() / rows);
}

const Eigen::SparseLU<SpMat>& cached_factor(std::map<double, std::unique_ptr<Eigen::SparseLU<SpMat>>>& cache,
                                            double h, const std::function<SpMat()>& build) {
  auto it = cache.find(h);
  if (it != cache.end()) return *it->second;
  auto lu = std::make_unique<Eigen::SparseLU<SpMat>>();
  const SpMat S = build();
  lu->analyzePattern(S);
  lu->factorize(S);
  if (lu->info() != Eigen::Success) throw NumericalError("stage system factorization failed", 0);
  return *cache.emplace(h, std::move(lu)).first->second;
}

}  // namespace

Eigen::MatrixXd gauss_butcher_matrix(int s) {
  const QuadratureRule gl = gauss_legendre_rule(s);
  Eigen::MatrixXd A(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) A(i, j) = lagrange_integral(gl.nodes, j, gl.nodes[i]);
  return A;
}

Eigen::VectorXd gauss_collocation_step(const OdeRhs& f, const Eigen::VectorXd& y, double t, double h, int s,
                                       const FixedPointConfig& fp, const OdeJacobian& jac) {
  if (s < 1) throw DomainError("Gauss method needs at least one stage");
  if (!(h > 0.0)) throw DomainError("step size must be positive");
  fp.validate();
  const QuadratureRule gl = gauss_legendre_rule(s);
  const Eigen::MatrixXd A = gauss_butcher_matrix(s);
  const Eigen::Index d = y.size();
  Eigen::MatrixXd K = f(t, y).replicate(1, s);
  auto stage = [&](const Eigen::MatrixXd& k, int i) { return Eigen::VectorXd(y + h * k * A.row(i).transpose()); };
  double update = std::numeric_limits<double>::infinity();
  for (int it = 0; it < fp.max_iterations; ++it) {
    Eigen::MatrixXd next(d, s);
    if (jac) {
      Eigen::MatrixXd R(d, s);
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d * s, d * s);
      for (int i = 0; i < s; ++i) {
        const Eigen::VectorXd Yi = stage(K, i);
        const double ti = t + gl.nodes[i] * h;
        R.col(i) = K.col(i) - f(ti, Yi);
        const Eigen::MatrixXd Ji = jac(ti, Yi);
        for (int j = 0; j < s; ++j) {
          J.block(i * d, j * d, d, d) = -h * A(i, j) * Ji;
          if (i == j) J.block(i * d, j * d, d, d) += Eigen::MatrixXd::Identity(d, d);
        }
      }
      const Eigen::VectorXd dk = J.partialPivLu().solve(stack(R));
      next = K - unstack(dk, d);
    } else {
      for (int i = 0; i < s; ++i) next.col(i) = f(t + gl.nodes[i] * h, stage(K, i));
    }
    update = (next - K).cwiseAbs().maxCoeff();
    K = std::move(next);
    if (update <= fp.tolerance * std::max(1.0, K.cwiseAbs().maxCoeff())) break;
    if (it + 1 == fp.max_iterations) throw ConvergenceError(0, update, fp.max_iterations);
  }
  Eigen::VectorXd out = y;
  for (int i = 0; i < s; ++i) out += h * gl.weights[i] * K.col(i);
  return out;
}

GaussRkIntegrator::GaussRkIntegrator(const SemiDiscreteSystem& system, int stages, FixedPointConfig fp)
    : sys_(&system), s_(stages), fp_(fp) {
  if (stages < 1 || stages > 8) throw DomainError("Gauss stages must be in [1, 8]");
  fp_.validate();
  const QuadratureRule gl = gauss_legendre_rule(s_);
  c_ = gl.nodes;
  b_ = gl.weights;
  A_ = gauss_butcher_matrix(s_);
  const auto lob = gauss_lobatto_rule(s_ + 1).nodes;
  slab_weights_.resize(s_ + 1, s_);
  for (int k = 0; k <= s_; ++k)
    for (int j = 0; j < s_; ++j) slab_weights_(k, j) = lagrange_integral(c_, j, lob[k]);
}

RkStep GaussRkIntegrator::step(const OdeState& state, double t, double h) const {
  const Eigen::Index n = state.u.size();
  const SemiDiscreteSystem& sys = *sys_;
  const auto& lu = cached_factor(cache_, h, [&] {
    return block_matrix(Eigen::MatrixXd::Identity(s_, s_), sys.M, h * h * A_ * A_, sys.K);
  });
  const Eigen::VectorXd Mv = sys.M * state.v;
  const Eigen::VectorXd Ku = sys.K * state.u;
  std::vector<Eigen::VectorXd> F(s_);
  for (int j = 0; j < s_; ++j) F[j] = sys.F(t + c_[j] * h) - Ku;
  auto stages_u = [&](const Eigen::MatrixXd& V) {
    Eigen::MatrixXd U(n, s_);
    for (int j = 0; j < s_; ++j) U.col(j) = state.u + h * V * A_.row(j).transpose();
    return U;
  };
  auto map = [&](const Eigen::MatrixXd& V) {
    Eigen::MatrixXd G(n, s_);
    const Eigen::MatrixXd U = stages_u(V);
    for (int l = 0; l < s_; ++l) G.col(l) = F[l] - (sys.linear() ? Eigen::VectorXd::Zero(n) : sys.N(U.col(l)));
    Eigen::MatrixXd rhs(n, s_);
    for (int j = 0; j < s_; ++j) rhs.col(j) = Mv + h * G * A_.row(j).transpose();
    return unstack(lu.solve(stack(rhs)), n);
  };
  const SlabFixedPointResult r = slab_fixed_point(map, state.v.replicate(1, s_), fp_, 0, sys.linear());
  const Eigen::MatrixXd& V = r.value;
  const Eigen::MatrixXd U = stages_u(V);
  RkStep out;
  out.iterations = r.iterations;
  out.next.u = state.u;
  Eigen::VectorXd dq = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < s_; ++j) {
    out.next.u += h * b_[j] * V.col(j);
    Eigen::VectorXd g = sys.F(t + c_[j] * h) - sys.K * U.col(j);
    if (!sys.linear()) g -= sys.N(U.col(j));
    dq += h * b_[j] * g;
  }
  out.next.v = state.v + sys.solve_mass(dq);
  out.slab.resize(n, s_ + 1);
  for (int k = 0; k <= s_; ++k) out.slab.col(k) = state.u + h * V * slab_weights_.row(k).transpose();
  out.slab.col(0) = state.u;
  out.slab.col(s_) = out.next.u;
  return out;
}

LobattoIIIABIntegrator::LobattoIIIABIntegrator(const SemiDiscreteSystem& system, int stages, FixedPointConfig fp)
    : sys_(&system), s_(stages), fp_(fp) {
  if (stages < 2 || stages > 9) throw DomainError("Lobatto IIIA/IIIB needs 2 to 9 stages");
  fp_.validate();
  const QuadratureRule lob = gauss_lobatto_rule(s_);
  c_ = lob.nodes;
  w_ = lob.weights;
}

RkStep LobattoIIIABIntegrator::step(const OdeState& state, double t, double h) const {
  const SemiDiscreteSystem& sys = *sys_;
  const Eigen::Index n = state.u.size();
  const int m = s_ - 1;  // number of Legendre coefficients of z
  const double w0 = w_.front();
  const double wl = w_.back();
  const auto& lu = cached_factor(cache_, h, [&] {
    Eigen::MatrixXd alpha(m, m);
    Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(m, m);
    for (int r = 0; r < m; ++r) {
      alpha(0, r) = legendre_reference(r, -1.0) + 2.0 * w0 * legendre_reference_derivative(r, -1.0);
      for (int i = 1; i < m; ++i) {
        alpha(i, r) = 2.0 * legendre_reference_derivative(r, 2.0 * c_[i] - 1.0);
        beta(i, r) = h * h * legendre_integral(r, c_[i]);
      }
    }
    return block_matrix(alpha, sys.M, beta, sys.K);
  });
  const Eigen::VectorXd Ky = sys.K * state.u;
  Eigen::MatrixXd base(n, m);
  base.col(0) = sys.M * state.v + h * w0 * sys.force(state.u, t);
  for (int i = 1; i < m; ++i) base.col(i) = h * (sys.F(t + c_[i] * h) - Ky);
  auto u_at = [&](const Eigen::MatrixXd& beta, double tau) {
    Eigen::VectorXd u = state.u;
    for (int r = 0; r < m; ++r) u += h * legendre_integral(r, tau) * beta.col(r);
    return u;
  };
  auto map = [&](const Eigen::MatrixXd& beta) {
    Eigen::MatrixXd rhs = base;
    if (!sys.linear())
      for (int i = 1; i < m; ++i) rhs.col(i) -= h * sys.N(u_at(beta, c_[i]));
    return unstack(lu.solve(stack(rhs)), n);
  };
  const SlabFixedPointResult r = slab_fixed_point(map, state.v.replicate(1, m), fp_, 0, sys.linear() || m == 1);
  const Eigen::MatrixXd& beta = r.value;
  RkStep out;
  out.iterations = r.iterations;
  out.next.u = u_at(beta, 1.0);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
  for (int rr = 0; rr < m; ++rr) z += (1.0 - 2.0 * wl * legendre_reference_derivative(rr, 1.0)) * beta.col(rr);
  out.next.v = z + h * wl * sys.solve_mass(sys.force(out.next.u, t + h));
  out.slab.resize(n, s_);
  for (int k = 0; k < s_; ++k) out.slab.col(k) = u_at(beta, c_[k]);
  out.slab.col(0) = state.u;
  out.slab.col(s_ - 1) = out.next.u;
  return out;
}

RkStep gauss_rk_step(const SemiDiscreteSystem& system, const OdeState& state, double t, double h, int s,
                     const FixedPointConfig& fp) {
  if (!(h > 0.0)) throw DomainError("step size must be positive");
  return GaussRkIntegrator(system, s, fp).step(state, t, h);
}

RkStep lobatto_3ab_step(const SemiDiscreteSystem& system, const OdeState& state, double t, double h, int s,
                        const FixedPointConfig& fp) {
  if (!(h > 0.0)) throw DomainError("step size must be positive");
  return LobattoIIIABIntegrator(system, s, fp).step(state, t, h);
}

namespace {

template <class Integrator>
Trajectory integrate(const Integrator& integ, const OdeState& init, const std::vector<double>& times, int slab_deg) {
  if (times.size() < 2) throw DomainError("integration needs at least two time points");
  const Eigen::Index n = init.u.size();
  const int steps = static_cast<int>(times.size()) - 1;
  Trajectory tr;
  tr.u.resize(n, steps + 1);
  tr.v.resize(n, steps + 1);
  tr.slab.resize(n, static_cast<Eigen::Index>(steps) * slab_deg + 1);
  tr.u.col(0) = init.u;
  tr.v.col(0) = init.v;
  tr.slab.col(0) = init.u;
  OdeState st = init;
  for (int k = 0; k < steps; ++k) {
    const RkStep r = integ.step(st, times[k], times[k + 1] - times[k]);
    st = r.next;
    tr.u.col(k + 1) = st.u;
    tr.v.col(k + 1) = st.v;
    tr.slab.middleCols(static_cast<Eigen::Index>(k) * slab_deg, slab_deg + 1) = r.slab;
    tr.iterations.push_back(r.iterations);
  }
  return tr;
}

}  // namespace

Trajectory integrate_gauss_rk(const SemiDiscreteSystem& system, const OdeState& init,
                              const std::vector<double>& times, int s, const FixedPointConfig& fp) {
  return integrate(GaussRkIntegrator(system, s, fp), init, times, s);
}

Trajectory integrate_lobatto_3ab(const SemiDiscreteSystem& system, const OdeState& init,
                                 const std::vector<double>& times, int s, const FixedPointConfig& fp) {
  return integrate(LobattoIIIABIntegrator(system, s, fp), init, times, s - 1);
}

double symplectic_residual(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& step, int dim,
                           double fd_step, const Eigen::VectorXd& base) {
  if (dim <= 0 || dim % 2 != 0) throw DomainError("symplectic_residual needs an even state dimension");
  const int n = dim / 2;
  Eigen::MatrixXd J(dim, dim);
  if (fd_step == 0.0) {
    for (int k = 0; k < dim; ++k) J.col(k) = step(Eigen::VectorXd::Unit(dim, k));
  } else {
    const Eigen::VectorXd x0 = base.size() == dim ? base : Eigen::VectorXd::Zero(dim);
    for (int k = 0; k < dim; ++k) {
      const Eigen::VectorXd e = fd_step * Eigen::VectorXd::Unit(dim, k);
      J.col(k) = (step(x0 + e) - step(x0 - e)) / (2.0 * fd_step);
    }
  }
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(dim, dim);
  S.topRightCorner(n, n).setIdentity();
  S.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd D = J.transpose() * S * J - S;
  return D.cwiseAbs().rowwise().sum().maxCoeff();
}

double hamiltonian(const SemiDiscreteSystem& system, const OdeState& state, double t) {
  double H = 0.5 * (state.v.dot(system.M * state.v) + state.u.dot(system.K * state.u));
  if (system.potential) H += system.potential(state.u);
  if (system.load) H += system.load(t).dot(state.u);
  return H;
}

}  // namespace wavest
