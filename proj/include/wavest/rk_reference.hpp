#pragma once

// Gauss-Legendre collocation and Lobatto IIIA/IIIB (discontinuous collocation)
// integrators for the semi-discrete system, plus symplecticity and Hamiltonian checks.

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "wavest/semidiscrete.hpp"
#include "wavest/slab_scheme.hpp"

namespace wavest {

struct OdeState {
  Eigen::VectorXd u;
  Eigen::VectorXd v;
};

/// Butcher matrix a_ij = int_0^{c_i} l_j of the s-stage Gauss method.
Eigen::MatrixXd gauss_butcher_matrix(int s);

using OdeRhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
using OdeJacobian = std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)>;

/// One s-stage Gauss collocation step for y' = f(t, y). Newton on the stage equations
/// when a Jacobian is supplied, fixed-point iteration otherwise.
Eigen::VectorXd gauss_collocation_step(const OdeRhs& f, const Eigen::VectorXd& y, double t, double h, int s,
                                       const FixedPointConfig& fp = {}, const OdeJacobian& jac = {});

struct RkStep {
  OdeState next;
  Eigen::MatrixXd slab;  // displacement polynomial at the Gauss-Lobatto nodes of its degree
  int iterations = 0;
};

/// s-stage Gauss method on u' = v, M v' = F(t) - K u - N(u).
class GaussRkIntegrator {
 public:
  GaussRkIntegrator(const SemiDiscreteSystem& system, int stages, FixedPointConfig fp = {});
  RkStep step(const OdeState& state, double t, double h) const;
  int stages() const { return s_; }

 private:
  const SemiDiscreteSystem* sys_;
  int s_;
  FixedPointConfig fp_;
  Eigen::MatrixXd A_;
  std::vector<double> b_;
  std::vector<double> c_;
  Eigen::MatrixXd slab_weights_;  // int_0^{tau_k} l_j at the s+1 Lobatto nodes
  mutable std::map<double, std::unique_ptr<Eigen::SparseLU<SpMat>>> cache_;
};

/// Lobatto IIIA/IIIB pair with s >= 2 stages in discontinuous collocation form for
/// y' = z, M z' = F(t) - K y - N(y). The y polynomial has degree s-1 and z degree s-2.
class LobattoIIIABIntegrator {
 public:
  LobattoIIIABIntegrator(const SemiDiscreteSystem& system, int stages, FixedPointConfig fp = {});
  RkStep step(const OdeState& state, double t, double h) const;
  int stages() const { return s_; }

 private:
  const SemiDiscreteSystem* sys_;
  int s_;
  FixedPointConfig fp_;
  std::vector<double> c_;
  std::vector<double> w_;
  mutable std::map<double, std::unique_ptr<Eigen::SparseLU<SpMat>>> cache_;
};

RkStep gauss_rk_step(const SemiDiscreteSystem& system, const OdeState& state, double t, double h, int s,
                     const FixedPointConfig& fp = {});
RkStep lobatto_3ab_step(const SemiDiscreteSystem& system, const OdeState& state, double t, double h, int s,
                        const FixedPointConfig& fp = {});

struct Trajectory {
  Eigen::MatrixXd u;     // (n, N+1) nodal
  Eigen::MatrixXd v;     // (n, N+1) nodal
  Eigen::MatrixXd slab;  // displacement at the Lobatto nodes of each step, shared ends
  std::vector<int> iterations;
};

Trajectory integrate_gauss_rk(const SemiDiscreteSystem& system, const OdeState& init,
                              const std::vector<double>& times, int s, const FixedPointConfig& fp = {});
Trajectory integrate_lobatto_3ab(const SemiDiscreteSystem& system, const OdeState& init,
                                 const std::vector<double>& times, int s, const FixedPointConfig& fp = {});

/// || J^T S J - S ||_inf for the one-step map on the canonical state (q, p) of size 2n,
/// S = [[0, I], [-I, 0]]. fd_step = 0 builds J column by column from unit states
/// (exact for linear maps); otherwise central differences about base.
double symplectic_residual(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& step, int dim,
                           double fd_step = 0.0, const Eigen::VectorXd& base = {});

/// 1/2 (v^T M v + u^T K u) + int G(u_h) + (F(t), u_h).
double hamiltonian(const SemiDiscreteSystem& system, const OdeState& state, double t);

}  // namespace wavest
