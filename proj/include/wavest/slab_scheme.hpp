#pragma once

// Slab-local realization of the space-time schemes. Each slab solves a block system
// in the p_t unknown temporal nodes; the marching state is (u, q) where u is the
// displacement at the slab start and q the momentum-like flux (q_0 = M V0h).

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wavest/semidiscrete.hpp"

namespace wavest {

enum class MethodId {
  Unstabilized,
  Stabilized2nd,
  DgCgFirstOrder,
  GaussLegendre2nd,
  GaussLobatto2nd,
  GaussRkReference,
  LobattoIIIABReference,
};

std::string to_string(MethodId m);
MethodId parse_method(const std::string& name);
const std::vector<MethodId>& all_methods();

struct FixedPointConfig {
  double tolerance = 1e-12;
  int max_iterations = 100;
  double damping = 1.0;

  void validate() const;
};

struct SlabFixedPointResult {
  Eigen::MatrixXd value;
  int iterations = 0;
  double last_update = 0.0;
};

/// Iterate x <- (1 - damping) x + damping map(x) until the sup-norm update is at most
/// tolerance * max(1, |x|_inf). For linear maps one application is exact.
SlabFixedPointResult slab_fixed_point(const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& map,
                                      Eigen::MatrixXd guess, const FixedPointConfig& fp, std::size_t slab,
                                      bool linear = false);

/// Temporal data of one slab on the reference interval (0,1).
struct SlabTables {
  int degree = 1;
  std::vector<double> nodes;  // Gauss-Lobatto, the trial nodes
  Eigen::MatrixXd A;          // int psi_j' psi_k'  (to be divided by h)
  Eigen::MatrixXd B;          // quadrature of psi_j psi_k in the grad-grad term (times h)
  std::vector<double> qnodes; // quadrature for nonlinear / source terms
  Eigen::MatrixXd trial;      // psi_j(qnodes[q]), (nq, p+1)
  Eigen::MatrixXd test;       // w_q * test_k(qnodes[q]), (p+1 or p, nq)
};

/// Tables of the second-order schemes (Unstabilized, Stabilized2nd, GaussLegendre2nd,
/// GaussLobatto2nd).
SlabTables second_order_tables(MethodId method, int degree);

/// Marching for the second-order schemes. Not safe for concurrent use of one instance.
class SecondOrderStepper {
 public:
  SecondOrderStepper(const SemiDiscreteSystem& system, MethodId method, int degree, FixedPointConfig fp = {});

  struct Step {
    Eigen::MatrixXd nodes;  // (n, p+1), column 0 is the left value
    Eigen::VectorXd q;      // flux at the slab end
    int iterations = 0;
    double last_update = 0.0;
  };

  Step step(const Eigen::VectorXd& u0, const Eigen::VectorXd& q0, double t0, double h,
            std::size_t slab = 0, const Eigen::MatrixXd* seed = nullptr) const;

  /// Residual vector of slab test function k given full nodal values (n, p+1).
  Eigen::VectorXd residual(const Eigen::MatrixXd& nodes, int k, double t0, double h) const;

  MethodId method() const { return method_; }
  int degree() const { return p_; }
  const SlabTables& tables() const { return tab_; }

 private:
  const Eigen::SparseLU<SpMat>& factor(double h, std::size_t slab) const;
  Eigen::MatrixXd nonlinear_terms(const Eigen::MatrixXd& nodes, double h) const;
  Eigen::MatrixXd source_terms(double t0, double h) const;

  const SemiDiscreteSystem* sys_;
  MethodId method_;
  int p_;
  FixedPointConfig fp_;
  SlabTables tab_;
  mutable std::map<double, std::unique_ptr<Eigen::SparseLU<SpMat>>> cache_;
};

/// Marching for the first-order DG-CG scheme with continuous (U, V). State (u, v).
class DgCgStepper {
 public:
  DgCgStepper(const SemiDiscreteSystem& system, int degree, FixedPointConfig fp = {});

  struct Step {
    Eigen::MatrixXd u;  // (n, p+1)
    Eigen::MatrixXd v;  // (n, p+1)
    int iterations = 0;
    double last_update = 0.0;
  };

  Step step(const Eigen::VectorXd& u0, const Eigen::VectorXd& v0, double t0, double h, std::size_t slab = 0) const;

  /// Residuals of both equations against L_k, k < p.
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> residual(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
                                                       double t0, double h) const;

 private:
  const Eigen::SparseLU<SpMat>& factor(double h, std::size_t slab) const;
  Eigen::MatrixXd nonlinear_terms(const Eigen::MatrixXd& u, double h) const;
  Eigen::MatrixXd source_terms(double t0, double h) const;

  const SemiDiscreteSystem* sys_;
  int p_;
  FixedPointConfig fp_;
  std::vector<double> nodes_;
  Eigen::MatrixXd D_;  // int psi_j' L_k
  Eigen::MatrixXd C_;  // int psi_j L_k (times h)
  std::vector<double> qnodes_;
  Eigen::MatrixXd trial_;
  Eigen::MatrixXd test_;
  mutable std::map<double, std::unique_ptr<Eigen::SparseLU<SpMat>>> cache_;
};

/// Sparse matrix with blocks alpha(r,c) M + beta(r,c) K.
SpMat block_matrix(const Eigen::MatrixXd& alpha, const SpMat& M, const Eigen::MatrixXd& beta, const SpMat& K);

}  // namespace wavest
