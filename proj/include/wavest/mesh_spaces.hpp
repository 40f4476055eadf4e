#pragma once

// Temporal and spatial meshes, the tensor-product discrete spaces, spatial
// mass/stiffness assembly and the space-time solution container.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <functional>
#include <memory>
#include <vector>

#include "wavest/polyquad.hpp"

namespace wavest {

using SpMat = Eigen::SparseMatrix<double>;
using ScalarFn = std::function<double(double)>;
using SpaceTimeFn = std::function<double(double, double)>;

class TemporalMesh {
 public:
  TemporalMesh() = default;
  TemporalMesh(std::vector<double> nodes, int degree);

  static TemporalMesh uniform(double T, int slabs, int degree);

  const std::vector<double>& nodes() const { return nodes_; }
  int degree() const { return degree_; }
  int slabs() const { return static_cast<int>(nodes_.size()) - 1; }
  double final_time() const { return nodes_.back(); }
  /// Width of slab n (0-based).
  double width(int n) const { return nodes_[n + 1] - nodes_[n]; }
  double max_width() const;
  /// dim S^{p_t}(0,T) = N_t p_t + 1.
  int dofs() const { return slabs() * degree_ + 1; }
  /// Slab containing t; nodes belong to the slab on their left except t_0.
  int locate(double t) const;

 private:
  std::vector<double> nodes_;
  int degree_ = 1;
};

TemporalMesh build_temporal_mesh(double T, int slabs, int degree);
TemporalMesh build_temporal_mesh(std::vector<double> nodes, int degree);

/// Continuous piecewise polynomials of degree p_x on an interval, zero at both ends.
/// Element basis: Lagrange at Gauss-Lobatto points. Interior DOF k has global index k+1.
class SpatialMesh1D {
 public:
  SpatialMesh1D() = default;
  SpatialMesh1D(std::vector<double> nodes, int degree);

  static SpatialMesh1D uniform(double a, double b, int elements, int degree);

  const std::vector<double>& nodes() const { return nodes_; }
  int degree() const { return degree_; }
  int elements() const { return static_cast<int>(nodes_.size()) - 1; }
  int dofs() const { return elements() * degree_ - 1; }
  double a() const { return nodes_.front(); }
  double b() const { return nodes_.back(); }
  double element_width(int e) const { return nodes_[e + 1] - nodes_[e]; }
  double max_width() const;
  /// Gauss-Lobatto points on (0,1) used as local nodes.
  const std::vector<double>& local_nodes() const { return local_nodes_; }

  /// Interior index of local node i of element e, or -1 on the boundary.
  int dof(int e, int i) const;
  /// Physical coordinate of interior DOF k.
  double coordinate(int k) const;
  std::vector<double> coordinates() const;
  int locate(double x) const;

  double evaluate(const Eigen::VectorXd& u, double x) const;
  double evaluate_gradient(const Eigen::VectorXd& u, double x) const;
  /// Nodal interpolant of f on interior DOFs.
  Eigen::VectorXd interpolate(const ScalarFn& f) const;

 private:
  std::vector<double> nodes_;
  int degree_ = 1;
  std::vector<double> local_nodes_;
};

/// Local basis values/derivatives (w.r.t. reference coordinate) at the points of a rule on (0,1).
struct ElementTable {
  QuadratureRule rule;
  Eigen::MatrixXd phi;   // (points, degree+1)
  Eigen::MatrixXd dphi;  // (points, degree+1)
};

ElementTable tabulate(const SpatialMesh1D& mesh, int points);

struct SpatialOperators {
  SpMat mass;
  SpMat stiffness;
  std::shared_ptr<const Eigen::SimplicialLLT<SpMat>> mass_solver;
  std::shared_ptr<const Eigen::SimplicialLLT<SpMat>> stiffness_solver;

  Eigen::VectorXd solve_mass(const Eigen::VectorXd& b) const { return mass_solver->solve(b); }
  Eigen::VectorXd solve_stiffness(const Eigen::VectorXd& b) const { return stiffness_solver->solve(b); }
};

/// M_ij = (phi_i, phi_j), K_ij = (c^2 phi_i', phi_j') with p_x+2 Gauss points per element.
SpatialOperators assemble_spatial(const SpatialMesh1D& mesh, const ScalarFn& c);

/// (f, phi_j) with p_x+4 Gauss points per element.
Eigen::VectorXd load_vector(const SpatialMesh1D& mesh, const ScalarFn& f);
/// (c^2 w', phi_j') with p_x+4 Gauss points per element; w' = dw supplied by the caller.
Eigen::VectorXd elliptic_load(const SpatialMesh1D& mesh, const ScalarFn& c, const ScalarFn& dw);
/// (g(u_h), phi_j); u_h given by interior coefficients.
Eigen::VectorXd nonlinear_load(const SpatialMesh1D& mesh, const Eigen::VectorXd& u, const ScalarFn& g);
/// Integral of G(u_h) over the interval.
double potential_integral(const SpatialMesh1D& mesh, const Eigen::VectorXd& u, const ScalarFn& G);
/// ||u_h - f||_{L2} and ||f||_{L2}, p_x+4 points per element.
double l2_error(const SpatialMesh1D& mesh, const Eigen::VectorXd& u, const ScalarFn& f);
double l2_norm(const SpatialMesh1D& mesh, const ScalarFn& f);
/// ||(u_h - f)'||_{L2}.
double h1_seminorm_error(const SpatialMesh1D& mesh, const Eigen::VectorXd& u, const ScalarFn& df);

enum class SpaceTag {
  Continuous,     // Q_h^{p_t}
  Postprocessed,  // Q_h^{p_t+1}
};

/// Function in S_{h_x}^{p_x} x S_{h_t}^{deg}: nodal values at the spatial DOFs and at
/// the Gauss-Lobatto nodes of each slab (shared at slab ends). Column n*deg+k is
/// local node k of slab n.
class SpaceTimeSolution {
 public:
  SpaceTimeSolution() = default;
  SpaceTimeSolution(SpatialMesh1D space, TemporalMesh time, int degree, SpaceTag tag,
                    Eigen::MatrixXd coefficients);
  /// Zero function in the space Q_h^{time.degree()}.
  static SpaceTimeSolution zeros(const SpatialMesh1D& space, const TemporalMesh& time);

  const SpatialMesh1D& space() const { return space_; }
  const TemporalMesh& time() const { return time_; }
  int degree() const { return degree_; }
  SpaceTag tag() const { return tag_; }
  const Eigen::MatrixXd& coefficients() const { return coeffs_; }
  Eigen::MatrixXd& coefficients() { return coeffs_; }
  const std::vector<double>& local_nodes() const { return local_nodes_; }

  Eigen::VectorXd node_value(int j) const { return coeffs_.col(static_cast<Eigen::Index>(j) * degree_); }
  /// Spatial coefficients at reference time tau in [0,1] of slab n.
  Eigen::VectorXd slab_value(int n, double tau) const;
  /// Time derivative inside slab n at reference time tau.
  Eigen::VectorXd slab_derivative(int n, double tau) const;
  Eigen::VectorXd at(double t) const;
  double evaluate(double x, double t) const;
  /// Nodal values at the slab's local nodes, (space dofs, degree+1).
  Eigen::MatrixXd slab_block(int n) const { return coeffs_.middleCols(static_cast<Eigen::Index>(n) * degree_, degree_ + 1); }

 private:
  SpatialMesh1D space_;
  TemporalMesh time_;
  int degree_ = 1;
  SpaceTag tag_ = SpaceTag::Continuous;
  Eigen::MatrixXd coeffs_;
  std::vector<double> local_nodes_;
};

}  // namespace wavest
