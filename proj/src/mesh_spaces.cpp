#include "wavest/mesh_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wavest/errors.hpp"

namespace wavest {
namespace {

void check_increasing(const std::vector<double>& nodes, const char* what) {
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1]))
      throw DomainError(std::string(what) + " nodes must be strictly increasing");
}

std::vector<double> lobatto_nodes(int degree) { return gauss_lobatto_rule(degree + 1).nodes; }

// Value of the element-local expansion at table row q.
template <class Row>
double local_value(const SpatialMesh1D& mesh, const Eigen::VectorXd& u, int e, const Row& row) {
  double s = 0.0;
  const int p = mesh.degree();
  for (int i = 0; i <= p; ++i) {
    const int k = mesh.dof(e, i);
    if (k >= 0) s += row(i) * u[k];
  }
  return s;
}

}  // namespace

TemporalMesh::TemporalMesh(std::vector<double> nodes, int degree)
    : nodes_(std::move(nodes)), degree_(degree) {
  if (nodes_.size() < 2) throw DomainError("temporal mesh needs at least one slab");
  if (nodes_.front() != 0.0) throw DomainError("temporal mesh must start at t = 0");
  check_increasing(nodes_, "temporal mesh");
  if (degree < 1 || degree > 8) throw DomainError("temporal degree must be in [1, 8]");
}

TemporalMesh TemporalMesh::uniform(double T, int slabs, int degree) {
  if (!(T > 0.0)) throw DomainError("final time must be positive");
  if (slabs < 1) throw DomainError("temporal mesh needs at least one slab");
  std::vector<double> nodes(slabs + 1);
  for (int n = 0; n <= slabs; ++n) nodes[n] = T * n / slabs;
  nodes.back() = T;
  return TemporalMesh(std::move(nodes), degree);
}

double TemporalMesh::max_width() const {
  double h = 0.0;
  for (int n = 0; n < slabs(); ++n) h = std::max(h, width(n));
  return h;
}

int TemporalMesh::locate(double t) const {
  if (t < nodes_.front() || t > nodes_.back()) throw DomainError("time outside the temporal mesh");
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t);
  int n = static_cast<int>(it - nodes_.begin()) - 1;
  return std::clamp(n, 0, slabs() - 1);
}

TemporalMesh build_temporal_mesh(double T, int slabs, int degree) {
  return TemporalMesh::uniform(T, slabs, degree);
}

TemporalMesh build_temporal_mesh(std::vector<double> nodes, int degree) {
  if (nodes.empty()) throw DomainError("empty temporal node list");
  return TemporalMesh(std::move(nodes), degree);
}

SpatialMesh1D::SpatialMesh1D(std::vector<double> nodes, int degree)
    : nodes_(std::move(nodes)), degree_(degree) {
  if (nodes_.size() < 2) throw DomainError("spatial mesh needs at least one element");
  check_increasing(nodes_, "spatial mesh");
  if (degree < 1 || degree > 8) throw DomainError("spatial degree must be in [1, 8]");
  if (dofs() < 1) throw DomainError("spatial mesh has no interior degrees of freedom");
  local_nodes_ = lobatto_nodes(degree);
}

SpatialMesh1D SpatialMesh1D::uniform(double a, double b, int elements, int degree) {
  if (!(b > a)) throw DomainError("spatial interval must satisfy a < b");
  if (elements < 1) throw DomainError("spatial mesh needs at least one element");
  std::vector<double> nodes(elements + 1);
  for (int e = 0; e <= elements; ++e) nodes[e] = a + (b - a) * e / elements;
  nodes.back() = b;
  return SpatialMesh1D(std::move(nodes), degree);
}

double SpatialMesh1D::max_width() const {
  double h = 0.0;
  for (int e = 0; e < elements(); ++e) h = std::max(h, element_width(e));
  return h;
}

int SpatialMesh1D::dof(int e, int i) const {
  const int g = e * degree_ + i;
  if (g == 0 || g == elements() * degree_) return -1;
  return g - 1;
}

double SpatialMesh1D::coordinate(int k) const {
  const int g = k + 1;
  const int e = std::min(g / degree_, elements() - 1);
  const int i = g - e * degree_;
  return nodes_[e] + local_nodes_[i] * element_width(e);
}

std::vector<double> SpatialMesh1D::coordinates() const {
  std::vector<double> x(dofs());
  for (int k = 0; k < dofs(); ++k) x[k] = coordinate(k);
  return x;
}

int SpatialMesh1D::locate(double x) const {
  if (x < a() || x > b()) throw DomainError("point outside the spatial mesh");
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  int e = static_cast<int>(it - nodes_.begin()) - 1;
  return std::clamp(e, 0, elements() - 1);
}

double SpatialMesh1D::evaluate(const Eigen::VectorXd& u, double x) const {
  const int e = locate(x);
  const double xi = (x - nodes_[e]) / element_width(e);
  return local_value(*this, u, e, [&](int i) { return lagrange_eval(local_nodes_, i, xi); });
}

double SpatialMesh1D::evaluate_gradient(const Eigen::VectorXd& u, double x) const {
  const int e = locate(x);
  const double h = element_width(e);
  const double xi = (x - nodes_[e]) / h;
  return local_value(*this, u, e, [&](int i) { return lagrange_derivative(local_nodes_, i, xi); }) / h;
}

Eigen::VectorXd SpatialMesh1D::interpolate(const ScalarFn& f) const {
  Eigen::VectorXd u(dofs());
  for (int k = 0; k < dofs(); ++k) u[k] = f(coordinate(k));
  return u;
}

ElementTable tabulate(const SpatialMesh1D& mesh, int points) {
  ElementTable t;
  t.rule = gauss_legendre_rule(points);
  const int p = mesh.degree();
  t.phi.resize(points, p + 1);
  t.dphi.resize(points, p + 1);
  for (int q = 0; q < points; ++q)
    for (int i = 0; i <= p; ++i) {
      t.phi(q, i) = lagrange_eval(mesh.local_nodes(), i, t.rule.nodes[q]);
      t.dphi(q, i) = lagrange_derivative(mesh.local_nodes(), i, t.rule.nodes[q]);
    }
  return t;
}

SpatialOperators assemble_spatial(const SpatialMesh1D& mesh, const ScalarFn& c) {
  const int p = mesh.degree();
  const int n = mesh.dofs();
  const ElementTable tab = tabulate(mesh, p + 2);
  std::vector<Eigen::Triplet<double>> mt;
  std::vector<Eigen::Triplet<double>> kt;
  mt.reserve(static_cast<std::size_t>(mesh.elements()) * (p + 1) * (p + 1));
  kt.reserve(mt.capacity());
  Eigen::MatrixXd me(p + 1, p + 1);
  Eigen::MatrixXd ke(p + 1, p + 1);
  for (int e = 0; e < mesh.elements(); ++e) {
    const double h = mesh.element_width(e);
    me.setZero();
    ke.setZero();
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const double x = mesh.nodes()[e] + h * tab.rule.nodes[q];
      const double cx = c(x);
      if (!(cx > 0.0)) throw DataError("wave speed must be positive, got " + std::to_string(cx) +
                                       " at x = " + std::to_string(x));
      const double w = tab.rule.weights[q];
      for (int i = 0; i <= p; ++i)
        for (int j = 0; j <= p; ++j) {
          me(i, j) += w * h * tab.phi(q, i) * tab.phi(q, j);
          ke(i, j) += w * cx * cx * tab.dphi(q, i) * tab.dphi(q, j) / h;
        }
    }
    for (int i = 0; i <= p; ++i) {
      const int gi = mesh.dof(e, i);
      if (gi < 0) continue;
      for (int j = 0; j <= p; ++j) {
        const int gj = mesh.dof(e, j);
        if (gj < 0) continue;
        mt.emplace_back(gi, gj, me(i, j));
        kt.emplace_back(gi, gj, ke(i, j));
      }
    }
  }
  SpatialOperators ops;
  ops.mass.resize(n, n);
  ops.stiffness.resize(n, n);
  ops.mass.setFromTriplets(mt.begin(), mt.end());
  ops.stiffness.setFromTriplets(kt.begin(), kt.end());
  auto ms = std::make_shared<Eigen::SimplicialLLT<SpMat>>(ops.mass);
  if (ms->info() != Eigen::Success) throw NumericalError("mass matrix Cholesky failed", 0);
  auto ks = std::make_shared<Eigen::SimplicialLLT<SpMat>>(ops.stiffness);
  if (ks->info() != Eigen::Success) throw NumericalError("stiffness matrix Cholesky failed", 0);
  ops.mass_solver = std::move(ms);
  ops.stiffness_solver = std::move(ks);
  return ops;
}

Eigen::VectorXd load_vector(const SpatialMesh1D& mesh, const ScalarFn& f) {
  const int p = mesh.degree();
  const ElementTable tab = tabulate(mesh, p + 4);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.dofs());
  for (int e = 0; e < mesh.elements(); ++e) {
    const double h = mesh.element_width(e);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const double fx = f(mesh.nodes()[e] + h * tab.rule.nodes[q]) * tab.rule.weights[q] * h;
      for (int i = 0; i <= p; ++i) {
        const int k = mesh.dof(e, i);
        if (k >= 0) b[k] += fx * tab.phi(q, i);
      }
    }
  }
  return b;
}

Eigen::VectorXd elliptic_load(const SpatialMesh1D& mesh, const ScalarFn& c, const ScalarFn& dw) {
  const int p = mesh.degree();
  const ElementTable tab = tabulate(mesh, p + 4);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.dofs());
  for (int e = 0; e < mesh.elements(); ++e) {
    const double h = mesh.element_width(e);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const double x = mesh.nodes()[e] + h * tab.rule.nodes[q];
      const double cx = c(x);
      const double fx = cx * cx * dw(x) * tab.rule.weights[q];
      for (int i = 0; i <= p; ++i) {
        const int k = mesh.dof(e, i);
        if (k >= 0) b[k] += fx * tab.dphi(q, i);
      }
    }
  }
  return b;
}

Eigen::VectorXd nonlinear_load(const SpatialMesh1D& mesh, const Eigen::VectorXd& u, const ScalarFn& g) {
  const int p = mesh.degree();
  const ElementTable tab = tabulate(mesh, p + 4);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(mesh.dofs());
  for (int e = 0; e < mesh.elements(); ++e) {
    const double h = mesh.element_width(e);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const double uq = local_value(mesh, u, e, [&](int i) { return tab.phi(q, i); });
      const double gx = g(uq) * tab.rule.weights[q] * h;
      for (int i = 0; i <= p; ++i) {
        const int k = mesh.dof(e, i);
        if (k >= 0) b[k] += gx * tab.phi(q, i);
      }
    }
  }
  return b;
}

double potential_integral(const SpatialMesh1D& mesh, const Eigen::VectorXd& u, const ScalarFn& G) {
  const int p = mesh.degree();
  const ElementTable tab = tabulate(mesh, p + 4);
  double s = 0.0;
  for (int e = 0; e < mesh.elements(); ++e) {
    const double h = mesh.element_width(e);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const double uq = local_value(mesh, u, e, [&](int i) { return tab.phi(q, i); });
      s += G(uq) * tab.rule.weights[q] * h;
    }
  }
  return s;
}

double l2_error(const SpatialMesh1D& mesh, const Eigen::VectorXd& u, const ScalarFn& f) {
  const int p = mesh.degree();
  const ElementTable tab = tabulate(mesh, p + 4);
  double s = 0.0;
  for (int e = 0; e < mesh.elements(); ++e) {
    const double h = mesh.element_width(e);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const double x = mesh.nodes()[e] + h * tab.rule.nodes[q];
      const double d = local_value(mesh, u, e, [&](int i) { return tab.phi(q, i); }) - (f ? f(x) : 0.0);
      s += d * d * tab.rule.weights[q] * h;
    }
  }
  return std::sqrt(s);
}

double l2_norm(const SpatialMesh1D& mesh, const ScalarFn& f) {
  return l2_error(mesh, Eigen::VectorXd::Zero(mesh.dofs()), f);
}

double h1_seminorm_error(const SpatialMesh1D& mesh, const Eigen::VectorXd& u, const ScalarFn& df) {
  const int p = mesh.degree();
  const ElementTable tab = tabulate(mesh, p + 4);
  double s = 0.0;
  for (int e = 0; e < mesh.elements(); ++e) {
    const double h = mesh.element_width(e);
    for (std::size_t q = 0; q < tab.rule.size(); ++q) {
      const double x = mesh.nodes()[e] + h * tab.rule.nodes[q];
      const double d = local_value(mesh, u, e, [&](int i) { return tab.dphi(q, i); }) / h - (df ? df(x) : 0.0);
      s += d * d * tab.rule.weights[q] * h;
    }
  }
  return std::sqrt(s);
}

SpaceTimeSolution::SpaceTimeSolution(SpatialMesh1D space, TemporalMesh time, int degree, SpaceTag tag,
                                     Eigen::MatrixXd coefficients)
    : space_(std::move(space)),
      time_(std::move(time)),
      degree_(degree),
      tag_(tag),
      coeffs_(std::move(coefficients)) {
  if (degree < 1) throw DomainError("space-time degree must be at least 1");
  if ((tag == SpaceTag::Continuous && degree != time_.degree()) ||
      (tag == SpaceTag::Postprocessed && degree != time_.degree() + 1))
    throw DomainError("degree inconsistent with the tagged space");
  if (coeffs_.rows() != space_.dofs() || coeffs_.cols() != static_cast<Eigen::Index>(time_.slabs()) * degree + 1)
    throw DomainError("coefficient shape inconsistent with the meshes");
  local_nodes_ = gauss_lobatto_rule(degree + 1).nodes;
}

SpaceTimeSolution SpaceTimeSolution::zeros(const SpatialMesh1D& space, const TemporalMesh& time) {
  return SpaceTimeSolution(space, time, time.degree(), SpaceTag::Continuous,
                           Eigen::MatrixXd::Zero(space.dofs(), time.dofs()));
}

Eigen::VectorXd SpaceTimeSolution::slab_value(int n, double tau) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(coeffs_.rows());
  for (int k = 0; k <= degree_; ++k) v += lagrange_eval(local_nodes_, k, tau) * coeffs_.col(n * degree_ + k);
  return v;
}

Eigen::VectorXd SpaceTimeSolution::slab_derivative(int n, double tau) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(coeffs_.rows());
  for (int k = 0; k <= degree_; ++k)
    v += lagrange_derivative(local_nodes_, k, tau) * coeffs_.col(n * degree_ + k);
  return v / time_.width(n);
}

Eigen::VectorXd SpaceTimeSolution::at(double t) const {
  const int n = time_.locate(t);
  return slab_value(n, (t - time_.nodes()[n]) / time_.width(n));
}

double SpaceTimeSolution::evaluate(double x, double t) const { return space_.evaluate(at(t), x); }

}  // namespace wavest
