#pragma once

// Legendre polynomials, Lagrange cardinal functions and Gauss-Legendre /
// Gauss-Lobatto quadrature on arbitrary intervals.

#include <functional>
#include <span>
#include <vector>

namespace wavest {

/// Largest node count accepted by the rule generators.
inline constexpr int kMaxQuadratureNodes = 16;

struct Interval {
  double a = 0.0;
  double b = 1.0;
  double length() const { return b - a; }
};

enum class QuadratureKind { GaussLegendre, GaussLobatto };

struct QuadratureRule {
  Interval interval;
  std::vector<double> nodes;
  std::vector<double> weights;
  QuadratureKind kind = QuadratureKind::GaussLegendre;
  int exactness_degree = 0;

  std::size_t size() const { return nodes.size(); }
  double integrate(const std::function<double(double)>& f) const;
  /// Affine image of this rule on another interval.
  QuadratureRule mapped_to(Interval target) const;
};

/// Legendre polynomials on (a,b), orthogonal in L2(a,b) and normalized so that
/// every member equals 1 at the right endpoint b.
class LegendreBasis {
 public:
  LegendreBasis(Interval interval, int max_degree);

  const Interval& interval() const { return interval_; }
  int max_degree() const { return max_degree_; }

  double value(int r, double t) const;
  double derivative(int r, double t) const;
  /// (L_r, L_r) on the interval: (b - a) / (2r + 1).
  double norm_squared(int r) const;
  /// Values of L_0..L_{max_degree} at t.
  void values(double t, std::span<double> out) const;

 private:
  void check(int r, double t) const;

  Interval interval_;
  int max_degree_;
};

double legendre_eval(const LegendreBasis& basis, int r, double t);

/// Standard Legendre polynomial P_r on [-1,1] and its derivative (no range checks).
double legendre_reference(int r, double xi);
double legendre_reference_derivative(int r, double xi);

QuadratureRule gauss_legendre_rule(int m, Interval interval = {});
QuadratureRule gauss_lobatto_rule(int m, Interval interval = {});

/// j-th Lagrange cardinal polynomial of `nodes`, evaluated at t.
double lagrange_eval(std::span<const double> nodes, std::size_t j, double t);
double lagrange_derivative(std::span<const double> nodes, std::size_t j, double t);

}  // namespace wavest
