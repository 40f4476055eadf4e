#include "wavest/polyquad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wavest/errors.hpp"

namespace wavest {
namespace {

// P_n and P_n' on [-1,1] by the three-term recurrence.
void legendre_pair(int n, double x, double& p, double& dp) {
  double p0 = 1.0;
  double p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  p = p1;
  // Derivative recurrence; the endpoint values are closed-form.
  if (std::abs(1.0 - x * x) < 1e-300) {
    const double sign = (x > 0 || n % 2 == 1) ? 1.0 : -1.0;
    dp = sign * 0.5 * n * (n + 1.0);
  } else {
    dp = n * (p0 - x * p1) / (1.0 - x * x);
  }
}

void check_interval(Interval iv) {
  if (!(iv.b > iv.a)) throw DomainError("quadrature interval must satisfy a < b");
}

// Rules on the reference interval (0,1).
QuadratureRule reference_gauss_legendre(int m) {
  QuadratureRule rule;
  rule.kind = QuadratureKind::GaussLegendre;
  rule.exactness_degree = 2 * m - 1;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    // Chebyshev-type initial guess for the i-th root (descending).
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double p = 0.0;
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre_pair(m, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        legendre_pair(m, x, p, dp);
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map from [-1,1] to (0,1), ascending order.
    rule.nodes[m - 1 - i] = 0.5 * (x + 1.0);
    rule.weights[m - 1 - i] = 0.5 * w;
  }
  // Exact symmetry about 1/2.
  for (int i = 0; i < m / 2; ++i) {
    const double d = 0.5 * (rule.nodes[m - 1 - i] - rule.nodes[i]);
    rule.nodes[i] = 0.5 - d;
    rule.nodes[m - 1 - i] = 0.5 + d;
    const double w = 0.5 * (rule.weights[i] + rule.weights[m - 1 - i]);
    rule.weights[i] = rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.5;
  return rule;
}

QuadratureRule reference_gauss_lobatto(int m) {
  const int n = m - 1;  // interior nodes are the roots of P_n'
  QuadratureRule rule;
  rule.kind = QuadratureKind::GaussLobatto;
  rule.exactness_degree = 2 * m - 3;
  rule.nodes.assign(m, 0.0);
  rule.weights.assign(m, 0.0);
  const double end_weight = 2.0 / (n * (n + 1.0));
  rule.nodes.front() = 0.0;
  rule.nodes.back() = 1.0;
  rule.weights.front() = rule.weights.back() = 0.5 * end_weight;
  for (int i = 1; i < n; ++i) {
    double x = -std::cos(std::numbers::pi * i / n);
    double p = 0.0;
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      legendre_pair(n, x, p, dp);
      // (1 - x^2) P'' = 2x P' - n(n+1) P
      const double d2p = (2.0 * x * dp - n * (n + 1.0) * p) / (1.0 - x * x);
      const double dx = dp / d2p;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    legendre_pair(n, x, p, dp);
    rule.nodes[i] = 0.5 * (x + 1.0);
    rule.weights[i] = 0.5 * end_weight / (p * p);
  }
  for (int i = 0; i < m / 2; ++i) {
    const double d = 0.5 * (rule.nodes[m - 1 - i] - rule.nodes[i]);
    rule.nodes[i] = 0.5 - d;
    rule.nodes[m - 1 - i] = 0.5 + d;
    const double w = 0.5 * (rule.weights[i] + rule.weights[m - 1 - i]);
    rule.weights[i] = rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.5;
  return rule;
}

}  // namespace

double QuadratureRule::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (std::size_t q = 0; q < nodes.size(); ++q) s += weights[q] * f(nodes[q]);
  return s;
}

QuadratureRule QuadratureRule::mapped_to(Interval target) const {
  check_interval(target);
  QuadratureRule out = *this;
  out.interval = target;
  const double scale = target.length() / interval.length();
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    out.nodes[q] = target.a + (nodes[q] - interval.a) * scale;
    out.weights[q] = weights[q] * scale;
  }
  if (!out.nodes.empty() && kind == QuadratureKind::GaussLobatto) {
    out.nodes.front() = target.a;
    out.nodes.back() = target.b;
  }
  return out;
}

LegendreBasis::LegendreBasis(Interval interval, int max_degree)
    : interval_(interval), max_degree_(max_degree) {
  check_interval(interval);
  if (max_degree < 0) throw DomainError("LegendreBasis: negative max degree");
}

void LegendreBasis::check(int r, double t) const {
  if (r < 0 || r > max_degree_)
    throw DomainError("legendre degree " + std::to_string(r) + " outside [0, " +
                      std::to_string(max_degree_) + "]");
  const double tol = 1e-12 * interval_.length();
  if (t < interval_.a - tol || t > interval_.b + tol)
    throw DomainError("legendre evaluation point outside interval");
}

double LegendreBasis::value(int r, double t) const {
  check(r, t);
  const double xi = (2.0 * t - interval_.a - interval_.b) / interval_.length();
  return legendre_reference(r, xi);
}

double LegendreBasis::derivative(int r, double t) const {
  check(r, t);
  const double xi = (2.0 * t - interval_.a - interval_.b) / interval_.length();
  return legendre_reference_derivative(r, xi) * 2.0 / interval_.length();
}

double LegendreBasis::norm_squared(int r) const {
  if (r < 0 || r > max_degree_) throw DomainError("legendre degree out of range");
  return interval_.length() / (2.0 * r + 1.0);
}

void LegendreBasis::values(double t, std::span<double> out) const {
  check(0, t);
  const double xi = (2.0 * t - interval_.a - interval_.b) / interval_.length();
  const int n = std::min<int>(max_degree_, static_cast<int>(out.size()) - 1);
  if (n < 0) return;
  out[0] = 1.0;
  if (n >= 1) out[1] = xi;
  for (int k = 2; k <= n; ++k)
    out[k] = ((2.0 * k - 1.0) * xi * out[k - 1] - (k - 1.0) * out[k - 2]) / k;
}

double legendre_eval(const LegendreBasis& basis, int r, double t) { return basis.value(r, t); }

double legendre_reference(int r, double xi) {
  double p = 0.0;
  double dp = 0.0;
  legendre_pair(r, xi, p, dp);
  return p;
}

double legendre_reference_derivative(int r, double xi) {
  double p = 0.0;
  double dp = 0.0;
  legendre_pair(r, xi, p, dp);
  return dp;
}

QuadratureRule gauss_legendre_rule(int m, Interval interval) {
  if (m < 1) throw DomainError("Gauss-Legendre rule needs at least one node");
  if (m > kMaxQuadratureNodes) throw DomainError("Gauss-Legendre node count exceeds 16");
  check_interval(interval);
  return reference_gauss_legendre(m).mapped_to(interval);
}

QuadratureRule gauss_lobatto_rule(int m, Interval interval) {
  if (m < 2) throw DomainError("Gauss-Lobatto rule needs at least two nodes");
  if (m > kMaxQuadratureNodes) throw DomainError("Gauss-Lobatto node count exceeds 16");
  check_interval(interval);
  return reference_gauss_lobatto(m).mapped_to(interval);
}

namespace {

void check_distinct(std::span<const double> nodes) {
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a + 1; b < nodes.size(); ++b)
      if (nodes[a] == nodes[b]) throw DomainError("lagrange nodes must be pairwise distinct");
}

}  // namespace

double lagrange_eval(std::span<const double> nodes, std::size_t j, double t) {
  if (j >= nodes.size()) throw DomainError("lagrange index out of range");
  check_distinct(nodes);
  double v = 1.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (k == j) continue;
    const double d = nodes[j] - nodes[k];
    if (d == 0.0) throw DomainError("lagrange nodes must be pairwise distinct");
    v *= (t - nodes[k]) / d;
  }
  return v;
}

double lagrange_derivative(std::span<const double> nodes, std::size_t j, double t) {
  if (j >= nodes.size()) throw DomainError("lagrange index out of range");
  check_distinct(nodes);
  double denom = 1.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (k == j) continue;
    const double d = nodes[j] - nodes[k];
    if (d == 0.0) throw DomainError("lagrange nodes must be pairwise distinct");
    denom *= d;
  }
  double sum = 0.0;
  for (std::size_t l = 0; l < nodes.size(); ++l) {
    if (l == j) continue;
    double prod = 1.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (k == j || k == l) continue;
      prod *= t - nodes[k];
    }
    sum += prod;
  }
  return sum / denom;
}

}  // namespace wavest
