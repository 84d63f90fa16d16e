#pragma once

// Intrinsic Riemannian primitives for the manifolds used by the consensus
// protocol: Euclidean space R^n, the sphere S^n, the rotation group SO(n)
// and the Grassmann manifold Grass(n, p).
//
// Points and tangent vectors are stored as dense matrices in the ambient
// representation:
//   R^n         n x 1 column
//   S^n         (n+1) x 1 unit column
//   SO(n)       n x n rotation matrix; tangents are R * Omega, Omega skew
//   Grass(n,p)  n x p orthonormal basis; tangents are horizontal (X^T V = 0)

#include <Eigen/Dense>

#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace rcons {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Raised when log is requested at or beyond the cut locus of the base point.
class CutLocusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when arguments violate an operation's preconditions (mismatched
/// manifolds, tangents anchored elsewhere, malformed points).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when a scalar formula is evaluated outside its domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class ManifoldKind { Euclidean, Sphere, SpecialOrthogonal, Grassmann };

/// A manifold instance with its curvature metadata. Cheap to copy.
class Manifold {
 public:
  static Manifold euclidean(int n);
  static Manifold sphere(int n);
  static Manifold special_orthogonal(int n);
  static Manifold grassmann(int n, int p);

  ManifoldKind kind() const { return kind_; }
  int n() const { return n_; }
  int p() const { return p_; }

  int intrinsic_dim() const;
  int ambient_rows() const;
  int ambient_cols() const;

  /// Lower and upper sectional-curvature bounds.
  double delta() const { return delta_; }
  double Delta() const { return Delta_; }
  double injectivity_radius() const { return inj_; }

  /// Radius below which every geodesic ball is convex:
  /// half of min{inj, pi / sqrt(Delta)}, with pi / sqrt(Delta) = inf when
  /// Delta <= 0.
  double r_star() const;

  bool constant_curvature() const { return delta_ == Delta_; }

  /// "so(7)", "sphere(6)", "grass(7,3)", "euclidean(2)".
  std::string name() const;

  friend bool operator==(const Manifold& a, const Manifold& b) {
    return a.kind_ == b.kind_ && a.n_ == b.n_ && a.p_ == b.p_;
  }

 private:
  Manifold(ManifoldKind kind, int n, int p, double delta, double Delta,
           double inj)
      : kind_(kind), n_(n), p_(p), delta_(delta), Delta_(Delta), inj_(inj) {}

  ManifoldKind kind_;
  int n_;
  int p_;
  double delta_;
  double Delta_;
  double inj_;
};

struct Point {
  Manifold manifold;
  Eigen::MatrixXd value;
};

struct Tangent {
  Point base;
  Eigen::MatrixXd value;

  Tangent& operator+=(const Tangent& other);
  Tangent& operator*=(double s) {
    value *= s;
    return *this;
  }
};

Tangent operator+(Tangent a, const Tangent& b);
Tangent operator*(double s, Tangent v);
Tangent operator-(Tangent v);

// Construction -------------------------------------------------------------

/// Validates the point invariants for `m` and wraps `value`. Throws
/// ContractError when the shape or orthonormality is wrong.
Point make_point(const Manifold& m, Eigen::MatrixXd value);

/// Origin of R^n, e_1 on S^n, the identity on SO(n), the span of the first p
/// axes on Grass(n, p).
Point base_point(const Manifold& m);

/// Projects an ambient matrix onto T_x M.
Tangent project_to_tangent(const Point& x, const Eigen::MatrixXd& ambient);

Tangent zero_tangent(const Point& x);

/// Closest valid point to an approximate ambient matrix (normalize, polar
/// factor, or orthonormal basis of the column span).
Point nearest_point(const Manifold& m, const Eigen::MatrixXd& value);

/// Residual of the point invariant (0 for Euclidean).
double point_residual(const Point& x);

/// Same point of the manifold; for Grassmann, same column span.
bool same_point(const Point& x, const Point& y, double tol = 1e-9);

// Riemannian operations ----------------------------------------------------

double inner(const Point& x, const Tangent& v, const Tangent& w);
double norm(const Point& x, const Tangent& v);
inline double norm(const Tangent& v) { return norm(v.base, v); }

Point exp(const Point& x, const Tangent& v);

/// Inverse of exp inside the injectivity radius. Throws CutLocusError when
/// dist(x, y) > inj - 1e-9.
Tangent log(const Point& x, const Point& y);

double dist(const Point& x, const Point& y);

/// Isotropic Gaussian tangent: i.i.d. Normal(0, sigma^2) coefficients in an
/// orthonormal basis of T_x M.
Tangent random_tangent(const Point& x, double sigma, std::mt19937_64& rng);

/// Uniformly distributed unit tangent.
Tangent random_unit_tangent(const Point& x, std::mt19937_64& rng);

/// exp_x of an isotropic Gaussian tangent.
Point random_point_near(const Point& x, double sigma, std::mt19937_64& rng);

/// Orthonormal basis of T_x M under the manifold metric.
std::vector<Tangent> tangent_basis(const Point& x);

// Curvature helper functions S_kappa / C_kappa ----------------------------

double s_kappa(double kappa, double t);
double c_kappa(double kappa, double t);

}  // namespace rcons
