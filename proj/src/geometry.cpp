#include "rcons/geometry.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace rcons {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCutMargin = 1e-9;
constexpr double kReorthoThreshold = 1e-12;

void require(bool ok, const char* what) {
  if (!ok) throw ContractError(what);
}

void require_same_manifold(const Point& x, const Point& y) {
  require(x.manifold == y.manifold, "points live on different manifolds");
}

// Anchoring is checked by value; the consensus loop hands copies of the same
// base matrix around, so an exact-up-to-rounding comparison is enough.
void require_anchored(const Point& x, const Tangent& v) {
  require(v.base.manifold == x.manifold, "tangent belongs to another manifold");
  require(v.base.value.rows() == x.value.rows() &&
              v.base.value.cols() == x.value.cols() &&
              (v.base.value - x.value).cwiseAbs().maxCoeff() <= 1e-12,
          "tangent is anchored at a different base point");
  require(v.value.rows() == x.value.rows() && v.value.cols() == x.value.cols(),
          "tangent has the wrong shape");
}

Eigen::MatrixXd skew(const Eigen::MatrixXd& a) { return 0.5 * (a - a.transpose()); }

// Closest matrix with orthonormal columns (polar factor).
Eigen::MatrixXd polar_factor(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

double orthonormal_residual(const Eigen::MatrixXd& a) {
  return (a.transpose() * a - Eigen::MatrixXd::Identity(a.cols(), a.cols())).norm();
}

// Rotation angles of R in (-pi, pi], one entry per eigenvalue. Each planar
// rotation contributes the pair +theta, -theta.
Eigen::VectorXd eigen_angles(const Eigen::MatrixXd& r) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(r, false);
  const auto& ev = es.eigenvalues();
  Eigen::VectorXd out(ev.size());
  for (Eigen::Index k = 0; k < ev.size(); ++k) out(k) = std::arg(ev(k));
  return out;
}

// Principal angles between span(x) and span(y), both with orthonormal columns.
// Cosines come from x^T y, sines from (I - x x^T) y; pairing the two sorted
// spectra through atan2 keeps small and near-right angles accurate.
Eigen::VectorXd principal_angles(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  const Eigen::MatrixXd m = x.transpose() * y;
  const Eigen::MatrixXd residual = y - x * m;
  Eigen::JacobiSVD<Eigen::MatrixXd> cos_svd(m);
  Eigen::JacobiSVD<Eigen::MatrixXd> sin_svd(residual);
  const Eigen::VectorXd c = cos_svd.singularValues();
  const Eigen::VectorXd s = sin_svd.singularValues();
  const Eigen::Index p = c.size();
  Eigen::VectorXd theta(p);
  for (Eigen::Index i = 0; i < p; ++i) theta(i) = std::atan2(s(p - 1 - i), c(i));
  return theta;
}

Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return q.rightCols(n - p);
}

Eigen::MatrixXd skew_generator(int n, int i, int j) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
  e(i, j) = 1.0;
  e(j, i) = -1.0;
  return e;
}

}  // namespace

// Manifold -----------------------------------------------------------------

Manifold Manifold::euclidean(int n) {
  require(n >= 1, "euclidean dimension must be >= 1");
  return {ManifoldKind::Euclidean, n, 1, 0.0, 0.0, kInfinity};
}

Manifold Manifold::sphere(int n) {
  require(n >= 1, "sphere dimension must be >= 1");
  return {ManifoldKind::Sphere, n, 1, 1.0, 1.0, kPi};
}

Manifold Manifold::special_orthogonal(int n) {
  require(n >= 2, "SO(n) requires n >= 2");
  if (n == 2) return {ManifoldKind::SpecialOrthogonal, 2, 2, 0.0, 0.0, kPi};
  if (n == 3) return {ManifoldKind::SpecialOrthogonal, 3, 3, 0.25, 0.25, kPi};
  return {ManifoldKind::SpecialOrthogonal, n, n, 0.0, 0.5, kPi};
}

Manifold Manifold::grassmann(int n, int p) {
  require(n >= 2 && p >= 1 && p <= n - 1, "Grass(n,p) requires 1 <= p <= n-1");
  return {ManifoldKind::Grassmann, n, p, 0.0, 2.0, kPi / 2.0};
}

int Manifold::intrinsic_dim() const {
  switch (kind_) {
    case ManifoldKind::Euclidean:
    case ManifoldKind::Sphere:
      return n_;
    case ManifoldKind::SpecialOrthogonal:
      return n_ * (n_ - 1) / 2;
    case ManifoldKind::Grassmann:
      return p_ * (n_ - p_);
  }
  return 0;
}

int Manifold::ambient_rows() const {
  return kind_ == ManifoldKind::Sphere ? n_ + 1 : n_;
}

int Manifold::ambient_cols() const {
  switch (kind_) {
    case ManifoldKind::Euclidean:
    case ManifoldKind::Sphere:
      return 1;
    case ManifoldKind::SpecialOrthogonal:
      return n_;
    case ManifoldKind::Grassmann:
      return p_;
  }
  return 1;
}

double Manifold::r_star() const {
  const double curvature_radius = Delta_ > 0.0 ? kPi / std::sqrt(Delta_) : kInfinity;
  return 0.5 * std::min(inj_, curvature_radius);
}

std::string Manifold::name() const {
  switch (kind_) {
    case ManifoldKind::Euclidean:
      return "euclidean(" + std::to_string(n_) + ")";
    case ManifoldKind::Sphere:
      return "sphere(" + std::to_string(n_) + ")";
    case ManifoldKind::SpecialOrthogonal:
      return "so(" + std::to_string(n_) + ")";
    case ManifoldKind::Grassmann:
      return "grass(" + std::to_string(n_) + "," + std::to_string(p_) + ")";
  }
  return "unknown";
}

// Tangent arithmetic -------------------------------------------------------

Tangent& Tangent::operator+=(const Tangent& other) {
  require_anchored(base, other);
  value += other.value;
  return *this;
}

Tangent operator+(Tangent a, const Tangent& b) {
  a += b;
  return a;
}

Tangent operator*(double s, Tangent v) {
  v.value *= s;
  return v;
}

Tangent operator-(Tangent v) {
  v.value = -v.value;
  return v;
}

// Construction -------------------------------------------------------------

double point_residual(const Point& x) {
  switch (x.manifold.kind()) {
    case ManifoldKind::Euclidean:
      return 0.0;
    case ManifoldKind::Sphere:
      return std::abs(x.value.norm() - 1.0);
    case ManifoldKind::SpecialOrthogonal:
    case ManifoldKind::Grassmann:
      return orthonormal_residual(x.value);
  }
  return 0.0;
}

Point make_point(const Manifold& m, Eigen::MatrixXd value) {
  require(value.rows() == m.ambient_rows() && value.cols() == m.ambient_cols(),
          "point has the wrong shape for its manifold");
  require(value.allFinite(), "point has non-finite entries");
  Point x{m, std::move(value)};
  switch (m.kind()) {
    case ManifoldKind::Euclidean:
      break;
    case ManifoldKind::Sphere:
      require(point_residual(x) <= 1e-12, "sphere point is not unit norm");
      break;
    case ManifoldKind::SpecialOrthogonal:
      require(point_residual(x) < 1e-10, "SO(n) point is not orthogonal");
      require(x.value.determinant() > 0.0, "SO(n) point has negative determinant");
      break;
    case ManifoldKind::Grassmann:
      require(point_residual(x) < 1e-10, "Grassmann point lacks orthonormal columns");
      break;
  }
  return x;
}

Point nearest_point(const Manifold& m, const Eigen::MatrixXd& value) {
  require(value.rows() == m.ambient_rows() && value.cols() == m.ambient_cols(),
          "point has the wrong shape for its manifold");
  switch (m.kind()) {
    case ManifoldKind::Euclidean:
      return {m, value};
    case ManifoldKind::Sphere: {
      const double nrm = value.norm();
      require(nrm > 0.0, "cannot normalize the zero vector");
      return {m, value / nrm};
    }
    case ManifoldKind::SpecialOrthogonal: {
      Eigen::MatrixXd r = polar_factor(value);
      require(r.determinant() > 0.0, "matrix is closer to the other component of O(n)");
      return {m, r};
    }
    case ManifoldKind::Grassmann:
      return {m, polar_factor(value)};
  }
  return {m, value};
}

Point base_point(const Manifold& m) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(m.ambient_rows(), m.ambient_cols());
  switch (m.kind()) {
    case ManifoldKind::Euclidean:
      break;
    case ManifoldKind::Sphere:
      v(0, 0) = 1.0;
      break;
    case ManifoldKind::SpecialOrthogonal:
    case ManifoldKind::Grassmann:
      v.setIdentity();
      break;
  }
  return {m, v};
}

Tangent project_to_tangent(const Point& x, const Eigen::MatrixXd& ambient) {
  require(ambient.rows() == x.value.rows() && ambient.cols() == x.value.cols(),
          "ambient matrix has the wrong shape");
  switch (x.manifold.kind()) {
    case ManifoldKind::Euclidean:
      return {x, ambient};
    case ManifoldKind::Sphere:
      return {x, ambient - x.value * (x.value.transpose() * ambient)};
    case ManifoldKind::SpecialOrthogonal:
      return {x, x.value * skew(x.value.transpose() * ambient)};
    case ManifoldKind::Grassmann:
      return {x, ambient - x.value * (x.value.transpose() * ambient)};
  }
  return {x, ambient};
}

Tangent zero_tangent(const Point& x) {
  return {x, Eigen::MatrixXd::Zero(x.value.rows(), x.value.cols())};
}

bool same_point(const Point& x, const Point& y, double tol) {
  if (!(x.manifold == y.manifold)) return false;
  if (x.manifold.kind() == ManifoldKind::Grassmann) return dist(x, y) < tol;
  return (x.value - y.value).norm() < tol;
}

// Metric -------------------------------------------------------------------

double inner(const Point& x, const Tangent& v, const Tangent& w) {
  require_anchored(x, v);
  require_anchored(x, w);
  const double trace = (v.value.array() * w.value.array()).sum();
  return x.manifold.kind() == ManifoldKind::SpecialOrthogonal ? 0.5 * trace : trace;
}

double norm(const Point& x, const Tangent& v) {
  return std::sqrt(std::max(0.0, inner(x, v, v)));
}

// Exponential map -----------------------------------------------------------

Point exp(const Point& x, const Tangent& v) {
  require_anchored(x, v);
  const Manifold& m = x.manifold;
  switch (m.kind()) {
    case ManifoldKind::Euclidean:
      return {m, x.value + v.value};

    case ManifoldKind::Sphere: {
      const double theta = v.value.norm();
      if (theta == 0.0) return x;
      Eigen::MatrixXd y = std::cos(theta) * x.value + (std::sin(theta) / theta) * v.value;
      if (std::abs(y.norm() - 1.0) > kReorthoThreshold) y.normalize();
      return {m, y};
    }

    case ManifoldKind::SpecialOrthogonal: {
      const Eigen::MatrixXd omega = skew(x.value.transpose() * v.value);
      Eigen::MatrixXd y = x.value * omega.exp();
      if (orthonormal_residual(y) > kReorthoThreshold) y = polar_factor(y);
      return {m, y};
    }

    case ManifoldKind::Grassmann: {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(v.value, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::VectorXd s = svd.singularValues();
      const Eigen::MatrixXd& u = svd.matrixU();
      const Eigen::MatrixXd& w = svd.matrixV();
      const Eigen::MatrixXd cos_s = s.array().cos().matrix().asDiagonal();
      const Eigen::MatrixXd sin_s = s.array().sin().matrix().asDiagonal();
      Eigen::MatrixXd y = x.value * w * cos_s * w.transpose() + u * sin_s * w.transpose();
      if (orthonormal_residual(y) > kReorthoThreshold) y = polar_factor(y);
      return {m, y};
    }
  }
  return x;
}

// Distance -----------------------------------------------------------------

double dist(const Point& x, const Point& y) {
  require_same_manifold(x, y);
  switch (x.manifold.kind()) {
    case ManifoldKind::Euclidean:
      return (y.value - x.value).norm();

    case ManifoldKind::Sphere:
      // 2 atan2(|x - y|, |x + y|) stays accurate near 0 and near pi.
      return 2.0 * std::atan2((x.value - y.value).norm(), (x.value + y.value).norm());

    case ManifoldKind::SpecialOrthogonal: {
      // Each plane contributes theta^2 under the half-trace metric, and the
      // eigen-angle vector lists every plane twice.
      const Eigen::VectorXd a = eigen_angles(x.value.transpose() * y.value);
      return std::sqrt(0.5 * a.squaredNorm());
    }

    case ManifoldKind::Grassmann:
      return principal_angles(x.value, y.value).norm();
  }
  return 0.0;
}

// Logarithm map -------------------------------------------------------------

Tangent log(const Point& x, const Point& y) {
  require_same_manifold(x, y);
  const Manifold& m = x.manifold;
  const double inj = m.injectivity_radius();

  switch (m.kind()) {
    case ManifoldKind::Euclidean:
      return {x, y.value - x.value};

    case ManifoldKind::Sphere: {
      const double theta = dist(x, y);
      if (theta > inj - kCutMargin) throw CutLocusError("sphere log at antipodal point");
      Eigen::MatrixXd u = y.value - x.value * (x.value.transpose() * y.value);
      u -= x.value * (x.value.transpose() * u);
      const double sin_theta = u.norm();
      if (theta < 1e-6) {
        // theta / sin(theta) = 1 + theta^2 / 6 + O(theta^4)
        return {x, (1.0 + theta * theta / 6.0) * u};
      }
      return {x, (theta / sin_theta) * u};
    }

    case ManifoldKind::SpecialOrthogonal: {
      const Eigen::MatrixXd r = x.value.transpose() * y.value;
      const double d = std::sqrt(0.5 * eigen_angles(r).squaredNorm());
      if (d > inj - kCutMargin) throw CutLocusError("SO(n) log at or beyond the cut locus");
      const Eigen::MatrixXd omega = skew(r.log());
      return {x, x.value * omega};
    }

    case ManifoldKind::Grassmann: {
      const double d = principal_angles(x.value, y.value).norm();
      if (d > inj - kCutMargin) throw CutLocusError("Grassmann log at or beyond the cut locus");
      const Eigen::MatrixXd mxy = x.value.transpose() * y.value;
      const Eigen::MatrixXd residual = y.value - x.value * mxy;
      // residual * mxy^{-1}, solved as mxy^T a^T = residual^T.
      const Eigen::MatrixXd a =
          mxy.transpose().partialPivLu().solve(residual.transpose()).transpose();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::MatrixXd atan_s = svd.singularValues().array().atan().matrix().asDiagonal();
      Eigen::MatrixXd v = svd.matrixU() * atan_s * svd.matrixV().transpose();
      v -= x.value * (x.value.transpose() * v);
      return {x, v};
    }
  }
  return zero_tangent(x);
}

// Random tangents ----------------------------------------------------------

Tangent random_tangent(const Point& x, double sigma, std::mt19937_64& rng) {
  require(sigma >= 0.0, "sigma must be non-negative");
  std::normal_distribution<double> normal(0.0, 1.0);
  const Manifold& m = x.manifold;
  if (m.kind() == ManifoldKind::SpecialOrthogonal) {
    const int n = m.n();
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double c = sigma * normal(rng);
        omega(i, j) += c;
        omega(j, i) -= c;
      }
    }
    return {x, x.value * omega};
  }
  // Isotropic ambient noise projected onto the tangent space keeps unit
  // variance per coordinate of any orthonormal tangent basis.
  Eigen::MatrixXd g(x.value.rows(), x.value.cols());
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = sigma * normal(rng);
  return project_to_tangent(x, g);
}

Tangent random_unit_tangent(const Point& x, std::mt19937_64& rng) {
  for (;;) {
    Tangent v = random_tangent(x, 1.0, rng);
    const double nrm = norm(x, v);
    if (nrm > 1e-8) return (1.0 / nrm) * std::move(v);
  }
}

Point random_point_near(const Point& x, double sigma, std::mt19937_64& rng) {
  return exp(x, random_tangent(x, sigma, rng));
}

std::vector<Tangent> tangent_basis(const Point& x) {
  const Manifold& m = x.manifold;
  std::vector<Tangent> basis;
  basis.reserve(static_cast<std::size_t>(m.intrinsic_dim()));
  switch (m.kind()) {
    case ManifoldKind::Euclidean:
      for (int i = 0; i < m.n(); ++i) {
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(m.n(), 1);
        e(i, 0) = 1.0;
        basis.push_back({x, e});
      }
      break;
    case ManifoldKind::Sphere: {
      const Eigen::MatrixXd comp = orthogonal_complement(x.value);
      for (Eigen::Index k = 0; k < comp.cols(); ++k) basis.push_back({x, comp.col(k)});
      break;
    }
    case ManifoldKind::SpecialOrthogonal:
      for (int i = 0; i < m.n(); ++i)
        for (int j = i + 1; j < m.n(); ++j)
          basis.push_back({x, x.value * skew_generator(m.n(), i, j)});
      break;
    case ManifoldKind::Grassmann: {
      const Eigen::MatrixXd comp = orthogonal_complement(x.value);
      for (Eigen::Index a = 0; a < comp.cols(); ++a) {
        for (int b = 0; b < m.p(); ++b) {
          Eigen::MatrixXd v = Eigen::MatrixXd::Zero(m.n(), m.p());
          v.col(b) = comp.col(a);
          basis.push_back({x, v});
        }
      }
      break;
    }
  }
  return basis;
}

// S_kappa / C_kappa ----------------------------------------------------------

double s_kappa(double kappa, double t) {
  if (kappa > 0.0) {
    const double r = std::sqrt(kappa);
    return std::sin(r * t) / r;
  }
  if (kappa < 0.0) {
    const double r = std::sqrt(-kappa);
    return std::sinh(r * t) / r;
  }
  return t;
}

double c_kappa(double kappa, double t) {
  if (kappa > 0.0) return std::cos(std::sqrt(kappa) * t);
  if (kappa < 0.0) return std::cosh(std::sqrt(-kappa) * t);
  return 1.0;
}

}  // namespace rcons
