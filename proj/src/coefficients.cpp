#include "calorpot/coefficients.hpp"

#include <memory>

namespace calorpot::coefficients {

DiffusionField DiffusionField::constant(const Mat3& A, double mu) {
  DiffusionField f;
  f.matrix_ = [A](const Vec3&) { return A; };
  f.kind_ = FieldKind::Constant;
  f.mu_ = mu;
  f.kappa_ = 0.0;
  f.alpha_ = 1.0;
  return f;
}

DiffusionField DiffusionField::constant_scalar(double a) {
  DiffusionField f;
  f.scalar_ = [a](const Vec3&) { return a; };
  f.kind_ = FieldKind::Constant;
  f.mu_ = std::min(a, 1.0 / a);
  f.kappa_ = 0.0;
  f.alpha_ = 1.0;
  return f;
}

DiffusionField DiffusionField::smooth(double base, double eps) {
  DiffusionField f;
  f.scalar_ = [base, eps](const Vec3& X) { return base + eps * std::sin(X.x()); };
  f.kind_ = FieldKind::Smooth;
  double lo = base - std::abs(eps), hi = base + std::abs(eps);
  f.mu_ = std::min(lo, 1.0 / hi);
  f.kappa_ = std::abs(eps);  // |sin x - sin y| <= |x-y|
  f.alpha_ = 1.0;
  return f;
}

DiffusionField DiffusionField::hoelder(double eps, double alpha, const Vec3& X0) {
  DiffusionField f;
  f.scalar_ = [eps, alpha, X0](const Vec3& X) {
    return 1.0 + eps * std::pow((X - X0).norm(), alpha);
  };
  f.kind_ = FieldKind::Hoelder;
  f.mu_ = 1.0 / (1.0 + eps * std::pow(8.0, alpha));  // desk-scale box bound
  f.kappa_ = eps;  // | |X-X0|^a - |Y-X0|^a | <= |X-Y|^a
  f.alpha_ = alpha;
  return f;
}

DiffusionField DiffusionField::hoelder_radial(double eps, double alpha,
                                              const geometry::ShapeSpec& shape) {
  DiffusionField f;
  f.scalar_ = [eps, alpha, shape](const Vec3& X) {
    double r = X.norm();
    Vec3 omega = (r > 1e-14) ? Vec3(X / r) : Vec3::UnitZ();
    return 1.0 + eps * std::pow(std::abs(r - shape.rho(omega)), alpha);
  };
  f.kind_ = FieldKind::Hoelder;
  f.mu_ = 1.0 / (1.0 + eps * std::pow(8.0, alpha));
  f.kappa_ = 4.0 * eps;  // radial offset is Lipschitz-comparable to |X-Y|
  f.alpha_ = alpha;
  return f;
}

DiffusionField DiffusionField::custom(MatrixFn f, FieldKind kind, double mu, double kappa,
                                      double alpha) {
  DiffusionField d;
  d.matrix_ = std::move(f);
  d.kind_ = kind;
  d.mu_ = mu;
  d.kappa_ = kappa;
  d.alpha_ = alpha;
  return d;
}

DiffusionField DiffusionField::custom_scalar(ScalarFn f, FieldKind kind, double mu, double kappa,
                                             double alpha) {
  DiffusionField d;
  d.scalar_ = std::move(f);
  d.kind_ = kind;
  d.mu_ = mu;
  d.kappa_ = kappa;
  d.alpha_ = alpha;
  return d;
}

Vec3 conormal(const DiffusionField& A, const Vec3& Q, const Vec3& N) { return A(Q) * N; }

Vec3 tangential_gradient(const Vec3& g, const Vec3& N) { return g - g.dot(N) * N; }

ValidationReport validate_field(const DiffusionField& A, const std::vector<Vec3>& points,
                                const std::vector<Vec3>& directions) {
  if (points.empty() || directions.empty())
    throw std::invalid_argument("validate_field: empty sample set");
  ValidationReport rep;
  double min_quot = std::numeric_limits<double>::max();
  double max_quot = 0.0;
  for (const Vec3& X : points) {
    Mat3 M = A(X);
    rep.symmetry_defect = std::max(rep.symmetry_defect, (M - M.transpose()).cwiseAbs().maxCoeff());
    for (const Vec3& xi : directions) {
      double q = xi.dot(M * xi) / xi.squaredNorm();
      if (q < min_quot) {
        min_quot = q;
        rep.witness_x = X;
      }
      if (q > max_quot) {
        max_quot = q;
        rep.witness_y = X;
      }
    }
  }
  rep.ellipticity_low_margin = min_quot - A.mu();
  rep.ellipticity_high_margin = 1.0 / A.mu() - max_quot;

  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j) {
      double d = (points[i] - points[j]).norm();
      if (d < 1e-12) continue;
      Mat3 diff = A(points[i]) - A(points[j]);
      double quot = diff.cwiseAbs().maxCoeff() / std::pow(d, A.alpha());
      if (quot > rep.max_hoelder_quotient) {
        rep.max_hoelder_quotient = quot;
        rep.witness_x = points[i];
        rep.witness_y = points[j];
      }
    }

  if (rep.symmetry_defect > 1e-12) {
    rep.pass = false;
    rep.failure = "symmetry";
  } else if (rep.ellipticity_low_margin < -1e-12 || rep.ellipticity_high_margin < -1e-12) {
    rep.pass = false;
    rep.failure = "ellipticity";
  } else if (rep.max_hoelder_quotient > A.kappa() * (1.0 + 1e-9)) {
    rep.pass = false;
    rep.failure = "hoelder";
  }
  return rep;
}

double blend_theta(double s, double r0) {
  double a = std::abs(s);
  if (a <= r0) return 1.0;
  if (a >= 2.0 * r0) return 0.0;
  double u = (a - r0) / r0;
  return 1.0 - u * u * (3.0 - 2.0 * u);
}

DiffusionField blend_Ar(const DiffusionField& A, const DiffusionField& A_tilde,
                        const BlendSpec& spec, const geometry::BoundaryMesh& mesh) {
  if (!(spec.r > 0.0 && spec.r <= 1.0)) throw std::invalid_argument("blend_Ar: r must be in (0,1]");
  for (const Vec3& Q : mesh.nodes()) {
    if ((A(Q) - A_tilde(Q)).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("blend_Ar: A and Atilde disagree on the boundary");
  }
  double r0 = mesh.diameter();
  double r = spec.r;
  auto mesh_ptr = std::make_shared<geometry::BoundaryMesh>(mesh);
  auto blended = [A, A_tilde, r, r0, mesh_ptr](const Vec3& X) -> Mat3 {
    double th = blend_theta(mesh_ptr->distance_to_boundary(X) / r, r0);
    return th * A(X) + (1.0 - th) * A_tilde(X);
  };
  double mu = std::min(A.mu(), A_tilde.mu());
  double kappa = A.kappa() + A_tilde.kappa();
  double alpha = std::min(spec.alpha0, std::min(A.alpha(), A_tilde.alpha()));
  return DiffusionField::custom(blended, FieldKind::Blend, mu, kappa, alpha);
}

}  // namespace calorpot::coefficients
