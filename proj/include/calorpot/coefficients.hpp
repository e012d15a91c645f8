#pragma once

#include "calorpot/geometry.hpp"
#include "calorpot/numeric.hpp"

#include <functional>
#include <string>
#include <vector>

namespace calorpot::coefficients {

enum class FieldKind { Constant, Smooth, Hoelder, Blend };

// Diffusion matrix A(X) with the standing assumptions: time-independent,
// symmetric, uniformly elliptic with constant mu, Hoelder with (kappa, alpha).
class DiffusionField {
 public:
  using MatrixFn = std::function<Mat3(const Vec3&)>;
  using ScalarFn = std::function<double(const Vec3&)>;

  Mat3 operator()(const Vec3& X) const { return matrix_ ? matrix_(X) : scalar_(X) * Mat3::Identity(); }
  bool isotropic() const { return static_cast<bool>(scalar_); }
  double scalar_at(const Vec3& X) const { return scalar_(X); }

  FieldKind kind() const { return kind_; }
  double mu() const { return mu_; }
  double kappa() const { return kappa_; }
  double alpha() const { return alpha_; }

  static DiffusionField constant(const Mat3& A, double mu);
  static DiffusionField constant_scalar(double a);
  // a(X) = (base + eps*sin(x1)) * I
  static DiffusionField smooth(double base, double eps);
  // a(X) = (1 + eps*|X - X0|^alpha) * I
  static DiffusionField hoelder(double eps, double alpha, const Vec3& X0);
  // a(X) = (1 + eps*| |X| - rho(X/|X|) |^alpha) * I  -- equals I on the shape's
  // boundary, genuinely Hoelder-alpha off it; the stock field for blend tests
  static DiffusionField hoelder_radial(double eps, double alpha,
                                       const geometry::ShapeSpec& shape);
  static DiffusionField custom(MatrixFn f, FieldKind kind, double mu, double kappa, double alpha);
  static DiffusionField custom_scalar(ScalarFn f, FieldKind kind, double mu, double kappa,
                                      double alpha);

 private:
  MatrixFn matrix_;
  ScalarFn scalar_;
  FieldKind kind_ = FieldKind::Constant;
  double mu_ = 1.0, kappa_ = 0.0, alpha_ = 1.0;
};

Vec3 conormal(const DiffusionField& A, const Vec3& Q, const Vec3& N);
Vec3 tangential_gradient(const Vec3& g, const Vec3& N);

struct ValidationReport {
  bool pass = true;
  double symmetry_defect = 0.0;
  double ellipticity_low_margin = 0.0;   // min xi'Axi/|xi|^2 - mu  (>=0 ok)
  double ellipticity_high_margin = 0.0;  // 1/mu - max xi'Axi/|xi|^2 (>=0 ok)
  double max_hoelder_quotient = 0.0;     // max |a_ij(X)-a_ij(Y)|/|X-Y|^alpha
  Vec3 witness_x = Vec3::Zero(), witness_y = Vec3::Zero();
  std::string failure;
};

ValidationReport validate_field(const DiffusionField& A, const std::vector<Vec3>& points,
                                const std::vector<Vec3>& directions);

struct BlendSpec {
  double r = 0.2;       // blend radius in (0, 1]
  double alpha0 = 0.5;  // declared Hoelder exponent of A - Atilde near the boundary
};

// theta(dist/r) A + (1 - theta(dist/r)) Atilde with the smoothstep profile
// theta == 1 on (-r0, r0), supported in (-2 r0, 2 r0), r0 = diam(mesh).
// Requires Atilde == A on the mesh nodes to 1e-10.
DiffusionField blend_Ar(const DiffusionField& A, const DiffusionField& A_tilde,
                        const BlendSpec& spec, const geometry::BoundaryMesh& mesh);

// cutoff profile exposed for tests
double blend_theta(double s, double r0);

}  // namespace calorpot::coefficients
