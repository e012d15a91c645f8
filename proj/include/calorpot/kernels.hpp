#pragma once

#include "calorpot/coefficients.hpp"
#include "calorpot/numeric.hpp"

#include <complex>

namespace calorpot::kernels {

// value and derivatives of the (frozen-coefficient) fundamental solution at
// one (X, Y, t)
struct KernelJet {
  double value = 0.0;
  Vec3 grad_x = Vec3::Zero();
  Vec3 grad_y = Vec3::Zero();
  double dt = 0.0;
  double dhalf = 0.0;  // filled on request (quadrature)
  Mat3 mixed_xy = Mat3::Zero();
};

struct FrequencyJet {
  Complex value{0.0, 0.0};
  Eigen::Vector3cd grad_x = Eigen::Vector3cd::Zero();
  Eigen::Vector3cd grad_y = Eigen::Vector3cd::Zero();
};

// per-source frozen coefficient data
struct FrozenPoint {
  bool isotropic = true;
  double inv_a = 1.0;          // isotropic: A = a I
  Mat3 inv_mat = Mat3::Identity();
  double inv_sd = 1.0;         // (det A)^{-1/2}
  static FrozenPoint from(const Mat3& A);
  static FrozenPoint from_scalar(double a);
  // q = <A^{-1} d, d>
  double q_of(const Vec3& d) const {
    return isotropic ? inv_a * d.squaredNorm() : d.dot(inv_mat * d);
  }
  Vec3 inv_apply(const Vec3& d) const { return isotropic ? Vec3(inv_a * d) : Vec3(inv_mat * d); }
};

// Closed forms of the time-integrated (cumulative) frozen kernels; these
// telescope into exact slab weights. inv_sd = (det A)^{-1/2}, q = <A^{-1}d,d>.
namespace cumulative {
// int_0^t Gamma ds = erfc(sqrt(q)/(2 sqrt(t))) / (4 pi sqrt(q det A))
double slp(double q, double inv_sd, double t);
// radial part of int_0^t grad Gamma ds:  grad_x = -(A^{-1} d) * dlp_radial,
// conormal in Q:  <N_Q, d> * dlp_radial
double dlp_radial(double q, double inv_sd, double t);
// I_{1/2} Gamma(t) = 2 (4 pi)^{-3/2} e^{-q/4t} / sqrt(q t det A)
double half_integral(double q, double inv_sd, double t);
// Gamma itself
double gamma_value(double q, double inv_sd, double t);
}  // namespace cumulative

// exact jets of the constant-coefficient Gaussian; throws on non-SPD A
KernelJet gamma_const(const Mat3& A, const Vec3& X, const Vec3& Y, double t,
                      bool with_dhalf = false);
// frozen-coefficient parametrix: A frozen at Y
KernelJet gamma_frozen(const coefficients::DiffusionField& A, const Vec3& X, const Vec3& Y,
                       double t, bool with_dhalf = false);

// second time derivative (used by the oscillatory tail expansion)
double gamma_dt2(const FrozenPoint& fz, double q, double t);

// Levi-type correction to the frozen parametrix: depth 0 returns 0, depth>=1
// evaluates the composition integral
//   int_0^t int_{R^3} <grad_z G0(X,Z,u), (A(Y)-A(Z)) grad_z G0(Z,Y,t-u)> dZ du
// by tensor-grid quadrature; throws when grid refinement fails to converge.
double levi_correction(const coefficients::DiffusionField& A, const Vec3& X, const Vec3& Y,
                       double t, int depth, double rel_tol = 1e-3);

// D_t^{1/2} Gamma by the three-term split
//   sqrt(pi) D_t^{1/2} G = G(t/2)/sqrt(t/2) + int_0^{t/2} G(s)/(2 (t-s)^{3/2}) ds
//                          + int_{t/2}^t ds G(s) / sqrt(t-s)
// (quadrature route; requires X != Y)
double frac_half_dt(const coefficients::DiffusionField& A, const Vec3& X, const Vec3& Y, double t);
double frac_half_dt(const FrozenPoint& fz, double q, double t);

enum class HatMode { ClosedForm, Quadrature };

// Fourier-transformed kernel Gamma_hat(X,Y,tau) of the frozen Gaussian:
// closed form e^{-sqrt(i tau q)} / (4 pi sqrt(q det A)); quadrature mode
// integrates e^{-i tau t} Gamma over (0,T) with an integration-by-parts tail.
FrequencyJet gamma_hat(const coefficients::DiffusionField& A, const Vec3& X, const Vec3& Y,
                       double tau, HatMode mode = HatMode::ClosedForm);
Complex gamma_hat_value(const FrozenPoint& fz, double q, double tau);
// radial factor of the conormal: conormal_Q = <N_Q, d> * hat_dlp_radial
Complex gamma_hat_dlp_radial(const FrozenPoint& fz, double q, double tau);
Complex gamma_hat_quadrature(const FrozenPoint& fz, double q, double tau, double rel_tol = 1e-9);

// relative residual of eq. (chapman-kolmogorov); u, w use the first n coords
double chapman_kolmogorov_residual(double lambda, int n, const Vec3& u, const Vec3& w, double r,
                                   double s, double t);

enum class BoundSelector { Value, GradX, GradMixed, GradGrad, TimeDeriv, FracDeriv };

struct BoundFit {
  double C = 0.0;          // least-squares amplitude
  double c = 0.0;          // fitted Gaussian rate
  double slope_t = 0.0;    // fitted power of 1/t
  double slope_r = 0.0;    // fitted power of 1/r (FracDeriv only)
  double max_log_resid = 0.0;  // max positive log-residual against the LS fit
  double envelope_C = 0.0;     // C shifted so every sample is below the envelope
};

// least-squares fit of log|K| ~ log C - c r^2/t - slope_t log t (- slope_r log r)
// over the (r, t) grid; grid must span >= 2 decades in each variable
BoundFit bound_fit(BoundSelector sel, const Mat3& A, const std::vector<double>& r_grid,
                   const std::vector<double>& t_grid);

}  // namespace calorpot::kernels
