#include "calorpot/kernels.hpp"

#include <Eigen/Cholesky>

namespace calorpot::kernels {

FrozenPoint FrozenPoint::from(const Mat3& A) {
  Eigen::LLT<Mat3> llt(A);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("FrozenPoint: A is not SPD");
  FrozenPoint fz;
  // detect scalar multiples of the identity for the fast path
  double a = A(0, 0);
  if ((A - a * Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-14 * std::abs(a)) {
    fz.isotropic = true;
    fz.inv_a = 1.0 / a;
    fz.inv_sd = std::pow(a, -1.5);
  } else {
    fz.isotropic = false;
    fz.inv_mat = A.inverse();
    fz.inv_sd = 1.0 / std::sqrt(A.determinant());
  }
  return fz;
}

FrozenPoint FrozenPoint::from_scalar(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("FrozenPoint: a must be positive");
  FrozenPoint fz;
  fz.isotropic = true;
  fz.inv_a = 1.0 / a;
  fz.inv_sd = std::pow(a, -1.5);
  return fz;
}

namespace cumulative {

double slp(double q, double inv_sd, double t) {
  if (t <= 0.0) return 0.0;
  double sq = std::sqrt(q);
  return std::erfc(sq / (2.0 * std::sqrt(t))) * inv_sd / (kFourPi * sq);
}

double dlp_radial(double q, double inv_sd, double t) {
  if (t <= 0.0) return 0.0;
  double sq = std::sqrt(q);
  double w = sq / (2.0 * std::sqrt(t));
  double bracket = std::erfc(w) + (2.0 * kInvSqrtPi) * w * std::exp(-w * w);
  return inv_sd * bracket / (kFourPi * q * sq);
}

double half_integral(double q, double inv_sd, double t) {
  if (t <= 0.0) return 0.0;
  const double c = 2.0 / (kFourPi * std::sqrt(kFourPi));  // 2 (4 pi)^{-3/2}
  return c * inv_sd * std::exp(-q / (4.0 * t)) / std::sqrt(q * t);
}

double gamma_value(double q, double inv_sd, double t) {
  if (t <= 0.0) return 0.0;
  return std::pow(kFourPi * t, -1.5) * inv_sd * std::exp(-q / (4.0 * t));
}

}  // namespace cumulative

KernelJet gamma_const(const Mat3& A, const Vec3& X, const Vec3& Y, double t, bool with_dhalf) {
  if (!(t > 0.0)) throw std::invalid_argument("gamma_const: t must be positive");
  FrozenPoint fz = FrozenPoint::from(A);
  Vec3 d = X - Y;
  double q = fz.q_of(d);
  KernelJet jet;
  jet.value = cumulative::gamma_value(q, fz.inv_sd, t);
  Vec3 bd = fz.inv_apply(d);
  jet.grad_x = jet.value * (-bd / (2.0 * t));
  jet.grad_y = -jet.grad_x;
  jet.dt = jet.value * (-1.5 / t + q / (4.0 * t * t));
  Mat3 B = fz.isotropic ? Mat3(fz.inv_a * Mat3::Identity()) : fz.inv_mat;
  jet.mixed_xy = jet.value * (B / (2.0 * t) - bd * bd.transpose() / (4.0 * t * t));
  if (with_dhalf) jet.dhalf = frac_half_dt(fz, q, t);
  return jet;
}

KernelJet gamma_frozen(const coefficients::DiffusionField& A, const Vec3& X, const Vec3& Y,
                       double t, bool with_dhalf) {
  return gamma_const(A(Y), X, Y, t, with_dhalf);
}

double gamma_dt2(const FrozenPoint& fz, double q, double t) {
  double g = cumulative::gamma_value(q, fz.inv_sd, t);
  double a1 = -1.5 / t + q / (4.0 * t * t);
  double a2 = 1.5 / (t * t) - q / (2.0 * t * t * t);
  return g * (a1 * a1 + a2);
}

double levi_correction(const coefficients::DiffusionField& A, const Vec3& X, const Vec3& Y,
                       double t, int depth, double rel_tol) {
  if (depth < 0) throw std::invalid_argument("levi_correction: depth must be >= 0");
  if (!(t > 0.0)) throw std::invalid_argument("levi_correction: t must be positive");
  if (depth == 0) return 0.0;

  Mat3 AY = A(Y);
  FrozenPoint fz = FrozenPoint::from(AY);

  auto grad_gamma = [&](const Vec3& d, double s) -> Vec3 {
    double q = fz.q_of(d);
    double g = cumulative::gamma_value(q, fz.inv_sd, s);
    return g * (-fz.inv_apply(d) / (2.0 * s));
  };

  auto evaluate = [&](int nt, int nz) -> double {
    // u = t sin^2(theta) resolves the endpoint concentrations of the bridge
    const auto& rt = quad::gauss_legendre(nt);
    const auto& rz = quad::gauss_legendre(nz);
    Vec3 center = 0.5 * (X + Y);
    // box covering the diffusion bridge; a <= 1/mu bounds the diffusivity
    double half = 0.5 * (X - Y).norm() + 5.0 * std::sqrt(t / A.mu());
    double acc = 0.0;
    for (int it = 0; it < nt; ++it) {
      double theta = 0.25 * kPi * (rt.x[it] + 1.0);
      double u = t * std::sin(theta) * std::sin(theta);
      double du = t * 2.0 * std::sin(theta) * std::cos(theta) * 0.25 * kPi * rt.w[it];
      if (u <= 0.0 || u >= t) continue;
      double inner = 0.0;
      for (int iz = 0; iz < nz; ++iz)
        for (int jz = 0; jz < nz; ++jz)
          for (int kz = 0; kz < nz; ++kz) {
            Vec3 Z = center + half * Vec3(rz.x[iz], rz.x[jz], rz.x[kz]);
            double jac = half * half * half * rz.w[iz] * rz.w[jz] * rz.w[kz];
            Vec3 g1 = grad_gamma(X - Z, u);
            Vec3 g2 = grad_gamma(Z - Y, t - u);
            inner += jac * g1.dot((AY - A(Z)) * g2);
          }
      acc += du * inner;
    }
    return acc;
  };

  double coarse = evaluate(10, 12);
  double fine = evaluate(14, 18);
  double scale = std::max({std::abs(coarse), std::abs(fine), 1e-300});
  if (std::abs(fine - coarse) > std::max(rel_tol * scale, 1e-14))
    throw std::runtime_error("levi_correction: quadrature did not converge");
  return fine;
}

double frac_half_dt(const FrozenPoint& fz, double q, double t) {
  if (!(q > 0.0)) throw std::invalid_argument("frac_half_dt: requires X != Y");
  if (!(t > 0.0)) throw std::invalid_argument("frac_half_dt: t must be positive");
  auto gamma_s = [&](double s) { return cumulative::gamma_value(q, fz.inv_sd, s); };
  auto dgamma_s = [&](double s) {
    return gamma_s(s) * (-1.5 / s + q / (4.0 * s * s));
  };
  double term0 = gamma_s(0.5 * t) / std::sqrt(0.5 * t);
  double term1 = quad::integrate_adaptive(
      [&](double s) { return gamma_s(s) / (2.0 * std::pow(t - s, 1.5)); }, 0.0, 0.5 * t, 1e-10,
      20);
  // s = t - u^2 removes the 1/sqrt(t-s) endpoint
  double term2 = quad::integrate_adaptive(
      [&](double u) { return dgamma_s(t - u * u) * 2.0; }, 0.0, std::sqrt(0.5 * t), 1e-10, 20);
  return (term0 + term1 + term2) / kSqrtPi;
}

double frac_half_dt(const coefficients::DiffusionField& A, const Vec3& X, const Vec3& Y,
                    double t) {
  FrozenPoint fz = FrozenPoint::from(A(Y));
  return frac_half_dt(fz, fz.q_of(X - Y), t);
}

Complex gamma_hat_value(const FrozenPoint& fz, double q, double tau) {
  if (!(q > 0.0)) throw std::invalid_argument("gamma_hat: requires X != Y");
  double sq = std::sqrt(q);
  // z = sqrt(i tau), principal branch (Re z > 0)
  double m = std::sqrt(0.5 * std::abs(tau));
  Complex z(m, tau >= 0.0 ? m : -m);
  return std::exp(-z * sq) * fz.inv_sd / (kFourPi * sq);
}

Complex gamma_hat_dlp_radial(const FrozenPoint& fz, double q, double tau) {
  if (!(q > 0.0)) throw std::invalid_argument("gamma_hat: requires X != Y");
  double sq = std::sqrt(q);
  double m = std::sqrt(0.5 * std::abs(tau));
  Complex z(m, tau >= 0.0 ? m : -m);
  return (1.0 + z * sq) * std::exp(-z * sq) * fz.inv_sd / (kFourPi * q * sq);
}

Complex gamma_hat_quadrature(const FrozenPoint& fz, double q, double tau, double rel_tol) {
  if (!(q > 0.0)) throw std::invalid_argument("gamma_hat_quadrature: requires X != Y");
  auto g = [&](double t) { return cumulative::gamma_value(q, fz.inv_sd, t); };
  auto dg = [&](double t) { return g(t) * (-1.5 / t + q / (4.0 * t * t)); };

  double T1 = std::max({4.0 * q, 1.0, 60.0 / (1.0 + std::abs(tau))});
  double re = quad::integrate_adaptive([&](double t) { return g(t) * std::cos(tau * t); }, 0.0,
                                       T1, rel_tol, 24, 18);
  double im = quad::integrate_adaptive([&](double t) { return -g(t) * std::sin(tau * t); }, 0.0,
                                       T1, rel_tol, 24, 18);
  Complex head(re, im);
  Complex tail;
  if (tau == 0.0) {
    // exact algebraic tail: int_T^inf Gamma = Gamma_tilde - int_0^T Gamma
    tail = fz.inv_sd / (kFourPi * std::sqrt(q)) - cumulative::slp(q, fz.inv_sd, T1);
  } else {
    // integration-by-parts asymptotics with the exact time-derivative jets
    Complex itau(0.0, tau);
    Complex phase = std::exp(-itau * T1);
    double g0 = g(T1), g1 = dg(T1), g2 = gamma_dt2(fz, q, T1);
    tail = phase * (g0 / itau + g1 / (itau * itau) + g2 / (itau * itau * itau));
  }
  return head + tail;
}

FrequencyJet gamma_hat(const coefficients::DiffusionField& A, const Vec3& X, const Vec3& Y,
                       double tau, HatMode mode) {
  FrozenPoint fz = FrozenPoint::from(A(Y));
  Vec3 d = X - Y;
  double q = fz.q_of(d);
  FrequencyJet jet;
  if (mode == HatMode::ClosedForm) {
    jet.value = gamma_hat_value(fz, q, tau);
  } else {
    jet.value = gamma_hat_quadrature(fz, q, tau);
  }
  Complex radial = gamma_hat_dlp_radial(fz, q, tau);
  Vec3 bd = fz.inv_apply(d);
  jet.grad_x = -radial * bd.cast<Complex>();
  jet.grad_y = radial * bd.cast<Complex>();
  return jet;
}

double chapman_kolmogorov_residual(double lambda, int n, const Vec3& u, const Vec3& w, double r,
                                   double s, double t) {
  if (!(r < s && s < t)) throw std::invalid_argument("chapman_kolmogorov: need r < s < t");
  if (!(lambda > 0.0)) throw std::invalid_argument("chapman_kolmogorov: lambda > 0");
  if (n < 1 || n > 3) throw std::invalid_argument("chapman_kolmogorov: n in {1,2,3}");

  double ts = t - s, sr = s - r, tr = t - r;
  double sigma = std::sqrt(std::max(ts, sr) / lambda);
  int npts = (n == 1) ? 96 : 48;
  const auto& rule = quad::gauss_legendre(npts);

  // integration box covering both Gaussian factors
  double lo[3], hi[3];
  for (int c = 0; c < n; ++c) {
    lo[c] = std::min(u[c], w[c]) - 12.0 * sigma;
    hi[c] = std::max(u[c], w[c]) + 12.0 * sigma;
  }
  auto integrand = [&](const double* v) {
    double d1 = 0.0, d2 = 0.0;
    for (int c = 0; c < n; ++c) {
      d1 += (w[c] - v[c]) * (w[c] - v[c]);
      d2 += (v[c] - u[c]) * (v[c] - u[c]);
    }
    return std::exp(-lambda * d1 / (2.0 * ts)) * std::exp(-lambda * d2 / (2.0 * sr));
  };

  double lhs = 0.0;
  if (n == 1) {
    for (int i = 0; i < npts; ++i) {
      double v[3] = {0.5 * (lo[0] + hi[0]) + 0.5 * (hi[0] - lo[0]) * rule.x[i], 0, 0};
      lhs += 0.5 * (hi[0] - lo[0]) * rule.w[i] * integrand(v);
    }
  } else if (n == 2) {
    for (int i = 0; i < npts; ++i)
      for (int j = 0; j < npts; ++j) {
        double v[3] = {0.5 * (lo[0] + hi[0]) + 0.5 * (hi[0] - lo[0]) * rule.x[i],
                       0.5 * (lo[1] + hi[1]) + 0.5 * (hi[1] - lo[1]) * rule.x[j], 0};
        lhs += 0.25 * (hi[0] - lo[0]) * (hi[1] - lo[1]) * rule.w[i] * rule.w[j] * integrand(v);
      }
  } else {
    for (int i = 0; i < npts; ++i)
      for (int j = 0; j < npts; ++j)
        for (int k = 0; k < npts; ++k) {
          double v[3] = {0.5 * (lo[0] + hi[0]) + 0.5 * (hi[0] - lo[0]) * rule.x[i],
                         0.5 * (lo[1] + hi[1]) + 0.5 * (hi[1] - lo[1]) * rule.x[j],
                         0.5 * (lo[2] + hi[2]) + 0.5 * (hi[2] - lo[2]) * rule.x[k]};
          lhs += 0.125 * (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]) * rule.w[i] *
                 rule.w[j] * rule.w[k] * integrand(v);
        }
  }

  double du2 = 0.0;
  for (int c = 0; c < n; ++c) du2 += (w[c] - u[c]) * (w[c] - u[c]);
  double rhs = std::pow(kTwoPi, 0.5 * n) * std::pow(ts * sr / (lambda * tr), 0.5 * n) *
               std::exp(-lambda * du2 / (2.0 * tr));
  return std::abs(lhs - rhs) / std::abs(rhs);
}

BoundFit bound_fit(BoundSelector sel, const Mat3& A, const std::vector<double>& r_grid,
                   const std::vector<double>& t_grid) {
  auto decades = [](const std::vector<double>& g) {
    return std::log10(g.back() / g.front());
  };
  if (r_grid.size() < 3 || t_grid.size() < 3 || decades(r_grid) < 2.0 || decades(t_grid) < 2.0)
    throw std::invalid_argument("bound_fit: grid must span two decades in r and t");

  const bool with_r = (sel == BoundSelector::FracDeriv);
  std::vector<Eigen::Vector4d> rows;
  std::vector<double> rhs;
  FrozenPoint fz = FrozenPoint::from(A);
  for (double r : r_grid)
    for (double t : t_grid) {
      Vec3 X(r, 0, 0), Y(0, 0, 0);
      double v = 0.0;
      KernelJet jet = gamma_const(A, X, Y, t);
      switch (sel) {
        case BoundSelector::Value: v = std::abs(jet.value); break;
        case BoundSelector::GradX: v = jet.grad_x.norm(); break;
        case BoundSelector::GradMixed: v = jet.mixed_xy.norm(); break;
        case BoundSelector::GradGrad: v = jet.mixed_xy.norm(); break;
        case BoundSelector::TimeDeriv: v = std::abs(jet.dt); break;
        case BoundSelector::FracDeriv: v = std::abs(frac_half_dt(fz, fz.q_of(X - Y), t)); break;
      }
      if (v <= 0.0 || !std::isfinite(v)) continue;
      rows.push_back({1.0, -r * r / t, -std::log(t), with_r ? -std::log(r) : 0.0});
      rhs.push_back(std::log(v));
    }

  int cols = with_r ? 4 : 3;
  Eigen::MatrixXd M(rows.size(), cols);
  Eigen::VectorXd b(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < cols; ++j) M(i, j) = rows[i][j];
    b[i] = rhs[i];
  }
  Eigen::VectorXd sol = M.colPivHouseholderQr().solve(b);

  BoundFit fit;
  fit.C = std::exp(sol[0]);
  fit.c = sol[1];
  fit.slope_t = sol[2];
  fit.slope_r = with_r ? sol[3] : 0.0;
  double max_resid = 0.0;
  for (size_t i = 0; i < rows.size(); ++i) {
    double pred = 0.0;
    for (int j = 0; j < cols; ++j) pred += M(i, j) * sol[j];
    max_resid = std::max(max_resid, b[i] - pred);
  }
  fit.max_log_resid = max_resid;
  fit.envelope_C = fit.C * std::exp(max_resid);
  return fit;
}

}  // namespace calorpot::kernels
