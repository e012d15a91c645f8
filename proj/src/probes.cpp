#include "calorpot/probes.hpp"

namespace calorpot::probes {

double harmonic(int idx, const Vec3& w) {
  switch (idx) {
    case 0: return 1.0;
    case 1: return w.x();
    case 2: return w.y();
    case 3: return w.z();
    case 4: return w.x() * w.y();
    case 5: return w.y() * w.z();
    case 6: return w.x() * w.z();
    case 7: return w.x() * w.x() - w.y() * w.y();
    case 8: return 3.0 * w.z() * w.z() - 1.0;
    default: throw std::out_of_range("harmonic index");
  }
}

double time_profile(int idx, double t, double T) {
  if (t <= 0.0) return 0.0;
  double s = std::min(t / T, 1.0);
  switch (idx) {
    case 0: {
      double v = std::sin(0.5 * kPi * s);
      return v * v;  // ramp 0 -> 1
    }
    case 1:
      return s * s * (3.0 - 2.0 * s);  // smoothstep ramp
    case 2: {
      double v = std::sin(kPi * s);
      return v * v;  // bump, zero at both ends
    }
    default: throw std::out_of_range("time profile index");
  }
}

potentials::SpaceTimeDensity seeded_density(const geometry::BoundaryMesh& mesh,
                                            const potentials::TimeGrid& grid,
                                            std::uint64_t seed) {
  SplitMix64 rng(seed);
  double c[9][3];
  for (auto& row : c)
    for (double& v : row) v = rng.next_signed();
  potentials::SpaceTimeDensity d(mesh.size(), grid.K);
  double T = grid.horizon();
  for (int k = 0; k < grid.K; ++k) {
    double t = grid.midpoint(k);
    double prof[3] = {time_profile(0, t, T), time_profile(1, t, T), time_profile(2, t, T)};
    for (int i = 0; i < mesh.size(); ++i) {
      Vec3 w = mesh.nodes()[i].normalized();
      double v = 0.0;
      for (int h = 0; h < 9; ++h)
        for (int p = 0; p < 3; ++p) v += c[h][p] * harmonic(h, w) * prof[p];
      d.values(i, k) = v;
    }
  }
  return d;
}

Eigen::VectorXcd seeded_boundary_density(const geometry::BoundaryMesh& mesh, std::uint64_t seed) {
  SplitMix64 rng(seed);
  double cr[9], ci[9];
  for (int h = 0; h < 9; ++h) {
    cr[h] = rng.next_signed();
    ci[h] = rng.next_signed();
  }
  Eigen::VectorXcd g(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) {
    Vec3 w = mesh.nodes()[i].normalized();
    double re = 0.0, im = 0.0;
    for (int h = 0; h < 9; ++h) {
      re += cr[h] * harmonic(h, w);
      im += ci[h] * harmonic(h, w);
    }
    g[i] = Complex(re, im);
  }
  return g;
}

double SourcePointSolution::value(const Vec3& X, double t) const {
  if (t <= 0.0) return 0.0;
  return kernels::cumulative::gamma_value(fz_.q_of(X - X0_), fz_.inv_sd, t);
}

Vec3 SourcePointSolution::gradient(const Vec3& X, double t) const {
  if (t <= 0.0) return Vec3::Zero();
  Vec3 d = X - X0_;
  double g = kernels::cumulative::gamma_value(fz_.q_of(d), fz_.inv_sd, t);
  return g * (-fz_.inv_apply(d) / (2.0 * t));
}

double SourcePointSolution::conormal(const Vec3& X, const Vec3& N, double t) const {
  return gradient(X, t).dot(a_ * N);
}

double SourcePointSolution::dt(const Vec3& X, double t) const {
  if (t <= 0.0) return 0.0;
  double q = fz_.q_of(X - X0_);
  double g = kernels::cumulative::gamma_value(q, fz_.inv_sd, t);
  return g * (-1.5 / t + q / (4.0 * t * t));
}

double SourcePointSolution::dhalf(const Vec3& X, double t) const {
  if (t <= 0.0) return 0.0;
  double q = fz_.q_of(X - X0_);
  // d/dt of the closed-form half integral 2 (4pi)^{-3/2} e^{-q/4t} / sqrt(q t)
  const double c = 2.0 / (kFourPi * std::sqrt(kFourPi));
  double base = c * fz_.inv_sd * std::exp(-q / (4.0 * t)) / std::sqrt(q);
  return base * std::pow(t, -1.5) * (q / (4.0 * t) - 0.5);
}

double SourcePointSolution::half_integral(const Vec3& X, double t) const {
  if (t <= 0.0) return 0.0;
  return kernels::cumulative::half_integral(fz_.q_of(X - X0_), fz_.inv_sd, t);
}

}  // namespace calorpot::probes
