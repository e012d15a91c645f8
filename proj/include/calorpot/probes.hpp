#pragma once

#include "calorpot/density.hpp"
#include "calorpot/geometry.hpp"
#include "calorpot/kernels.hpp"

namespace calorpot::probes {

// real spherical harmonics up to degree 2 (unnormalized basis), smooth
// low-order probes so tolerance targets are resolution-independent
double harmonic(int idx, const Vec3& omega);  // idx in [0, 9)

// smooth time profiles vanishing at t=0 together with their first derivative
double time_profile(int idx, double t, double T);  // idx in [0, 3)

// seeded low-order probe density sampled at the slab midpoints
potentials::SpaceTimeDensity seeded_density(const geometry::BoundaryMesh& mesh,
                                            const potentials::TimeGrid& grid, std::uint64_t seed);

// single-frequency boundary probe g(Q) from seeded harmonics
Eigen::VectorXcd seeded_boundary_density(const geometry::BoundaryMesh& mesh, std::uint64_t seed);

// off-domain source-point caloric reference: u(X,t) = Gamma_{aI}(X - X0, t),
// caloric in Omega with u(X,0) = 0 whenever X0 lies outside the closure
class SourcePointSolution {
 public:
  SourcePointSolution(const Vec3& X0, double a) : X0_(X0), fz_(kernels::FrozenPoint::from_scalar(a)), a_(a) {}
  double value(const Vec3& X, double t) const;
  Vec3 gradient(const Vec3& X, double t) const;
  double conormal(const Vec3& X, const Vec3& N, double t) const;  // <grad, aN>
  double dt(const Vec3& X, double t) const;
  double dhalf(const Vec3& X, double t) const;  // exact D_t^{1/2} of the Gaussian
  double half_integral(const Vec3& X, double t) const;
  const Vec3& source() const { return X0_; }
  double diffusivity() const { return a_; }

 private:
  Vec3 X0_;
  kernels::FrozenPoint fz_;
  double a_;
};

// density sampled from an analytic function f(Q, t) at slab midpoints
template <typename F>
potentials::SpaceTimeDensity sample_density(const geometry::BoundaryMesh& mesh,
                                            const potentials::TimeGrid& grid, F&& f) {
  potentials::SpaceTimeDensity d(mesh.size(), grid.K);
  for (int k = 0; k < grid.K; ++k) {
    double t = grid.midpoint(k);
    for (int i = 0; i < mesh.size(); ++i) d.values(i, k) = f(mesh.nodes()[i], t);
  }
  return d;
}

}  // namespace calorpot::probes
