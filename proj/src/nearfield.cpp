#include "calorpot/nearfield.hpp"

namespace calorpot::nearfield {

double window_profile(double u) {
  if (u >= 1.0) return 0.0;
  double s = 1.0 - u * u;
  return s * s * s;
}

CapGeometry build_cap(const geometry::BoundaryMesh& mesh, int center, double eta, int nr, int na,
                      bool exclude_center) {
  CapGeometry cap;
  cap.eta = eta;
  const Vec3& P0 = mesh.nodes()[center];
  Vec3 omega0 = P0.normalized();
  Vec3 t1 = omega0.unitOrthogonal();
  Vec3 t2 = omega0.cross(t1);
  const double rho0 = P0.norm();
  const double phi_max = std::min(1.4 * eta / rho0, 1.2);

  const auto& rr = quad::gauss_legendre(nr);
  cap.pts.reserve(static_cast<size_t>(nr) * na);
  for (int ir = 0; ir < nr; ++ir) {
    double phi = 0.5 * phi_max * (rr.x[ir] + 1.0);
    double wphi = 0.5 * phi_max * rr.w[ir] * std::sin(phi);
    for (int ia = 0; ia < na; ++ia) {
      double psi = kTwoPi * ia / na;
      Vec3 dir =
          std::cos(phi) * omega0 + std::sin(phi) * (std::cos(psi) * t1 + std::sin(psi) * t2);
      Vec3 Q = mesh.surface_point(dir);
      double win = window_profile((Q - P0).norm() / eta);
      if (win == 0.0) continue;
      CapPoint p;
      p.Q = Q;
      p.n_out = mesh.outward_normal_at(dir);
      double jac = Q.squaredNorm() / p.n_out.dot(Q.normalized());
      p.jw = wphi * (kTwoPi / na) * jac * win;
      cap.pts.push_back(p);
    }
  }

  for (int j : mesh.nodes_within(P0, eta)) {
    if (exclude_center && j == center) continue;
    double win = window_profile((mesh.nodes()[j] - P0).norm() / eta);
    if (win > 0.0) {
      cap.near_idx.push_back(j);
      cap.near_w.push_back(win);
    }
  }
  return cap;
}

}  // namespace calorpot::nearfield
