#include "calorpot/potentials.hpp"

#include "calorpot/nearfield.hpp"

#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace calorpot::potentials {

using geometry::BoundaryMesh;

SpaceTimeDensity BoundaryOperator::apply(const SpaceTimeDensity& f) const {
  const int N = nodes(), K = grid.K;
  SpaceTimeDensity out(N, K);
  Eigen::VectorXd col(N), acc(N);
  for (int k = 0; k < K; ++k) {
    acc.setZero();
    for (int m = 0; m <= k; ++m) {
      col = f.values.col(k - m).matrix();
      acc.noalias() += lag[m] * col;
    }
    out.values.col(k) = acc.array();
  }
  return out;
}

Eigen::MatrixXd BoundaryOperator::monolithic(double diag_coeff) const {
  const int N = nodes(), K = grid.K;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N * K, N * K);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l <= k; ++l) {
      M.block(k * N, l * N, N, N) = lag[k - l];
      if (l == k) M.block(k * N, l * N, N, N).diagonal().array() += diag_coeff;
    }
  return M;
}

// polar-cap quadrature of the windowed near field around one node, reusable
// across time endpoints
struct PotentialEngine::TargetRow {
  std::vector<double> cap_q, cap_inv_sd, cap_pw;  // pw = pref * jacobian * window * quad weight
  std::vector<int> near_idx;                      // mesh nodes inside the window
  std::vector<double> near_w;                     // window value at those nodes
  std::vector<double> scratch;
};

PotentialEngine::PotentialEngine(const BoundaryMesh& mesh,
                                 const coefficients::DiffusionField& field,
                                 NearFieldPolicy policy)
    : mesh_(std::make_shared<BoundaryMesh>(mesh)),
      field_(std::make_shared<coefficients::DiffusionField>(field)),
      policy_(policy) {
  const int n = mesh.size();
  qx_.resize(n);
  qy_.resize(n);
  qz_.resize(n);
  w_ = mesh.weights();
  normals_ = mesh.normals();
  inv_a_.resize(n);
  inv_sd_.resize(n);
  frozen_.resize(n);
  a_mat_.resize(n);
  isotropic_ = field.isotropic();
  for (int j = 0; j < n; ++j) {
    const Vec3& Q = mesh.nodes()[j];
    qx_[j] = Q.x();
    qy_[j] = Q.y();
    qz_[j] = Q.z();
    a_mat_[j] = field(Q);
    frozen_[j] = kernels::FrozenPoint::from(a_mat_[j]);
    inv_sd_[j] = frozen_[j].inv_sd;
    inv_a_[j] = frozen_[j].isotropic ? frozen_[j].inv_a : 0.0;
    if (!frozen_[j].isotropic) isotropic_ = false;
  }
}

void PotentialEngine::pair_row(const Vec3& X, std::vector<double>& q, double floor_self) const {
  const int n = mesh_->size();
  q.resize(n);
  if (isotropic_) {
    batch::active().pair_q_iso(qx_.data(), qy_.data(), qz_.data(), inv_a_.data(), n, X.x(), X.y(),
                               X.z(), q.data());
  } else {
    for (int j = 0; j < n; ++j) q[j] = frozen_[j].q_of(X - mesh_->nodes()[j]);
  }
  if (floor_self > 0.0)
    for (double& v : q)
      if (v < floor_self) v = floor_self;
}

void PotentialEngine::prefactors(LayerKind kind, const Vec3& X, const Vec3& conormal_dir,
                                 std::span<const double> q, std::vector<double>& pref,
                                 int component) const {
  (void)q;
  const int n = mesh_->size();
  pref.resize(n);
  switch (kind) {
    case LayerKind::Single:
    case LayerKind::FracSingle:
      for (int j = 0; j < n; ++j) pref[j] = 1.0;
      break;
    case LayerKind::Double:
      for (int j = 0; j < n; ++j) pref[j] = normals_[j].dot(X - mesh_->nodes()[j]);
      break;
    case LayerKind::Kstar:
      for (int j = 0; j < n; ++j)
        pref[j] = -conormal_dir.dot(frozen_[j].inv_apply(X - mesh_->nodes()[j]));
      break;
    case LayerKind::GradSingle:
      for (int j = 0; j < n; ++j)
        pref[j] = -frozen_[j].inv_apply(X - mesh_->nodes()[j])[component];
      break;
  }
}

void PotentialEngine::radial_batch(LayerKind kind, std::span<const double> q, double t,
                                   double* out) const {
  radial_batch_arrays(kind, q.data(), inv_sd_.data(), static_cast<int>(q.size()), t, out);
}

void PotentialEngine::radial_batch_arrays(LayerKind kind, const double* q, const double* inv_sd,
                                          int n, double t, double* out) {
  const auto& k = batch::active();
  switch (kind) {
    case LayerKind::Single:
      k.slp_cumulative(q, inv_sd, n, t, out);
      break;
    case LayerKind::FracSingle:
      k.half_integral(q, inv_sd, n, t, out);
      break;
    default:
      k.dlp_radial(q, inv_sd, n, t, out);
      break;
  }
}

void PotentialEngine::build_near_rule(LayerKind kind, const Vec3& X, int center,
                                      const Vec3& conormal_dir, int component,
                                      bool exclude_center, TargetRow& row) const {
  const BoundaryMesh& mesh = *mesh_;
  const Vec3& P0 = mesh.nodes()[center];
  const double eta = policy_.radius_factor * mesh.local_spacing(center);
  Vec3 omega0 = P0.normalized();
  Vec3 t1 = omega0.unitOrthogonal();
  Vec3 t2 = omega0.cross(t1);
  const double rho0 = P0.norm();
  const double phi_max = std::min(1.4 * eta / rho0, 1.2);

  auto fill_points = [&](int nr, int na, TargetRow& r) {
    r.cap_q.clear();
    r.cap_inv_sd.clear();
    r.cap_pw.clear();
    const auto& rr = quad::gauss_legendre(nr);
    for (int ir = 0; ir < nr; ++ir) {
      double phi = 0.5 * phi_max * (rr.x[ir] + 1.0);
      double wphi = 0.5 * phi_max * rr.w[ir] * std::sin(phi);
      for (int ia = 0; ia < na; ++ia) {
        double psi = kTwoPi * ia / na;
        Vec3 dir = std::cos(phi) * omega0 +
                   std::sin(phi) * (std::cos(psi) * t1 + std::sin(psi) * t2);
        Vec3 Q = mesh.surface_point(dir);
        double wq = window_profile((Q - P0).norm() / eta);
        if (wq == 0.0) continue;
        Vec3 u = Q.normalized();
        Vec3 n_out = mesh.outward_normal_at(dir);
        double jac = Q.squaredNorm() / n_out.dot(u);
        kernels::FrozenPoint fz = kernels::FrozenPoint::from((*field_)(Q));
        Vec3 d = X - Q;
        double q = fz.q_of(d);
        if (q <= 0.0) continue;
        double pref = 1.0;
        switch (kind) {
          case LayerKind::Double:
            pref = (-n_out).dot(d);
            break;
          case LayerKind::Kstar:
            pref = -conormal_dir.dot(fz.inv_apply(d));
            break;
          case LayerKind::GradSingle:
            pref = -fz.inv_apply(d)[component];
            break;
          default:
            break;
        }
        r.cap_q.push_back(q);
        r.cap_inv_sd.push_back(fz.inv_sd);
        r.cap_pw.push_back(wphi * (kTwoPi / na) * jac * wq * pref);
      }
    }
  };

  // refine the rule on two probe endpoints (sharpest and saturated)
  auto probe = [&](const TargetRow& r, double t) {
    std::vector<double> vals(r.cap_q.size());
    radial_batch_arrays(kind, r.cap_q.data(), r.cap_inv_sd.data(),
                        static_cast<int>(r.cap_q.size()), t, vals.data());
    double acc = 0.0;
    for (size_t m = 0; m < vals.size(); ++m) acc += r.cap_pw[m] * vals[m];
    return acc;
  };
  const double t_sharp = 0.25 * eta * eta;  // kernel varies on sqrt(t) ~ eta/2
  const double t_long = 64.0 * eta * eta;
  int nr = 16, na = 12;
  fill_points(nr, na, row);
  double p1 = probe(row, t_sharp), p2 = probe(row, t_long);
  TargetRow refined;
  while (nr < policy_.max_radial) {
    nr *= 2;
    na = std::min(2 * na, 48);
    fill_points(nr, na, refined);
    double q1 = probe(refined, t_sharp), q2 = probe(refined, t_long);
    double s1 = std::max({std::abs(p1), std::abs(q1), 1e-300});
    double s2 = std::max({std::abs(p2), std::abs(q2), 1e-300});
    std::swap(row.cap_q, refined.cap_q);
    std::swap(row.cap_inv_sd, refined.cap_inv_sd);
    std::swap(row.cap_pw, refined.cap_pw);
    if (std::abs(q1 - p1) <= policy_.quad_tol * s1 && std::abs(q2 - p2) <= policy_.quad_tol * s2)
      break;
    p1 = q1;
    p2 = q2;
  }

  row.near_idx.clear();
  row.near_w.clear();
  for (int j : mesh.nodes_within(P0, eta)) {
    if (exclude_center && j == center) continue;
    double wq = window_profile((mesh.nodes()[j] - P0).norm() / eta);
    if (wq > 0.0) {
      row.near_idx.push_back(j);
      row.near_w.push_back(wq);
    }
  }
}

// windowed cap value at one endpoint, minus nothing (the node-sum part is
// subtracted by the caller from the already-computed source arrays)
double PotentialEngine::cap_value(LayerKind kind, const TargetRow& row, double t) const {
  const int m = static_cast<int>(row.cap_q.size());
  if (m == 0 || t <= 0.0) return 0.0;
  std::vector<double>& vals = const_cast<TargetRow&>(row).scratch;
  vals.resize(m);
  radial_batch_arrays(kind, row.cap_q.data(), row.cap_inv_sd.data(), m, t, vals.data());
  double acc = 0.0;
  for (int i = 0; i < m; ++i) acc += row.cap_pw[i] * vals[i];
  return acc;
}

double PotentialEngine::eval_impl(LayerKind kind, const SpaceTimeDensity& f, const TimeGrid& g,
                                  const Vec3& X, double t, int component) const {
  const int n = mesh_->size();
  if (f.nodes() != n) throw std::invalid_argument("potential eval: density/mesh size mismatch");
  if (t <= 0.0) return 0.0;

  int center = mesh_->nearest_node(X);
  double dist_center = (X - mesh_->nodes()[center]).norm();
  bool on_node = dist_center < 1e-13 * mesh_->diameter();
  Vec3 conorm_dir = a_mat_[center] * normals_[center];
  const double eta = policy_.radius_factor * mesh_->local_spacing(center);
  bool near_active = policy_.enabled && (on_node || dist_center < eta);

  std::vector<double> q;
  pair_row(X, q, 0.0);
  if (on_node) q[center] = 1.0;  // shielded; the self pair is excluded below
  std::vector<double> pref;
  prefactors(kind, X, conorm_dir, q, pref, component);

  TargetRow row;
  if (near_active) build_near_rule(kind, X, center, conorm_dir, component, on_node, row);

  const int k_max = std::min(g.K, static_cast<int>(std::ceil(t / g.dt - 1e-12)));
  std::vector<double> upper(n), lower(n);
  radial_batch(kind, q, t, upper.data());
  double cap_upper = near_active ? cap_value(kind, row, t) : 0.0;

  double acc = 0.0;
  for (int l = 1; l <= k_max; ++l) {
    double t_lo = std::max(t - l * g.dt, 0.0);
    radial_batch(kind, q, t_lo, lower.data());
    double slab = 0.0;
    for (int j = 0; j < n; ++j) {
      if (on_node && j == center) continue;
      slab += pref[j] * w_[j] * (upper[j] - lower[j]) * f.values(j, l - 1);
    }
    acc += slab;
    if (near_active) {
      double cap_lower = cap_value(kind, row, t_lo);
      double corr = cap_upper - cap_lower;
      for (size_t m = 0; m < row.near_idx.size(); ++m) {
        int j = row.near_idx[m];
        corr -= row.near_w[m] * pref[j] * w_[j] * (upper[j] - lower[j]);
      }
      acc += corr * f.values(center, l - 1);
      cap_upper = cap_lower;
    }
    std::swap(upper, lower);
  }
  return acc;
}

double PotentialEngine::single_layer(const SpaceTimeDensity& f, const TimeGrid& g, const Vec3& X,
                                     double t) const {
  return eval_impl(LayerKind::Single, f, g, X, t, 0);
}

double PotentialEngine::double_layer(const SpaceTimeDensity& f, const TimeGrid& g, const Vec3& X,
                                     double t) const {
  return eval_impl(LayerKind::Double, f, g, X, t, 0);
}

Vec3 PotentialEngine::grad_single_layer(const SpaceTimeDensity& f, const TimeGrid& g,
                                        const Vec3& X, double t) const {
  return Vec3(eval_impl(LayerKind::GradSingle, f, g, X, t, 0),
              eval_impl(LayerKind::GradSingle, f, g, X, t, 1),
              eval_impl(LayerKind::GradSingle, f, g, X, t, 2));
}

double PotentialEngine::frac_single_layer(const SpaceTimeDensity& f, const TimeGrid& g,
                                          const Vec3& X, double t) const {
  return eval_impl(LayerKind::FracSingle, f, g, X, t, 0);
}

double PotentialEngine::conormal_single_layer(const SpaceTimeDensity& f, const TimeGrid& g,
                                              const Vec3& X, double t) const {
  return eval_impl(LayerKind::Kstar, f, g, X, t, 0);
}

BoundaryOperator PotentialEngine::assemble(OperatorKind kind, const TimeGrid& grid,
                                           double collocation_shift) const {
  const int N = mesh_->size(), K = grid.K;
  LayerKind lk = LayerKind::Double;
  if (kind == OperatorKind::Kstar) lk = LayerKind::Kstar;
  if (kind == OperatorKind::STrace) lk = LayerKind::Single;
  if (kind == OperatorKind::FracSTrace) lk = LayerKind::FracSingle;

  BoundaryOperator op;
  op.kind = kind;
  op.grid = grid;
  op.collocation_shift = collocation_shift;
  op.lag.assign(K, Eigen::MatrixXd::Zero(N, N));

  std::vector<double> edges(K + 1);
  for (int e = 0; e <= K; ++e) edges[e] = (e - 1 + collocation_shift) * grid.dt;

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4)
#endif
  for (int i = 0; i < N; ++i) {
    const Vec3& X = mesh_->nodes()[i];
    Vec3 conorm_dir = a_mat_[i] * normals_[i];
    std::vector<double> q, pref;
    pair_row(X, q, 0.0);
    q[i] = 1.0;  // shielded; diagonal handled by the cap correction
    prefactors(lk, X, conorm_dir, q, pref, 0);

    TargetRow row;
    if (policy_.enabled) build_near_rule(lk, X, i, conorm_dir, 0, true, row);

    std::vector<double> upper(N), lower(N);
    double t0 = std::max(edges[0], 0.0);
    radial_batch(lk, q, t0, lower.data());
    double cap_lower = policy_.enabled ? cap_value(lk, row, t0) : 0.0;
    for (int m = 0; m < K; ++m) {
      radial_batch(lk, q, edges[m + 1], upper.data());
      for (int j = 0; j < N; ++j)
        op.lag[m](i, j) = (j == i) ? 0.0 : pref[j] * w_[j] * (upper[j] - lower[j]);
      if (policy_.enabled) {
        double cap_upper = cap_value(lk, row, edges[m + 1]);
        double corr = cap_upper - cap_lower;
        for (size_t s = 0; s < row.near_idx.size(); ++s) {
          int j = row.near_idx[s];
          corr -= row.near_w[s] * pref[j] * w_[j] * (upper[j] - lower[j]);
        }
        op.lag[m](i, i) += corr;
        cap_lower = cap_upper;
      }
      std::swap(upper, lower);
    }
  }
  return op;
}

SpaceTimeDensity PotentialEngine::conormal_slp_trace(const BoundaryOperator& kstar,
                                                     const SpaceTimeDensity& f, int side) const {
  if (kstar.kind != OperatorKind::Kstar)
    throw std::invalid_argument("conormal_slp_trace: needs a K* operator");
  SpaceTimeDensity out = kstar.apply(f);
  out.values += 0.5 * side * f.values;
  return out;
}

DifferenceReport difference_operator_norm(const BoundaryMesh& mesh,
                                          const coefficients::DiffusionField& A1,
                                          const coefficients::DiffusionField& A2,
                                          const TimeGrid& grid,
                                          const std::vector<SpaceTimeDensity>& probes) {
  for (const Vec3& Q : mesh.nodes())
    if ((A1(Q) - A2(Q)).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("difference_operator_norm: fields disagree on the boundary");

  // ||A1 - A2||_inf over radial volume samples
  double adiff = 0.0;
  const auto& rule = quad::gauss_legendre(12);
  for (const Vec3& Q : mesh.nodes())
    for (int ir = 0; ir < 12; ++ir) {
      double s = 0.5 * (rule.x[ir] + 1.0);
      adiff = std::max(adiff, (A1(s * Q) - A2(s * Q)).cwiseAbs().maxCoeff());
    }
  DifferenceReport rep;
  rep.a_diff_norm = adiff;
  if (adiff == 0.0) return rep;

  PotentialEngine e1(mesh, A1), e2(mesh, A2);
  BoundaryOperator s1 = e1.assemble(OperatorKind::STrace, grid);
  BoundaryOperator s2 = e2.assemble(OperatorKind::STrace, grid);
  BoundaryOperator f1 = e1.assemble(OperatorKind::FracSTrace, grid);
  BoundaryOperator f2 = e2.assemble(OperatorKind::FracSTrace, grid);

  double scale = std::sqrt(adiff);
  for (const SpaceTimeDensity& f : probes) {
    double fn = f.norm_l2(mesh, grid.dt);
    if (fn == 0.0) continue;
    SpaceTimeDensity dv(f.nodes(), f.steps());
    dv.values = s1.apply(f).values - s2.apply(f).values;
    rep.ratio_value = std::max(rep.ratio_value, dv.norm_l2(mesh, grid.dt) / (scale * fn));
    dv.values = f1.apply(f).values - f2.apply(f).values;
    rep.ratio_frac = std::max(rep.ratio_frac, dv.norm_l2(mesh, grid.dt) / (scale * fn));

    // gradient variant sampled at interior offsets of a node subset
    double acc = 0.0;
    int stride = std::max(1, mesh.size() / 32);
    for (int i = 0; i < mesh.size(); i += stride) {
      Vec3 X = mesh.nodes()[i] + 2.0 * mesh.local_spacing(i) * mesh.normals()[i];
      for (int k : {grid.K / 2, grid.K}) {
        double t = grid.midpoint(k - 1);
        Vec3 g1 = e1.grad_single_layer(f, grid, X, t);
        Vec3 g2 = e2.grad_single_layer(f, grid, X, t);
        acc += (g1 - g2).squaredNorm() * mesh.weights()[i] * grid.dt * stride;
      }
    }
    rep.ratio_grad = std::max(rep.ratio_grad, std::sqrt(acc) / (scale * fn));
  }
  return rep;
}

}  // namespace calorpot::potentials
