#pragma once

#include "calorpot/batch.hpp"
#include "calorpot/coefficients.hpp"
#include "calorpot/density.hpp"
#include "calorpot/geometry.hpp"
#include "calorpot/kernels.hpp"

#include <memory>
#include <span>

namespace calorpot::potentials {

enum class LayerKind { Single, Double, Kstar, GradSingle, FracSingle };
enum class OperatorKind { K, Kstar, STrace, FracSTrace };

// causal block-lower-triangular operator, Toeplitz in the time lag
class BoundaryOperator {
 public:
  std::vector<Eigen::MatrixXd> lag;  // lag[m]: N x N, quadrature weights folded in
  OperatorKind kind = OperatorKind::K;
  TimeGrid grid;
  double collocation_shift = 0.5;  // theta: block m integrates ((m-1+theta)dt, (m+theta)dt]

  int nodes() const { return lag.empty() ? 0 : static_cast<int>(lag[0].rows()); }
  SpaceTimeDensity apply(const SpaceTimeDensity& f) const;
  // dense (N K) x (N K) block realization, for the structural oracle
  Eigen::MatrixXd monolithic(double diag_coeff) const;
};

struct NearFieldPolicy {
  double radius_factor = 3.5;   // eta_i = radius_factor * sqrt(w_i)
  double quad_tol = 1e-8;       // cap-quadrature doubling tolerance
  int max_radial = 256;
  bool enabled = true;
};

// Nystrom engine for the frozen-coefficient parabolic layer potentials:
// exact slab integration in time (erfc telescoping), windowed polar-cap
// correction of the near field on the exact chart.
class PotentialEngine {
 public:
  PotentialEngine(const geometry::BoundaryMesh& mesh, const coefficients::DiffusionField& field,
                  NearFieldPolicy policy = {});

  const geometry::BoundaryMesh& mesh() const { return *mesh_; }
  const coefficients::DiffusionField& field() const { return *field_; }

  // potential evaluations at arbitrary (X, t); density is pc on the grid slabs
  double single_layer(const SpaceTimeDensity& f, const TimeGrid& g, const Vec3& X, double t) const;
  double double_layer(const SpaceTimeDensity& f, const TimeGrid& g, const Vec3& X, double t) const;
  Vec3 grad_single_layer(const SpaceTimeDensity& f, const TimeGrid& g, const Vec3& X,
                         double t) const;
  double frac_single_layer(const SpaceTimeDensity& f, const TimeGrid& g, const Vec3& X,
                           double t) const;
  // conormal of the single layer at X taken in the direction field of the
  // node nearest to X (for non-tangential extrapolation)
  double conormal_single_layer(const SpaceTimeDensity& f, const TimeGrid& g, const Vec3& X,
                               double t) const;

  BoundaryOperator assemble(OperatorKind kind, const TimeGrid& grid,
                            double collocation_shift = 0.5) const;

  // boundary traces by the jump formulas (side +1 interior, -1 exterior)
  SpaceTimeDensity conormal_slp_trace(const BoundaryOperator& kstar, const SpaceTimeDensity& f,
                                      int side) const;

 private:
  struct TargetRow;
  void pair_row(const Vec3& X, std::vector<double>& q, double floor_self) const;
  void prefactors(LayerKind kind, const Vec3& X, const Vec3& conormal_dir,
                  std::span<const double> q, std::vector<double>& pref, int component) const;
  // cumulative radial profile at all sources for one endpoint
  void radial_batch(LayerKind kind, std::span<const double> q, double t, double* out) const;
  static void radial_batch_arrays(LayerKind kind, const double* q, const double* inv_sd, int n,
                                  double t, double* out);
  void build_near_rule(LayerKind kind, const Vec3& X, int center, const Vec3& conormal_dir,
                       int component, bool exclude_center, TargetRow& row) const;
  double cap_value(LayerKind kind, const TargetRow& row, double t) const;
  double eval_impl(LayerKind kind, const SpaceTimeDensity& f, const TimeGrid& g, const Vec3& X,
                   double t, int component) const;

  std::shared_ptr<const geometry::BoundaryMesh> mesh_;
  std::shared_ptr<const coefficients::DiffusionField> field_;
  NearFieldPolicy policy_;

  // SoA frozen source data
  std::vector<double> qx_, qy_, qz_, w_;
  std::vector<Vec3> normals_;
  std::vector<double> inv_a_, inv_sd_;
  std::vector<kernels::FrozenPoint> frozen_;
  std::vector<Mat3> a_mat_;  // A(Q_j)
  bool isotropic_ = true;
};

// ratio report for the two-coefficient difference bound
struct DifferenceReport {
  double a_diff_norm = 0.0;  // ||A1 - A2||_inf over volume samples
  double ratio_value = 0.0;  // ||(S1-S2)f|| / (||A1-A2||^{1/2} ||f||), max over probes
  double ratio_grad = 0.0;
  double ratio_frac = 0.0;
};

DifferenceReport difference_operator_norm(const geometry::BoundaryMesh& mesh,
                                          const coefficients::DiffusionField& A1,
                                          const coefficients::DiffusionField& A2,
                                          const TimeGrid& grid,
                                          const std::vector<SpaceTimeDensity>& probes);

}  // namespace calorpot::potentials
