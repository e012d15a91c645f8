#pragma once

#include "calorpot/geometry.hpp"
#include "calorpot/numeric.hpp"

#include <iosfwd>

namespace calorpot::potentials {

// uniform time grid: K slabs of width dt on (0, T], slab k = ((k-1)dt, k dt]
struct TimeGrid {
  int K = 64;
  double dt = 1.0 / 64.0;
  double horizon() const { return K * dt; }
  double midpoint(int k) const { return (k + 0.5) * dt; }  // k in [0, K)
  double edge(int k) const { return k * dt; }
};

// real boundary density f(Q_i, t_k), k = 1..K; column k-1 holds the value on
// slab k (piecewise constant in time, implicitly zero for t <= 0)
class SpaceTimeDensity {
 public:
  SpaceTimeDensity() = default;
  SpaceTimeDensity(int nodes, int steps) { values = Eigen::ArrayXXd::Zero(nodes, steps); }
  int nodes() const { return static_cast<int>(values.rows()); }
  int steps() const { return static_cast<int>(values.cols()); }
  double& operator()(int i, int k) { return values(i, k); }
  double operator()(int i, int k) const { return values(i, k); }

  Eigen::ArrayXXd values;  // nodes x K

  // discrete L2(S_T) norm with surface weights and dt
  double norm_l2(const geometry::BoundaryMesh& mesh, double dt) const;

  void write_csv(std::ostream& os) const;  // node_id,k,value
  static SpaceTimeDensity read_csv(std::istream& is);
};

// complex boundary density on a DFT frequency grid
class FrequencyDensity {
 public:
  FrequencyDensity() = default;
  FrequencyDensity(int nodes, int bins) { values = Eigen::ArrayXXcd::Zero(nodes, bins); }
  int nodes() const { return static_cast<int>(values.rows()); }
  int bins() const { return static_cast<int>(values.cols()); }
  Eigen::ArrayXXcd values;  // nodes x bins
};

}  // namespace calorpot::potentials
