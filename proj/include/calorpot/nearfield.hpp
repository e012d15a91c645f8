#pragma once

#include "calorpot/geometry.hpp"
#include "calorpot/numeric.hpp"

#include <vector>

namespace calorpot::nearfield {

// C^2 radial window on the cap, 1 at the center, 0 at the rim
double window_profile(double u);

struct CapPoint {
  Vec3 Q;       // surface point
  Vec3 n_out;   // outward unit normal there
  double jw;    // area element * window * quadrature weight
};

// polar rule on the exact chart around mesh node `center`, windowed by
// window_profile(|Q - P0| / eta); also collects the mesh nodes under the window
struct CapGeometry {
  std::vector<CapPoint> pts;
  std::vector<int> near_idx;
  std::vector<double> near_w;
  double eta = 0.0;
};

CapGeometry build_cap(const geometry::BoundaryMesh& mesh, int center, double eta, int nr, int na,
                      bool exclude_center);

}  // namespace calorpot::nearfield
