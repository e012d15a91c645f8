#pragma once

#include "calorpot/numeric.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace calorpot::geometry {

enum class ShapeKind { Sphere, PerturbedSphere, RoundedBox };
enum class Side { Interior, Exterior };

// All built-in domains are star-shaped about the origin with an analytic
// radial function rho(omega), so containment and surface evaluation are
// exact and every cone/orientation test has an oracle.
struct ShapeSpec {
  ShapeKind kind = ShapeKind::Sphere;
  double radius = 1.0;
  double amplitude = 0.0;   // perturbed sphere: rho = R*(1 + amplitude*cos(3*theta))
  double p_exponent = 4.0;  // rounded box: p-norm ball |X|_p = R
  double declared_lipschitz = 1.5;

  double rho(const Vec3& omega) const;   // |omega| = 1
  Vec3 surface_point(const Vec3& omega) const;
  Vec3 outward_normal(const Vec3& omega) const;  // unit, via implicit gradient
  bool contains(const Vec3& X) const;
};

struct ConeParams {
  double aperture = 0.5;  // a > 0 in |X-P| < (1+a) dist(X, dOmega)
};

struct SurfacePatch {
  int base_face = 0;
  bool is_graph = true;
  double lipschitz_bound = 0.0;  // declared M
  // chart: parameter square [0,1]^2 -> R^3 (square folded onto the face)
  Vec3 chart(double u, double v) const;

  ShapeSpec shape;
  Vec3 corner[3];  // unit directions of the base icosahedron face
};

class BoundaryMesh {
 public:
  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<Vec3>& nodes() const { return nodes_; }
  const std::vector<Vec3>& normals() const { return normals_; }  // inner, unit
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<int>& patch_of() const { return patch_of_; }
  const std::vector<SurfacePatch>& patches() const { return patches_; }
  const ShapeSpec& shape() const { return shape_; }
  int level() const { return level_; }
  double diameter() const { return r0_; }
  double total_weight() const;
  // representative spacing near node i
  double local_spacing(int i) const { return std::sqrt(weights_[i]); }

  bool contains(const Vec3& X) const { return shape_.contains(X); }
  // exact surface point in direction omega (need not be normalized)
  Vec3 surface_point(const Vec3& omega) const;
  Vec3 outward_normal_at(const Vec3& omega) const;

  // discrete distance: min over quadrature nodes, one level of local
  // refinement around the best node
  double distance_to_boundary(const Vec3& X) const;
  int nearest_node(const Vec3& X) const;

  // nodes within |Q_j - Q_i| <= radius (brute force, cached adjacency not kept)
  std::vector<int> nodes_within(const Vec3& X, double radius) const;

  void write_table(std::ostream& os) const;
  static BoundaryMesh read_table(std::istream& is);

  friend BoundaryMesh build_mesh(const ShapeSpec& spec, int level);

 private:
  ShapeSpec shape_;
  int level_ = 0;
  double r0_ = 0.0;
  std::vector<Vec3> nodes_;
  std::vector<Vec3> normals_;
  std::vector<double> weights_;
  std::vector<int> patch_of_;
  std::vector<SurfacePatch> patches_;
};

BoundaryMesh build_mesh(const ShapeSpec& spec, int level);
BoundaryMesh build_sphere_mesh(double radius, int level);
// Validates the sampled per-patch Lipschitz quotient against the declared
// bound and throws std::invalid_argument when exceeded.
BoundaryMesh build_graph_mesh(const ShapeSpec& spec, int level);

// X = Q_i +/- delta N_i along the cone axis; throws std::runtime_error naming
// the offending delta when the (1+a) cone inequality fails against the
// discrete distance.
std::vector<Vec3> nontangential_points(const BoundaryMesh& mesh, int node,
                                       const ConeParams& cone,
                                       const std::vector<double>& deltas,
                                       Side side);

double distance_to_boundary(const BoundaryMesh& mesh, const Vec3& X);

// max over sampled parameter pairs of the graph quotient |h(a)-h(b)|/|a'-b'|
double sampled_lipschitz_quotient(const SurfacePatch& patch, int samples = 24);

}  // namespace calorpot::geometry
