#include "calorpot/geometry.hpp"

#include <algorithm>
#include <array>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace calorpot::geometry {

namespace {

double polar_angle(const Vec3& omega) { return std::acos(std::clamp(omega.z(), -1.0, 1.0)); }

// implicit function G with G<0 inside, G=0 on the surface
double implicit_value(const ShapeSpec& s, const Vec3& X) {
  switch (s.kind) {
    case ShapeKind::Sphere:
      return X.norm() - s.radius;
    case ShapeKind::PerturbedSphere: {
      double r = X.norm();
      if (r == 0.0) return -s.radius;
      double theta = polar_angle(X / r);
      return r - s.radius * (1.0 + s.amplitude * std::cos(3.0 * theta));
    }
    case ShapeKind::RoundedBox: {
      double p = s.p_exponent;
      double m = std::pow(std::pow(std::abs(X.x()), p) + std::pow(std::abs(X.y()), p) +
                              std::pow(std::abs(X.z()), p),
                          1.0 / p);
      return m - s.radius;
    }
  }
  return 0.0;
}

Vec3 implicit_gradient(const ShapeSpec& s, const Vec3& X) {
  switch (s.kind) {
    case ShapeKind::Sphere:
      return X.normalized();
    case ShapeKind::PerturbedSphere: {
      double r = X.norm();
      Vec3 omega = X / r;
      double ct = std::clamp(omega.z(), -1.0, 1.0);
      double theta = std::acos(ct);
      // grad r = omega; grad theta = (cos(theta) omega - e_z)/ (r sin theta)
      double st = std::sin(theta);
      Vec3 grad = omega;
      if (st > 1e-12) {
        Vec3 grad_theta = (ct * omega - Vec3::UnitZ()) / (r * st);
        grad += 3.0 * s.radius * s.amplitude * std::sin(3.0 * theta) * grad_theta;
      }
      // at the poles sin(3 theta) ~ 3 sin(theta): the product stays finite and
      // tends to 0 relative to the radial part, omega alone is the limit
      return grad.normalized();
    }
    case ShapeKind::RoundedBox: {
      double p = s.p_exponent;
      Vec3 g;
      for (int c = 0; c < 3; ++c) {
        double v = X[c];
        g[c] = (v == 0.0) ? 0.0 : std::copysign(std::pow(std::abs(v), p - 1.0), v);
      }
      return g.normalized();
    }
  }
  return Vec3::UnitZ();
}

std::array<Vec3, 12> icosahedron_vertices() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::array<Vec3, 12> v = {Vec3(-1, phi, 0), Vec3(1, phi, 0),   Vec3(-1, -phi, 0),
                            Vec3(1, -phi, 0), Vec3(0, -1, phi),  Vec3(0, 1, phi),
                            Vec3(0, -1, -phi), Vec3(0, 1, -phi), Vec3(phi, 0, -1),
                            Vec3(phi, 0, 1),  Vec3(-phi, 0, -1), Vec3(-phi, 0, 1)};
  for (auto& x : v) x.normalize();
  return v;
}

constexpr int kIcosaFaces[20][3] = {
    {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
    {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
    {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
    {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

// unit-sphere triangle area (Oosterom-Strackee)
double spherical_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  double num = std::abs(a.dot(b.cross(c)));
  double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

struct Tri {
  Vec3 a, b, c;
  int base;
};

}  // namespace

double ShapeSpec::rho(const Vec3& omega) const {
  switch (kind) {
    case ShapeKind::Sphere:
      return radius;
    case ShapeKind::PerturbedSphere:
      return radius * (1.0 + amplitude * std::cos(3.0 * polar_angle(omega)));
    case ShapeKind::RoundedBox: {
      double p = p_exponent;
      double m = std::pow(std::pow(std::abs(omega.x()), p) + std::pow(std::abs(omega.y()), p) +
                              std::pow(std::abs(omega.z()), p),
                          1.0 / p);
      return radius / m;
    }
  }
  return radius;
}

Vec3 ShapeSpec::surface_point(const Vec3& omega) const {
  Vec3 u = omega.normalized();
  return rho(u) * u;
}

Vec3 ShapeSpec::outward_normal(const Vec3& omega) const {
  return implicit_gradient(*this, surface_point(omega));
}

bool ShapeSpec::contains(const Vec3& X) const { return implicit_value(*this, X) < 0.0; }

Vec3 SurfacePatch::chart(double u, double v) const {
  // fold the unit square onto the triangle, then map radially to the surface
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  Vec3 dir = (1.0 - u - v) * corner[0] + u * corner[1] + v * corner[2];
  return shape.surface_point(dir);
}

double BoundaryMesh::total_weight() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

Vec3 BoundaryMesh::surface_point(const Vec3& omega) const { return shape_.surface_point(omega); }

Vec3 BoundaryMesh::outward_normal_at(const Vec3& omega) const {
  return shape_.outward_normal(omega);
}

int BoundaryMesh::nearest_node(const Vec3& X) const {
  int best = 0;
  double bd = std::numeric_limits<double>::max();
  for (int i = 0; i < size(); ++i) {
    double d = (X - nodes_[i]).squaredNorm();
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

double BoundaryMesh::distance_to_boundary(const Vec3& X) const {
  int best = nearest_node(X);
  double d = (X - nodes_[best]).norm();
  // one level of local refinement: probe the exact chart around the best node
  Vec3 omega0 = nodes_[best].normalized();
  double ang = local_spacing(best) / std::max(nodes_[best].norm(), 1e-12);
  Vec3 t1 = omega0.unitOrthogonal();
  Vec3 t2 = omega0.cross(t1);
  for (int round = 0; round < 2; ++round) {
    Vec3 center = omega0;
    for (int i = -2; i <= 2; ++i)
      for (int j = -2; j <= 2; ++j) {
        Vec3 dir = center + (ang * 0.5 * i) * t1 + (ang * 0.5 * j) * t2;
        double dd = (X - shape_.surface_point(dir)).norm();
        if (dd < d) {
          d = dd;
          omega0 = dir.normalized();
        }
      }
    ang *= 0.25;
  }
  return d;
}

std::vector<int> BoundaryMesh::nodes_within(const Vec3& X, double radius) const {
  std::vector<int> out;
  double r2 = radius * radius;
  for (int i = 0; i < size(); ++i)
    if ((X - nodes_[i]).squaredNorm() <= r2) out.push_back(i);
  return out;
}

void BoundaryMesh::write_table(std::ostream& os) const {
  os << "# calorpot-mesh v1\n";
  char buf[256];
  for (int i = 0; i < size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g %.17g %.17g %.17g %d\n",
                  nodes_[i].x(), nodes_[i].y(), nodes_[i].z(), normals_[i].x(), normals_[i].y(),
                  normals_[i].z(), weights_[i], patch_of_[i]);
    os << buf;
  }
}

BoundaryMesh BoundaryMesh::read_table(std::istream& is) {
  std::string header;
  std::getline(is, header);
  if (header.rfind("# calorpot-mesh v1", 0) != 0)
    throw std::runtime_error("mesh table: bad header");
  BoundaryMesh m;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Vec3 q, n;
    double w;
    int patch;
    ls >> q.x() >> q.y() >> q.z() >> n.x() >> n.y() >> n.z() >> w >> patch;
    if (!ls) throw std::runtime_error("mesh table: bad row");
    m.nodes_.push_back(q);
    m.normals_.push_back(n);
    m.weights_.push_back(w);
    m.patch_of_.push_back(patch);
  }
  double r0 = 0.0;
  for (const auto& a : m.nodes_)
    for (const auto& b : m.nodes_) r0 = std::max(r0, (a - b).norm());
  m.r0_ = r0;
  return m;
}

double sampled_lipschitz_quotient(const SurfacePatch& patch, int samples) {
  // graph frame: height along the patch-center direction vs in-plane offset
  Vec3 cdir = (patch.corner[0] + patch.corner[1] + patch.corner[2]).normalized();
  Vec3 t1 = cdir.unitOrthogonal();
  Vec3 t2 = cdir.cross(t1);
  std::vector<Vec3> pts;
  for (int i = 0; i <= samples; ++i)
    for (int j = 0; j <= samples; ++j)
      pts.push_back(patch.chart(i / double(samples), j / double(samples)));
  double q = 0.0;
  for (size_t a = 0; a < pts.size(); ++a)
    for (size_t b = a + 1; b < pts.size(); ++b) {
      Vec3 d = pts[a] - pts[b];
      double dh = std::abs(d.dot(cdir));
      double dp = std::hypot(d.dot(t1), d.dot(t2));
      if (dp > 1e-9) q = std::max(q, dh / dp);
    }
  return q;
}

BoundaryMesh build_mesh(const ShapeSpec& spec, int level) {
  if (spec.radius <= 0.0) throw std::invalid_argument("build_mesh: radius must be positive");
  if (level < 0) throw std::invalid_argument("build_mesh: level must be >= 0");

  auto verts = icosahedron_vertices();
  std::vector<Tri> tris;
  for (int f = 0; f < 20; ++f)
    tris.push_back({verts[kIcosaFaces[f][0]], verts[kIcosaFaces[f][1]], verts[kIcosaFaces[f][2]], f});
  for (int l = 0; l < level; ++l) {
    std::vector<Tri> next;
    next.reserve(tris.size() * 4);
    for (const Tri& t : tris) {
      Vec3 ab = (t.a + t.b).normalized();
      Vec3 bc = (t.b + t.c).normalized();
      Vec3 ca = (t.c + t.a).normalized();
      next.push_back({t.a, ab, ca, t.base});
      next.push_back({ab, t.b, bc, t.base});
      next.push_back({ca, bc, t.c, t.base});
      next.push_back({ab, bc, ca, t.base});
    }
    tris.swap(next);
  }

  BoundaryMesh m;
  m.shape_ = spec;
  m.level_ = level;
  m.nodes_.reserve(tris.size());
  for (const Tri& t : tris) {
    Vec3 omega = (t.a + t.b + t.c).normalized();
    Vec3 Q = spec.surface_point(omega);
    Vec3 n_out = spec.outward_normal(omega);
    // star-shaped area element: dsigma = rho^2 / <n_out, omega> dOmega
    double cosg = n_out.dot(omega);
    double rho = Q.norm();
    double w = spherical_area(t.a, t.b, t.c) * rho * rho / cosg;
    m.nodes_.push_back(Q);
    m.normals_.push_back(-n_out);
    m.weights_.push_back(w);
    m.patch_of_.push_back(t.base);
  }

  m.patches_.resize(20);
  for (int f = 0; f < 20; ++f) {
    SurfacePatch& p = m.patches_[f];
    p.base_face = f;
    p.is_graph = true;
    p.lipschitz_bound = spec.declared_lipschitz;
    p.shape = spec;
    p.corner[0] = verts[kIcosaFaces[f][0]];
    p.corner[1] = verts[kIcosaFaces[f][1]];
    p.corner[2] = verts[kIcosaFaces[f][2]];
  }

  double r0 = 0.0;
  for (const auto& a : m.nodes_) r0 = std::max(r0, 2.0 * a.norm());
  m.r0_ = r0;
  return m;
}

BoundaryMesh build_sphere_mesh(double radius, int level) {
  ShapeSpec s;
  s.kind = ShapeKind::Sphere;
  s.radius = radius;
  s.declared_lipschitz = 1.0;
  return build_mesh(s, level);
}

BoundaryMesh build_graph_mesh(const ShapeSpec& spec, int level) {
  BoundaryMesh m = build_mesh(spec, level);
  for (const auto& p : m.patches()) {
    double q = sampled_lipschitz_quotient(p, 12);
    if (q > spec.declared_lipschitz)
      throw std::invalid_argument("build_graph_mesh: sampled Lipschitz quotient " +
                                  std::to_string(q) + " exceeds declared bound " +
                                  std::to_string(spec.declared_lipschitz));
  }
  return m;
}

std::vector<Vec3> nontangential_points(const BoundaryMesh& mesh, int node, const ConeParams& cone,
                                       const std::vector<double>& deltas, Side side) {
  if (cone.aperture <= 0.0) throw std::invalid_argument("cone aperture must be positive");
  const double sign = (side == Side::Interior) ? 1.0 : -1.0;
  const Vec3& Q = mesh.nodes()[node];
  const Vec3& N = mesh.normals()[node];
  std::vector<Vec3> out;
  out.reserve(deltas.size());
  for (double delta : deltas) {
    if (!(delta > 0.0) || delta >= mesh.diameter() / 4.0)
      throw std::invalid_argument("nontangential_points: delta out of range");
    Vec3 X = Q + sign * delta * N;
    double dist = mesh.distance_to_boundary(X);
    if ((X - Q).norm() >= (1.0 + cone.aperture) * dist)
      throw std::runtime_error("cone condition failed at delta=" + std::to_string(delta));
    out.push_back(X);
  }
  return out;
}

double distance_to_boundary(const BoundaryMesh& mesh, const Vec3& X) {
  return mesh.distance_to_boundary(X);
}

}  // namespace calorpot::geometry
