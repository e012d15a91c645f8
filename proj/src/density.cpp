#include "calorpot/density.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace calorpot::potentials {

double SpaceTimeDensity::norm_l2(const geometry::BoundaryMesh& mesh, double dt) const {
  double acc = 0.0;
  for (int k = 0; k < steps(); ++k)
    for (int i = 0; i < nodes(); ++i) acc += mesh.weights()[i] * dt * values(i, k) * values(i, k);
  return std::sqrt(acc);
}

void SpaceTimeDensity::write_csv(std::ostream& os) const {
  os << "node_id,k,value\n";
  char buf[64];
  for (int i = 0; i < nodes(); ++i)
    for (int k = 0; k < steps(); ++k) {
      std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", i, k + 1, values(i, k));
      os << buf;
    }
}

SpaceTimeDensity SpaceTimeDensity::read_csv(std::istream& is) {
  std::string line;
  std::getline(is, line);  // header
  struct Row {
    int i, k;
    double v;
  };
  std::vector<Row> rows;
  int max_i = -1, max_k = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Row r;
    if (std::sscanf(line.c_str(), "%d,%d,%lf", &r.i, &r.k, &r.v) != 3)
      throw std::runtime_error("density csv: bad row: " + line);
    rows.push_back(r);
    max_i = std::max(max_i, r.i);
    max_k = std::max(max_k, r.k);
  }
  SpaceTimeDensity d(max_i + 1, max_k);
  for (const Row& r : rows) d.values(r.i, r.k - 1) = r.v;
  return d;
}

}  // namespace calorpot::potentials
