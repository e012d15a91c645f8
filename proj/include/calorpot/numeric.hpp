#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace calorpot {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kFourPi = 4.0 * kPi;
inline constexpr double kSqrtPi = 1.772453850905516027298167483341145183;
inline constexpr double kInvSqrtPi = 1.0 / kSqrtPi;

namespace quad {

struct Rule1d {
  std::vector<double> x;  // nodes on [-1,1]
  std::vector<double> w;
};

// Gauss-Legendre nodes/weights on [-1,1], Newton iteration on P_n.
const Rule1d& gauss_legendre(int n);

// Integrate f over [a,b] with an n-point Gauss-Legendre rule.
template <typename F>
auto integrate(F&& f, double a, double b, int n) -> decltype(f(0.0)) {
  const Rule1d& r = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  decltype(f(0.0)) acc{};
  for (int i = 0; i < n; ++i) acc += r.w[i] * f(mid + half * r.x[i]);
  return half * acc;
}

// Panel-adaptive integration: bisect panels until successive refinements of
// the total agree to rel_tol. Returns the converged value; throws if the
// panel budget is exhausted without convergence.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol,
                          int order = 16, int max_depth = 14) {
  struct Panel {
    double a, b, val;
    int depth;
  };
  auto panel_val = [&](double lo, double hi) {
    return integrate(f, lo, hi, order);
  };
  std::vector<Panel> stack{{a, b, panel_val(a, b), 0}};
  double total = 0.0;
  double scale = std::abs(stack[0].val) + 1e-300;
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    double m = 0.5 * (p.a + p.b);
    double left = panel_val(p.a, m), right = panel_val(m, p.b);
    double err = std::abs(left + right - p.val);
    if (err <= rel_tol * scale || p.depth >= max_depth) {
      if (p.depth >= max_depth && err > 64 * rel_tol * scale)
        throw std::runtime_error("integrate_adaptive: no convergence");
      total += left + right;
    } else {
      stack.push_back({p.a, m, left, p.depth + 1});
      stack.push_back({m, p.b, right, p.depth + 1});
      scale = std::max(scale, std::abs(total));
    }
  }
  return total;
}

}  // namespace quad

// Deterministic xorshift-based generator for seeded probe coefficients.
// (Fixed algorithm so CSV artifacts are bit-identical across platforms.)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // uniform in [-1, 1)
  double next_signed() {
    return 2.0 * (next_u64() >> 11) * 0x1.0p-53 - 1.0;
  }
  // uniform in [0, 1)
  double next_unit() { return (next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace calorpot
