#pragma once

#include "calorpot/numeric.hpp"

namespace calorpot::batch {

enum class Isa { Scalar, Avx2 };

bool avx2_supported();
Isa active_isa();
// pin the dispatch (used by the equivalence tests); pass supported ISA only
void force_isa(Isa isa);
void reset_isa();

// All kernels are data-parallel over sources at a fixed time endpoint.
// q[j] = <A(Q_j)^{-1} d_j, d_j>, inv_sd[j] = det(A(Q_j))^{-1/2}.
struct Kernels {
  // out[j] = erfc(sqrt(q)/2sqrt(t)) inv_sd / (4 pi sqrt(q))
  void (*slp_cumulative)(const double* q, const double* inv_sd, int n, double t, double* out);
  // out[j] = inv_sd [erfc(w) + 2/sqrt(pi) w e^{-w^2}] / (4 pi q^{3/2})
  void (*dlp_radial)(const double* q, const double* inv_sd, int n, double t, double* out);
  // out[j] = 2 (4 pi)^{-3/2} inv_sd e^{-q/4t} / sqrt(q t)
  void (*half_integral)(const double* q, const double* inv_sd, int n, double t, double* out);
  // out[j] = (4 pi t)^{-3/2} inv_sd e^{-q/4t}
  void (*gamma_values)(const double* q, const double* inv_sd, int n, double t, double* out);
  // q[j] = |X - Q_j|^2 * inv_a[j] for isotropic fields (SoA source coords)
  void (*pair_q_iso)(const double* qx, const double* qy, const double* qz, const double* inv_a,
                     int n, double x, double y, double z, double* q_out);
  // elementary vector math, exposed for equivalence tests (x >= 0 for erfc)
  void (*vexp)(const double* x, int n, double* out);
  void (*verfc)(const double* x, int n, double* out);
};

const Kernels& active();
const Kernels& scalar_kernels();
const Kernels& avx2_kernels();  // valid only when avx2_supported()

}  // namespace calorpot::batch
