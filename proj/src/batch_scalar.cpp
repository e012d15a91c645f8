#include "calorpot/batch.hpp"
#include "calorpot/kernels.hpp"

namespace calorpot::batch {

namespace {

void slp_cumulative_scalar(const double* q, const double* inv_sd, int n, double t, double* out) {
  for (int j = 0; j < n; ++j) out[j] = kernels::cumulative::slp(q[j], inv_sd[j], t);
}

void dlp_radial_scalar(const double* q, const double* inv_sd, int n, double t, double* out) {
  for (int j = 0; j < n; ++j) out[j] = kernels::cumulative::dlp_radial(q[j], inv_sd[j], t);
}

void half_integral_scalar(const double* q, const double* inv_sd, int n, double t, double* out) {
  for (int j = 0; j < n; ++j) out[j] = kernels::cumulative::half_integral(q[j], inv_sd[j], t);
}

void gamma_values_scalar(const double* q, const double* inv_sd, int n, double t, double* out) {
  for (int j = 0; j < n; ++j) out[j] = kernels::cumulative::gamma_value(q[j], inv_sd[j], t);
}

void pair_q_iso_scalar(const double* qx, const double* qy, const double* qz, const double* inv_a,
                       int n, double x, double y, double z, double* q_out) {
  for (int j = 0; j < n; ++j) {
    double dx = x - qx[j], dy = y - qy[j], dz = z - qz[j];
    q_out[j] = (dx * dx + dy * dy + dz * dz) * inv_a[j];
  }
}

void vexp_scalar(const double* x, int n, double* out) {
  for (int j = 0; j < n; ++j) out[j] = std::exp(x[j]);
}

void verfc_scalar(const double* x, int n, double* out) {
  for (int j = 0; j < n; ++j) out[j] = std::erfc(x[j]);
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k = {slp_cumulative_scalar, dlp_radial_scalar, half_integral_scalar,
                            gamma_values_scalar,   pair_q_iso_scalar, vexp_scalar,
                            verfc_scalar};
  return k;
}

}  // namespace calorpot::batch
