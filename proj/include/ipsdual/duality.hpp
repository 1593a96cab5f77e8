#ifndef IPSDUAL_DUALITY_HPP
#define IPSDUAL_DUALITY_HPP

#include <Eigen/Dense>

#include "ipsdual/generator.hpp"
#include "ipsdual/lattice.hpp"

namespace ipsdual {

// D(eta, (m, xi, n)) = c_-^m prod_x (1 - eta_x)^{xi_x} c_+^n over the
// truncated dual space; rows indexed by configurations, columns by dual states.
struct DualityMatrix {
  DualSpace space;
  double c_minus = 0.0;
  double c_plus = 0.0;
  Eigen::MatrixXd values;
};

DualityMatrix duality_matrix(const DcpParams& params, int n, int sink_cap);
DualityMatrix duality_matrix(const GdcpParams& params, int n, int sink_cap);

// Max abs entry of L D - D (L^dual)^T over dual columns whose L^dual row is
// complete (sink caps make the others incomplete by construction).
double check_matrix_duality(const SparseGenerator& l, const DualGenerator& dual,
                            const DualityMatrix& d);

// Self-duality residual of the closed bulk (CP + SSEP) with H(eta, xi).
double check_bulk_self_duality(double lambda, double diffusion, int n);

// Self-duality residual of the closed SSEP with the parametric family
// [a1 + a2 eta]^(a3 + a4 xi) (0^0 = 1).
double check_ssep_parametric_duality(double a1, double a2, double a3, double a4,
                                     int n, double diffusion = 1.0);

// Exhaustive generator-level SIR duality residual on the window
// [r-2, r+n+1]: max over all 3^(n+4) window configurations of
// |L^SIR d(., (r,n,i))(eta) - L^dual d(eta, .)(r,n,i)|.
double check_sir_duality(int r, int n, SirLayer layer, const SirParams& params);

// Process-level duality through matrix-exponential transients. The residual
// is taken over dual columns with zero initial sink counts; cap_mass bounds
// the truncation effect (probability of reaching a capped sink by time t).
struct ProcessDualityResult {
  double residual = 0.0;
  double cap_mass = 0.0;
};

ProcessDualityResult check_process_duality(const SparseGenerator& l,
                                           const DualGenerator& dual,
                                           const DualityMatrix& d, double t);

}  // namespace ipsdual

#endif  // IPSDUAL_DUALITY_HPP
