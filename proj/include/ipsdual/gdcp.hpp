#ifndef IPSDUAL_GDCP_HPP
#define IPSDUAL_GDCP_HPP

#include <string>
#include <vector>

#include "ipsdual/lattice.hpp"

namespace ipsdual {

// Closed-form one-point profile of the annihilating-dual GDCP
// (mu1 = lambda + mu2). u_x / v_x are the left-only / right-only dual
// absorption probabilities from a single particle at x.
struct GdcpClosedForm {
  double a_t = 0.0, b_t = 0.0, c_t = 0.0, d_t = 0.0;  // tilde constants
  double A = 0.0, r_minus = 0.0, r_plus = 0.0;        // mu2 > 0 branch
  double B_N = 0.0;
  double B_N_prime = 0.0;  // mu2 = 0 branch
  // 0: geometric (mu2 > 0); 1..4: linear branch cases (i)-(iv)
  int boundary_case = 0;
  std::vector<double> u, v, rho1;
};

GdcpClosedForm one_point_closed_form(const GdcpParams& params, int n);

// Solution of w_1 = a + b~ w_2, w_x = (A/2)(w_{x-1} + w_{x+1}),
// w_N = c + d~ w_{N-1}; geometric in r_- for mu2 > 0, affine for mu2 = 0.
std::vector<double> solve_boundary_recurrence(double a, double c,
                                              const GdcpParams& params, int n);

// Infinite-volume density at macroscopic position s in (0,1).
double bulk_density(const GdcpParams& params, double s);

// Open-SSEP parameters recognized in the centered one-point system; only the
// boundary sums are determined. Negative sums are flagged, not rejected.
struct SsepMapping {
  double diffusion_hat = 0.0;
  double left_sum = 0.0;
  double right_sum = 0.0;
  bool negative_flagged = false;
};

struct OnePointEvolution {
  std::vector<double> profile;  // <eta_x> at time t
  SsepMapping mapping;
  std::string note;  // set when a discrete-Fourier special boundary case is detected
  // (time, profile) samples on the dt grid, ending at t
  std::vector<std::pair<double, std::vector<double>>> trajectory;
};

// Evolves the one-point function from an arbitrary initial profile by the
// exact matrix exponential of the centered tridiagonal system.
OnePointEvolution evolve_one_point(const GdcpParams& params,
                                   const std::vector<double>& init_profile,
                                   double t, double dt);

}  // namespace ipsdual

#endif  // IPSDUAL_GDCP_HPP
