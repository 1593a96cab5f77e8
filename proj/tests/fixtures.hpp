#ifndef IPSDUAL_TESTS_FIXTURES_HPP
#define IPSDUAL_TESTS_FIXTURES_HPP

// Closed-form fixtures for the small-N diffusive contact process: the N=1 and
// N=2 stationary laws, the N=2 absorption probabilities x_i^k of the dual
// started from delta_1, delta_{1,2}, delta_2 (right boundary closed), and
// their fast-stirring limits.

#include <Eigen/Dense>
#include <array>

#include "ipsdual/lattice.hpp"
#include "ipsdual/mc.hpp"

namespace fixtures {

using ipsdual::DcpParams;

inline Eigen::Vector2d dcp_n1_stationary(const DcpParams& p) {
  const double z = 1.0 + p.beta + p.gamma + p.delta + p.alpha;
  return {(p.gamma + p.beta + 1.0) / z, (p.alpha + p.delta) / z};
}

// N=2 stationary law in the order (00), (01), (10), (11).
inline Eigen::Vector4d dcp_n2_stationary(const DcpParams& p) {
  const double a = p.alpha, b = p.beta, g = p.gamma, d = p.delta;
  const double lam = p.lambda, dd = p.diffusion;
  const double s = a + b + g + d + 2.0;
  const double c_d = dd * (s * s + 2.0 * lam * (a + d)) +
                     (a + b + g + d + 1.0 + (a + g) * (b + d)) * s +
                     lam * (a + d) * (a + d + lam) +
                     lam * ((a + d + 1.0) * (b + g + 2.0) + (a + g) * (b + 1.0) +
                            (b + d) * (g + 1.0));
  const double n00 =
      dd * (b + g + 2.0) * (b + g + 2.0) + (s + 2.0 * lam) * (1.0 + b + g + b * g);
  // The printed (1,0) and (0,1) numerators are transposed; the formula below
  // with the (gamma+1) factor is the weight of (0,1).
  const double n01 = dd * (2.0 + b + g) * (a + d) + (g + 1.0) * (lam * (a + d) + d * s);
  const double n10 = dd * (2.0 + b + g) * (a + d) + (b + 1.0) * (lam * (a + d) + a * s);
  const double n11 = dd * (a + d) * (a + d + 2.0 * lam) + a * d * s +
                     lam * (a + d) * (a + d + lam + 1.0) + lam * (a * b + g * d);
  return Eigen::Vector4d{n00, n01, n10, n11} / c_d;
}

// Moments x = rho_1(1), y = rho_1(2), z = rho_2(1,2) of the N=2 law.
inline std::array<double, 3> dcp_n2_moments(const DcpParams& p) {
  const Eigen::Vector4d nu = dcp_n2_stationary(p);
  return {nu[2] + nu[3], nu[1] + nu[3], nu[3]};
}

// N=2 law in the fast-stirring limit, order (00), (01), (10), (11).
inline Eigen::Vector4d dcp_n2_stationary_infty(const DcpParams& p) {
  const double a = p.alpha, b = p.beta, g = p.gamma, d = p.delta, lam = p.lambda;
  const double s = a + b + g + d + 2.0;
  const double c_inf = s * s + 2.0 * lam * (a + d);
  const double n00 = (b + g + 2.0) * (b + g + 2.0);
  const double n01 = (2.0 + b + g) * (a + d);
  const double n11 = (a + d) * (a + d + 2.0 * lam);
  return Eigen::Vector4d{n00, n01, n01, n11} / c_inf;
}

// Absorption probabilities x_i^k for the N=2 dual with beta = delta = 0:
// rows k = 0..k_max, columns (x_1^k, x_2^k, x_3^k). Uses the printed closed
// forms for k <= 3 and the recursion-consistent geometric continuation
// x_i^k = x_i^3 q^{k-3}, q = lambda (alpha+gamma)(2D+alpha+gamma+lambda+1)/d~.
inline Eigen::MatrixXd appendix_absorption_xk(double alpha, double gamma,
                                              double lambda, double diffusion,
                                              int k_max) {
  const double ag = alpha + gamma;
  const double lam = lambda, dd = diffusion;
  const double big_a = (ag + 2.0) * (ag + 2.0) + 2.0 * lam * ag;
  const double dt =
      dd * big_a + ag * ((ag + lam + 2.0) * (lam + 1.0) + 1.0) + 2.0 * (lam + 1.0);
  const double phi = dd * (ag + 2.0 * lam + 2.0) + lam * lam + lam * (ag + 2.0) +
                     ag + 1.0;
  const double psi = dd * (ag + 2.0) + lam +
                     lam * (ag + 2.0) * (2.0 * dd + ag + lam + 1.0) *
                         (2.0 * dd + ag + lam + 1.0) / dt;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k_max + 1, 3);
  out(0, 0) = (2.0 * dd + lam + 1.0) * (ag + 2.0) / dt;
  out(0, 1) = (4.0 * dd + ag + 2.0 * lam + 2.0) / dt;
  out(0, 2) = (2.0 * dd + ag + lam + 1.0) * (ag + 2.0) / dt;
  if (k_max >= 1) {
    const double pref = ag * (ag + 2.0) / dt;
    out(1, 0) = pref * (dd + 1.0 + lam * (ag + 1.0) / (ag + 2.0) +
                        lam * (2.0 * dd + lam + 1.0) * (2.0 * dd + ag + lam + 1.0) / dt);
    out(1, 1) = pref * ((2.0 * dd + lam + 1.0) / (ag + 2.0) +
                        phi * (2.0 * dd + ag + 1.0 + lam) / dt);
    out(1, 2) = pref * (dd + lam / (ag + 2.0) +
                        lam * (2.0 * dd + lam + ag + 1.0) * (2.0 * dd + lam + ag + 1.0) / dt);
  }
  if (k_max >= 2) {
    out(2, 0) = lam * ag * ag * (2.0 * dd + lam + 1.0) * psi / (dt * dt);
    out(2, 1) = ag * ag * phi * psi / (dt * dt);
    out(2, 2) = lam * ag * ag * (2.0 * dd + ag + lam + 1.0) * psi / (dt * dt);
  }
  if (k_max >= 3) {
    const double d3 = dt * dt * dt;
    out(3, 0) = lam * lam * ag * ag * ag * (2.0 * dd + lam + 1.0) *
                (2.0 * dd + ag + lam + 1.0) * psi / d3;
    out(3, 1) = lam * ag * ag * ag * (2.0 * dd + ag + lam + 1.0) * phi * psi / d3;
    out(3, 2) = lam * lam * ag * ag * ag * (2.0 * dd + ag + lam + 1.0) *
                (2.0 * dd + ag + lam + 1.0) * psi / d3;
  }
  const double q = lam * ag * (2.0 * dd + ag + lam + 1.0) / dt;
  for (int k = 4; k <= k_max; ++k) out.row(k) = out.row(3) * std::pow(q, k - 3);
  return out;
}

// Fast-stirring limit of the absorption probabilities (printed k <= 3 plus
// the geometric continuation with ratio 2 lambda (alpha+gamma)/A).
inline Eigen::MatrixXd appendix_absorption_xk_infty(double alpha, double gamma,
                                                    double lambda, int k_max) {
  const double ag = alpha + gamma;
  const double lam = lambda;
  const double big_a = (ag + 2.0) * (ag + 2.0) + 2.0 * lam * ag;
  const double big_b = ag + 2.0 * lam + 2.0;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k_max + 1, 3);
  out(0, 0) = out(0, 2) = 2.0 * (ag + 2.0) / big_a;
  out(0, 1) = 4.0 / big_a;
  if (k_max >= 1) {
    out(1, 0) = out(1, 2) = ag * (ag + 2.0) * (1.0 + 4.0 * lam / big_a) / big_a;
    out(1, 1) = 2.0 * ag * (1.0 + big_b * (ag + 2.0) / big_a) / big_a;
  }
  if (k_max >= 2) {
    out(2, 0) = out(2, 2) =
        2.0 * lam * ag * ag * (ag + 2.0) * (1.0 + 4.0 * lam / big_a) / (big_a * big_a);
    out(2, 1) = big_b / (2.0 * lam) * out(2, 0);
  }
  if (k_max >= 3) {
    out(3, 0) = out(3, 2) = 4.0 * lam * lam * ag * ag * ag * (ag + 2.0) *
                            (1.0 + 4.0 * lam / big_a) / (big_a * big_a * big_a);
    out(3, 1) = big_b / (2.0 * lam) * out(3, 0);
  }
  const double q = 2.0 * lam * ag / big_a;
  for (int k = 4; k <= k_max; ++k) out.row(k) = out.row(3) * std::pow(q, k - 3);
  return out;
}

inline DcpParams random_dcp(ipsdual::SplitRng& rng, double lo = 0.05,
                            double hi = 2.5) {
  auto u = [&]() { return lo + (hi - lo) * rng.uniform(); };
  DcpParams p;
  p.alpha = u();
  p.beta = u();
  p.gamma = u();
  p.delta = u();
  p.lambda = u();
  p.diffusion = u();
  return p;
}

inline ipsdual::GdcpParams random_gdcp_dualizable(ipsdual::SplitRng& rng) {
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  ipsdual::GdcpParams p;
  p.alpha = u(0.05, 2.5);
  p.beta = u(0.05, 2.5);
  p.gamma = u(0.05, 2.5);
  p.delta = u(0.05, 2.5);
  p.lambda = u(0.05, 2.5);
  p.diffusion = u(0.05, 2.5);
  p.mu2 = u(0.05, 1.5);
  p.mu1 = p.mu2 + u(0.0, 1.0) * p.lambda;  // keeps both dual rates nonnegative
  return p;
}

}  // namespace fixtures

#endif  // IPSDUAL_TESTS_FIXTURES_HPP
