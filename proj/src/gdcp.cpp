#include "ipsdual/gdcp.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace ipsdual {

namespace {

// Tilde constants of the closed form; A and r_- for the geometric branch.
struct Constants {
  double a_t, b_t, c_t, d_t, A, r_minus, r_plus;
};

Constants constants_of(const GdcpParams& p) {
  const double dl = p.diffusion + p.lambda;
  Constants c{};
  c.a_t = (p.alpha + p.gamma) / (p.alpha + p.gamma + dl + p.mu2);
  c.b_t = dl / (p.alpha + p.gamma + dl + p.mu2);
  c.c_t = (p.beta + p.delta) / (p.beta + p.delta + dl + p.mu2);
  c.d_t = dl / (p.beta + p.delta + dl + p.mu2);
  c.A = dl / (dl + p.mu2);
  const double root = std::sqrt(std::max(0.0, 1.0 - c.A * c.A));
  c.r_minus = (1.0 - root) / c.A;
  c.r_plus = (1.0 + root) / c.A;
  return c;
}

void require_annihilating(const GdcpParams& p) {
  p.validate();
  if (!p.annihilating())
    throw std::invalid_argument("closed form requires mu1 = lambda + mu2 exactly");
}

// Cancellation guard: below this the geometric roots collide at 1 and the
// linear branch takes over.
constexpr double kDegenerateA = 1e-12;

bool geometric_branch(const Constants& c) { return 1.0 - c.A >= kDegenerateA; }

}  // namespace

std::vector<double> solve_boundary_recurrence(double a, double c,
                                              const GdcpParams& params, int n) {
  require_annihilating(params);
  if (n < 2)
    throw std::invalid_argument("boundary recurrence needs N >= 2 (N = 1 has no bulk)");
  const Constants k = constants_of(params);
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  if (a == 0.0 && c == 0.0) return w;  // homogeneous system, unique solution

  if (geometric_branch(k)) {
    // w_x = p r_-^x + q r_+^x, expressed in powers of r_- (r_+ = 1/r_-).
    const double rm = k.r_minus;
    const double b_n = rm * (1.0 - k.b_t * rm) * (1.0 - k.d_t * rm) +
                       std::pow(rm, 2 * n - 3) * (k.b_t - rm) * (rm - k.d_t);
    if (b_n == 0.0)
      throw std::runtime_error("degenerate recurrence: B_N = 0");
    const double p_coef =
        (a * (1.0 - k.d_t * rm) + c * std::pow(rm, n - 1) * (k.b_t - rm) / rm) / b_n;
    const double q_coef =
        (c * rm * (1.0 - k.b_t * rm) + a * std::pow(rm, n - 1) * (k.d_t - rm)) / b_n;
    for (int x = 1; x <= n; ++x)
      w[static_cast<std::size_t>(x - 1)] =
          p_coef * std::pow(rm, x) + q_coef * std::pow(rm, n - x);
    return w;
  }

  // Linear branch w_x = p' + q' x: solve the two boundary equations
  //   (1 - b~) p' - (2 b~ - 1) q' = a
  //   (1 - d~) p' + [(1 - d~) N + d~] q' = c
  const double m11 = 1.0 - k.b_t, m12 = -(2.0 * k.b_t - 1.0);
  const double m21 = 1.0 - k.d_t, m22 = (1.0 - k.d_t) * n + k.d_t;
  const double det = m11 * m22 - m12 * m21;
  if (det == 0.0)
    throw std::runtime_error("degenerate recurrence: B'_N = 0");
  const double p_prime = (a * m22 - m12 * c) / det;
  const double q_prime = (m11 * c - m21 * a) / det;
  for (int x = 1; x <= n; ++x)
    w[static_cast<std::size_t>(x - 1)] = p_prime + q_prime * x;
  return w;
}

GdcpClosedForm one_point_closed_form(const GdcpParams& params, int n) {
  require_annihilating(params);
  if (n < 1) throw std::invalid_argument("lattice size must be N >= 1");
  const Constants k = constants_of(params);
  GdcpClosedForm out;
  out.a_t = k.a_t;
  out.b_t = k.b_t;
  out.c_t = k.c_t;
  out.d_t = k.d_t;
  out.A = k.A;
  out.r_minus = k.r_minus;
  out.r_plus = k.r_plus;

  const bool left_closed = params.alpha + params.gamma == 0.0;
  const bool right_closed = params.beta + params.delta == 0.0;
  if (geometric_branch(k)) {
    out.boundary_case = 0;
    const double rm = k.r_minus;
    out.B_N = rm * (1.0 - k.b_t * rm) * (1.0 - k.d_t * rm) +
              std::pow(rm, 2 * n - 3) * (k.b_t - rm) * (rm - k.d_t);
  } else {
    out.boundary_case = left_closed && right_closed ? 1
                        : left_closed              ? 2
                        : right_closed             ? 3
                                                    : 4;
    out.B_N_prime = k.a_t * (k.c_t * n + 1.0 - k.c_t) + (1.0 - 2.0 * k.a_t) * k.c_t;
  }

  if (out.boundary_case == 1) {
    // Closed boundaries: the empty lattice absorbs, no particle survives.
    out.u.assign(static_cast<std::size_t>(n), 0.0);
    out.v.assign(static_cast<std::size_t>(n), 0.0);
    out.rho1.assign(static_cast<std::size_t>(n), 0.0);
    return out;
  }

  if (n == 1) {
    // No bonds: a lone dual particle never dies and splits between the sinks
    // in proportion to the two absorption rates.
    const double denom =
        params.alpha + params.gamma + params.beta + params.delta;
    out.u.assign(1, denom > 0.0 ? (params.alpha + params.gamma) / denom : 0.0);
    out.v.assign(1, denom > 0.0 ? (params.beta + params.delta) / denom : 0.0);
  } else {
    out.u = solve_boundary_recurrence(k.a_t, 0.0, params, n);
    out.v = solve_boundary_recurrence(0.0, k.c_t, params, n);
  }
  out.rho1.resize(static_cast<std::size_t>(n));
  const double left_density = 1.0 - params.c_minus();
  const double right_density = 1.0 - params.c_plus();
  for (int x = 0; x < n; ++x)
    out.rho1[static_cast<std::size_t>(x)] =
        out.u[static_cast<std::size_t>(x)] * left_density +
        out.v[static_cast<std::size_t>(x)] * right_density;
  return out;
}

double bulk_density(const GdcpParams& params, double s) {
  require_annihilating(params);
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("macroscopic position must satisfy 0 < s < 1");
  if (params.mu2 > 0.0) return 0.0;
  // u_[sN] -> 1-s and v_[sN] -> s, so the profile is the line between the
  // two reservoir densities 1 - c~_- and 1 - c~_+.
  const double left = params.alpha + params.gamma > 0.0
                          ? params.alpha / (params.alpha + params.gamma)
                          : 0.0;
  const double right = params.beta + params.delta > 0.0
                           ? params.delta / (params.beta + params.delta)
                           : 0.0;
  return left * (1.0 - s) + right * s;
}

OnePointEvolution evolve_one_point(const GdcpParams& params,
                                   const std::vector<double>& init_profile,
                                   double t, double dt) {
  require_annihilating(params);
  if (dt <= 0.0) throw std::invalid_argument("dt must be > 0");
  if (t < 0.0) throw std::invalid_argument("t must be >= 0");
  const int n = static_cast<int>(init_profile.size());
  if (n < 1) throw std::invalid_argument("profile must cover N >= 1 sites");

  const double dl = params.diffusion + params.lambda;
  const double left_sum = params.alpha + params.gamma - params.mu2;
  const double right_sum = params.beta + params.delta - params.mu2;

  OnePointEvolution out;
  out.mapping = SsepMapping{dl, left_sum, right_sum,
                            left_sum < 0.0 || right_sum < 0.0};
  const auto near = [](double x, double y) { return std::abs(x - y) < 1e-12; };
  if ((near(left_sum, 0.0) || near(left_sum, dl)) &&
      (near(right_sum, 0.0) || near(right_sum, dl)))
    out.note = "discrete-Fourier special boundary combination (solved numerically)";

  const GdcpClosedForm closed = one_point_closed_form(params, n);
  Eigen::VectorXd g0(n);
  for (int x = 0; x < n; ++x)
    g0[x] = init_profile[static_cast<std::size_t>(x)] -
            closed.rho1[static_cast<std::size_t>(x)];

  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    if (x > 0) {
      b(x, x - 1) = dl;
      b(x, x) -= dl;
    }
    if (x < n - 1) {
      b(x, x + 1) = dl;
      b(x, x) -= dl;
    }
  }
  b(0, 0) -= left_sum;
  b(n - 1, n - 1) -= right_sum;

  auto profile_at = [&](const Eigen::VectorXd& g, double time) {
    std::vector<double> prof(static_cast<std::size_t>(n));
    const double damp = std::exp(-2.0 * params.mu2 * time);
    for (int x = 0; x < n; ++x)
      prof[static_cast<std::size_t>(x)] = closed.rho1[static_cast<std::size_t>(x)] +
                                          damp * g[x];
    return prof;
  };

  if (t > 0.0 && dt < t) {
    const Eigen::MatrixXd estep = (dt * b).exp();
    Eigen::VectorXd g = g0;
    for (double time = dt; time < t - 1e-12 * (1.0 + t); time += dt) {
      g = estep * g;
      out.trajectory.emplace_back(time, profile_at(g, time));
    }
  }
  const Eigen::VectorXd gt = ((t * b).exp() * g0).eval();
  out.profile = profile_at(gt, t);
  out.trajectory.emplace_back(t, out.profile);
  return out;
}

}  // namespace ipsdual
