#include "ipsdual/sir.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace ipsdual {

namespace {

// Nodes and weights of 15-point Gauss-Legendre on [-1, 1], computed once by
// Newton iteration on P_15.
struct GaussLegendre {
  std::array<double, 15> nodes{};
  std::array<double, 15> weights{};
  GaussLegendre() {
    const int n = 15;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) {
          nodes[static_cast<std::size_t>(i)] = x;
          weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
          break;
        }
      }
    }
  }
};

const GaussLegendre& gl15() {
  static const GaussLegendre g;
  return g;
}

template <typename F>
double panel_integral(F&& f, double a, double b) {
  const auto& g = gl15();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 15; ++i)
    sum += g.weights[static_cast<std::size_t>(i)] *
           f(mid + half * g.nodes[static_cast<std::size_t>(i)]);
  return half * sum;
}

// Composite Gauss-Legendre refined until two successive levels differ < tol.
template <typename F>
double adaptive_gauss_legendre(F&& f, double a, double b, double tol) {
  if (b <= a) return 0.0;
  double prev = panel_integral(f, a, b);
  for (int panels = 2; panels <= 1024; panels *= 2) {
    double cur = 0.0;
    const double h = (b - a) / panels;
    for (int k = 0; k < panels; ++k)
      cur += panel_integral(f, a + k * h, a + (k + 1) * h);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  throw std::runtime_error("quadrature failed to reach the requested tolerance");
}

// Poisson(mean) pmf values 0..k_max with k_max chosen so the tail is < tol.
std::vector<double> poisson_row(double mean, double tol, int hard_cap = 100000) {
  std::vector<double> pmf;
  double w = std::exp(-mean);
  double cum = w;
  pmf.push_back(w);
  int k = 0;
  while (1.0 - cum > tol && k < hard_cap) {
    ++k;
    w *= mean / k;
    cum += w;
    pmf.push_back(w);
  }
  return pmf;
}

int poisson_quantile(double mean, double tail) {
  double w = std::exp(-mean);
  double cum = w;
  int k = 0;
  while (1.0 - cum >= tail && k < 100000) {
    ++k;
    w *= mean / k;
    cum += w;
  }
  return k + 1;
}

}  // namespace

std::vector<int> SirConfiguration::infected_sites() const {
  std::vector<int> out;
  for (int x = lo; x <= hi(); ++x)
    if (at(x) == SirState::I) out.push_back(x);
  return out;
}

int cluster_indicator(const SirConfiguration& eta, int r, int n, ClusterKind kind) {
  if (n < 1) throw std::invalid_argument("cluster length must be n >= 1");
  switch (kind) {
    case ClusterKind::G:
      if (eta.at(r - 1) != SirState::I) return 0;
      break;
    case ClusterKind::J:
      if (eta.at(r - 1) != SirState::R) return 0;
      break;
    case ClusterKind::H:
      break;
  }
  for (int j = 0; j < n; ++j)
    if (eta.at(r + j) != SirState::S) return 0;
  return eta.at(r + n) == SirState::I ? 1 : 0;
}

InitialClusters clusters_of(const SirConfiguration& eta) {
  InitialClusters init;
  init.translation_invariant = false;
  init.eval = [eta](ClusterKind kind, int r, int n) {
    return static_cast<double>(cluster_indicator(eta, r, n, kind));
  };
  init.run_blocked = [eta](int lo, int hi) {
    for (int x = lo; x <= hi; ++x)
      if (eta.at(x) != SirState::S) return true;
    return false;
  };
  return init;
}

InitialClusters translation_invariant_clusters(
    std::function<double(ClusterKind, int n)> eval) {
  InitialClusters init;
  init.translation_invariant = true;
  init.eval = [eval = std::move(eval)](ClusterKind kind, int, int n) {
    return eval(kind, n);
  };
  return init;
}

namespace {

// Binomially spread G propagator sum_{a<=b} C(b,a) 2^-b Pois_b(2 beta tau)
// G0(r - a, n + b); weights stay normalized so the tail is a Poisson tail.
double g_series(const InitialClusters& init, double beta, int r, int n, double tau,
                double tol) {
  const auto pmf = poisson_row(2.0 * beta * tau, tol);
  std::vector<double> binom{1.0};  // C(b, a) / 2^b row
  double value = 0.0;
  for (std::size_t b = 0; b < pmf.size(); ++b) {
    if (b > 0) {
      std::vector<double> next(b + 1, 0.0);
      for (std::size_t a = 0; a <= b; ++a) {
        const double lo = a > 0 ? binom[a - 1] : 0.0;
        const double hi = a < b ? binom[a] : 0.0;
        next[a] = 0.5 * (lo + hi);
      }
      binom = std::move(next);
    }
    double inner = 0.0;
    for (std::size_t a = 0; a <= b; ++a)
      inner += binom[a] * init.eval(ClusterKind::G, r - static_cast<int>(a),
                                    n + static_cast<int>(b));
    value += pmf[b] * inner;
  }
  return value;
}

}  // namespace

ClusterValues g_cluster(const InitialClusters& init, const SirParams& params, int r,
                        int n, double t, double tol) {
  params.validate();
  if (t < 0.0) throw std::invalid_argument("time must be t >= 0");
  ClusterValues out{ClusterKind::G, r, n, t, 0.0, 0.0};
  if (t == 0.0) {
    out.value = init.eval(ClusterKind::G, r, n);
    return out;
  }
  const double damp = std::exp(-2.0 * params.gamma * t);
  const auto pmf = poisson_row(2.0 * params.beta * t, tol);
  double cum = 0.0;
  for (double w : pmf) cum += w;
  out.value = damp * g_series(init, params.beta, r, n, t, tol);
  out.truncation_error = damp * std::max(0.0, 1.0 - cum);
  return out;
}

ClusterValues j_cluster(const InitialClusters& init, const SirParams& params, int r,
                        int n, double t, double tol) {
  params.validate();
  if (t < 0.0) throw std::invalid_argument("time must be t >= 0");
  ClusterValues out{ClusterKind::J, r, n, t, 0.0, 0.0};
  if (t == 0.0) {
    out.value = init.eval(ClusterKind::J, r, n);
    return out;
  }
  const double series_tol = tol * 0.1;

  // Still-J part: Poisson growth of the run length.
  const auto pmf = poisson_row(params.beta * t, series_tol);
  double cum = 0.0;
  double still_j = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    still_j += pmf[k] * init.eval(ClusterKind::J, r, n + static_cast<int>(k));
    cum += pmf[k];
  }
  const double e_gamma_t = std::exp(-params.gamma * t);
  out.value = e_gamma_t * still_j;
  out.truncation_error += e_gamma_t * std::max(0.0, 1.0 - cum);

  // Flipped part: J until s, G afterwards.
  if (params.gamma > 0.0) {
    auto integrand = [&](double s) {
      const auto pk = poisson_row(params.beta * s, series_tol);
      double sum = 0.0;
      for (std::size_t k = 0; k < pk.size(); ++k)
        sum += pk[k] *
               g_series(init, params.beta, r, n + static_cast<int>(k), t - s,
                        series_tol);
      return std::exp(-params.gamma * (t - s)) * sum;
    };
    const double integral = adaptive_gauss_legendre(integrand, 0.0, t, tol * 0.1);
    out.value += params.gamma * e_gamma_t * integral;
    // Poisson tails inside the integrand are below series_tol each; fold them
    // into the reported bound together with the quadrature tolerance.
    out.truncation_error += params.gamma * t * 2.0 * series_tol + tol * 0.1;
  }
  return out;
}

ClusterValues h_cluster(const InitialClusters& init, const SirParams& params, int r,
                        int n, double t, double tol, int n_max) {
  params.validate();
  if (t < 0.0) throw std::invalid_argument("time must be t >= 0");
  if (n_max < n) throw std::invalid_argument("n_max must be >= n");
  ClusterValues out{ClusterKind::H, r, n, t, 0.0, 0.0};

  // H(r, n) = sum_k [J(r-k, n+k) + G(r-k, n+k)], terms vanishing once the
  // S-run is impossible (concrete data) or bounded by the initial H values
  // (translation-invariant data).
  bool terminated = false;
  for (int k = 0; n + k <= n_max; ++k) {
    if (init.run_blocked && init.run_blocked(r - k, r + n - 1)) {
      terminated = true;
      break;
    }
    if (!init.run_blocked) {
      // H(m, t) <= e^{-(gamma+beta) t} sum_l (beta t)^l / l! H0(m + l).
      const auto pmf = poisson_row(params.beta * t, tol * 0.1);
      double bound = 0.0;
      for (std::size_t l = 0; l < pmf.size(); ++l)
        bound += pmf[l] *
                 init.eval(ClusterKind::H, r - k, n + k + static_cast<int>(l));
      bound *= std::exp(-params.gamma * t);
      if (bound < tol) {
        out.truncation_error += bound;
        terminated = true;
        break;
      }
    }
    const auto j = j_cluster(init, params, r - k, n + k, t, tol);
    const auto g = g_cluster(init, params, r - k, n + k, t, tol);
    out.value += j.value + g.value;
    out.truncation_error += j.truncation_error + g.truncation_error;
  }
  if (!terminated)
    throw std::runtime_error(
        "h_cluster: initial data admits S-runs longer than n_max (raise n_max)");
  return out;
}

double sol_g(std::function<double(int)> g0, const SirParams& params, int n, double t,
             double tol) {
  const auto pmf = poisson_row(2.0 * params.beta * t, tol);
  double sum = 0.0;
  for (std::size_t b = 0; b < pmf.size(); ++b)
    sum += pmf[b] * g0(n + static_cast<int>(b));
  return std::exp(-2.0 * params.gamma * t) * sum;
}

double sol_j(std::function<double(int)> j0, std::function<double(int)> g0,
             const SirParams& params, int n, double t, double tol) {
  const auto pmf = poisson_row(params.beta * t, tol);
  double value = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k)
    value += pmf[k] * j0(n + static_cast<int>(k));
  value *= std::exp(-params.gamma * t);
  if (params.gamma > 0.0) {
    auto integrand = [&](double s) {
      const auto pl = poisson_row(params.beta * (t - s), tol);
      double sum = 0.0;
      for (std::size_t l = 0; l < pl.size(); ++l)
        sum += pl[l] * sol_g(g0, params, n + static_cast<int>(l), s, tol);
      return std::exp(-params.gamma * (t - s)) * sum;
    };
    value += params.gamma * adaptive_gauss_legendre(integrand, 0.0, t, tol * 0.1);
  }
  return value;
}

double sol_h(std::function<double(int)> h0, std::function<double(int)> g0,
             const SirParams& params, int n, double t, double tol) {
  const auto pmf = poisson_row(params.beta * t, tol);
  double value = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k)
    value += pmf[k] * h0(n + static_cast<int>(k));
  value *= std::exp(-params.gamma * t);
  auto integrand = [&](double s) {
    const auto pl = poisson_row(params.beta * (t - s), tol);
    double sum = 0.0;
    for (std::size_t l = 0; l < pl.size(); ++l)
      sum += pl[l] * sol_g(g0, params, n + static_cast<int>(l), s, tol);
    return std::exp(-params.gamma * (t - s)) * sum;
  };
  value -= params.beta * adaptive_gauss_legendre(integrand, 0.0, t, tol * 0.1);
  return value;
}

double SirDualDistribution::total() const {
  double sum = trap;
  for (const auto& [state, p] : mass) sum += p;
  return sum;
}

SirDualDistribution dual_walk_transient(const SirParams& params, int r, int n,
                                        SirLayer layer, double t, double tol) {
  params.validate();
  if (t < 0.0) throw std::invalid_argument("time must be t >= 0");
  SirDualDistribution out;
  if (t == 0.0) {
    out.mass[{r, n, layer}] = 1.0;
    return out;
  }

  // G-layer propagator from (rr, nn) over an elapsed time tau, weighted by w.
  auto spread_g = [&](int rr, int nn, double tau, double w,
                      SirDualDistribution& acc) {
    const auto pmf = poisson_row(2.0 * params.beta * tau, tol);
    std::vector<double> binom{1.0};
    for (std::size_t b = 0; b < pmf.size(); ++b) {
      if (b > 0) {
        std::vector<double> next(b + 1, 0.0);
        for (std::size_t a = 0; a <= b; ++a) {
          const double lo = a > 0 ? binom[a - 1] : 0.0;
          const double hi = a < b ? binom[a] : 0.0;
          next[a] = 0.5 * (lo + hi);
        }
        binom = std::move(next);
      }
      for (std::size_t a = 0; a <= b; ++a)
        acc.mass[{rr - static_cast<int>(a), nn + static_cast<int>(b), SirLayer::G}] +=
            w * pmf[b] * binom[a];
    }
  };

  if (layer == SirLayer::G) {
    spread_g(r, n, t, std::exp(-2.0 * params.gamma * t), out);
    out.trap = 1.0 - std::exp(-2.0 * params.gamma * t);
    return out;
  }

  // J start: still-J block, flip integral, and the trap via the flip.
  const auto pmf = poisson_row(params.beta * t, tol);
  const double e_gamma_t = std::exp(-params.gamma * t);
  for (std::size_t k = 0; k < pmf.size(); ++k)
    out.mass[{r, n + static_cast<int>(k), SirLayer::J}] = e_gamma_t * pmf[k];

  if (params.gamma > 0.0) {
    // For each Poisson count k of still-J growth, integrate the flip time.
    const int k_cap = poisson_quantile(params.beta * t, tol);
    for (int k = 0; k <= k_cap; ++k) {
      SirDualDistribution partial;
      auto integrand_mass = [&](double s) {
        // Contribution density at flip time s for this k.
        double w = params.gamma * std::exp(-params.gamma * s) *
                   std::exp(-2.0 * params.gamma * (t - s));
        double pk = std::exp(-params.beta * s);
        for (int i = 1; i <= k; ++i) pk *= params.beta * s / i;
        return w * pk;
      };
      // The position spread after the flip depends on s, so integrate each
      // panel with the spread evaluated at the node.
      const auto& g = gl15();
      const int panels = 8;
      const double h = t / panels;
      for (int p = 0; p < panels; ++p) {
        const double a = p * h;
        const double mid = a + 0.5 * h;
        const double half = 0.5 * h;
        for (int i = 0; i < 15; ++i) {
          const double s = mid + half * g.nodes[static_cast<std::size_t>(i)];
          const double w =
              half * g.weights[static_cast<std::size_t>(i)] * integrand_mass(s);
          if (w > 0.0) spread_g(r, n + k, t - s, w, partial);
        }
      }
      for (const auto& [state, p] : partial.mass) out.mass[state] += p;
    }
    const double miss = 1.0 - e_gamma_t;
    out.trap = miss * miss;  // flip then trap: (1 - e^{-gamma t})^2
  }
  return out;
}

int light_cone_guard(double beta, double horizon, double tail) {
  if (beta < 0.0 || horizon < 0.0) throw std::invalid_argument("negative rate or time");
  return poisson_quantile(beta * horizon, tail);
}

}  // namespace ipsdual
