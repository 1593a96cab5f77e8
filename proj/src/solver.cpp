#include "ipsdual/solver.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace ipsdual {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::vector<Index>> adjacency(const SparseGenerator& gen, bool transpose) {
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(gen.dim));
  for (const auto& t : gen.entries) {
    if (t.row() == t.col() || t.value() <= 0.0) continue;
    if (transpose)
      adj[static_cast<std::size_t>(t.col())].push_back(t.row());
    else
      adj[static_cast<std::size_t>(t.row())].push_back(t.col());
  }
  return adj;
}

void reachable(const std::vector<std::vector<Index>>& adj, Index start,
               std::vector<char>& seen) {
  std::vector<Index> stack{start};
  seen[static_cast<std::size_t>(start)] = 1;
  while (!stack.empty()) {
    const Index v = stack.back();
    stack.pop_back();
    for (Index w : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        stack.push_back(w);
      }
    }
  }
}

// Recursive ordering of nonempty occupation words: the first 2^(N-1) have a
// particle at site 1, completed by the (N-1)-site ordering; empty-at-1 words
// follow. Returns the 1-based position.
Index recursive_order(std::uint32_t bits, int n) {
  if (n == 1) return 1;  // bits == 1, the only nonempty word
  const std::uint32_t msb = 1u << (n - 1);
  const std::uint32_t rest = bits & (msb - 1);
  if (bits & msb) return rest == 0 ? 1 : 1 + recursive_order(rest, n - 1);
  return (Index{1} << (n - 1)) + recursive_order(rest, n - 1);
}

}  // namespace

bool strongly_connected(const SparseGenerator& gen) {
  if (gen.dim == 0) return false;
  const auto fwd = adjacency(gen, false);
  const auto bwd = adjacency(gen, true);
  std::vector<char> seen_f(static_cast<std::size_t>(gen.dim), 0);
  std::vector<char> seen_b(static_cast<std::size_t>(gen.dim), 0);
  reachable(fwd, 0, seen_f);
  reachable(bwd, 0, seen_b);
  for (Index i = 0; i < gen.dim; ++i)
    if (!seen_f[static_cast<std::size_t>(i)] || !seen_b[static_cast<std::size_t>(i)])
      return false;
  return true;
}

StationaryMeasure stationary(const SparseGenerator& gen) {
  if (gen.dim > kDenseSolveCap)
    throw std::invalid_argument("stationary solve restricted to dim <= 4096");
  if (!strongly_connected(gen)) {
    // A reducible chain with a unique absorbing state concentrates there.
    std::vector<double> exit_rate(static_cast<std::size_t>(gen.dim), 0.0);
    for (const auto& t : gen.entries)
      if (t.row() != t.col()) exit_rate[static_cast<std::size_t>(t.row())] += t.value();
    std::vector<Index> absorbing;
    for (Index i = 0; i < gen.dim; ++i)
      if (exit_rate[static_cast<std::size_t>(i)] == 0.0) absorbing.push_back(i);
    if (absorbing.size() == 1) {
      StationaryMeasure m;
      m.probabilities = Eigen::VectorXd::Zero(gen.dim);
      m.probabilities[absorbing.front()] = 1.0;
      m.dirac = true;
      m.note = "reducible generator; Dirac at the unique absorbing state";
      return m;
    }
    throw std::runtime_error(
        "reducible generator without a unique absorbing state");
  }
  Eigen::MatrixXd a = gen.dense().transpose();
  a.row(0).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(gen.dim);
  rhs[0] = 1.0;
  Eigen::VectorXd nu = a.partialPivLu().solve(rhs);
  if (nu.minCoeff() < -1e-12)
    throw std::runtime_error("stationary solve produced a negative probability");
  nu = nu.cwiseMax(0.0);
  nu /= nu.sum();
  StationaryMeasure m;
  m.probabilities = nu;
  const Eigen::MatrixXd lt = gen.dense().transpose();
  const double scale = std::max(1.0, lt.cwiseAbs().maxCoeff());
  const double res = (lt * nu).cwiseAbs().maxCoeff() / scale;
  if (std::abs(nu.sum() - 1.0) > 1e-12 || res > 1e-10)
    throw std::runtime_error("stationary solve failed its residual checks");
  return m;
}

Eigen::VectorXd transient(const SparseGenerator& gen, const Eigen::VectorXd& init,
                          double t) {
  if (t < 0.0) throw std::invalid_argument("transient requires t >= 0");
  if (init.size() != gen.dim) throw std::invalid_argument("distribution size mismatch");
  if (t == 0.0) return init;
  if (gen.dim > (Index{1} << 13))
    throw std::invalid_argument("dense transient restricted to dim <= 8192");
  Eigen::MatrixXd e = (t * gen.dense()).exp();
  Eigen::VectorXd out = e.transpose() * init;
  if (std::abs(out.sum() - init.sum()) > 1e-12 * static_cast<double>(gen.dim))
    throw std::runtime_error("transient lost probability mass");
  return out;
}

double spectral_gap(const SparseGenerator& gen) {
  if (gen.dim > kDenseSolveCap)
    throw std::invalid_argument("spectral gap restricted to dim <= 4096");
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(gen.dense(), false)
                                  .eigenvalues();
  double gap = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < ev.size(); ++i) {
    const double re = -ev[i].real();
    if (re > 1e-12) gap = std::min(gap, re);
  }
  if (!std::isfinite(gap))
    throw std::runtime_error("generator has no decaying mode");
  return gap;
}

AbsorptionSolver::AbsorptionSolver(const DualModelSpec& spec, int k_max)
    : spec_(spec), k_max_(k_max) {
  if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
  const auto t0 = Clock::now();
  const int n = spec.n_sites;
  const Index count = (Index{1} << n) - 1;
  order_.assign(static_cast<std::size_t>(count), 0);
  position_of_.assign(static_cast<std::size_t>(count) + 1, -1);
  for (std::uint32_t bits = 1; bits <= static_cast<std::uint32_t>(count); ++bits) {
    const Index pos = recursive_order(bits, n) - 1;
    order_[static_cast<std::size_t>(pos)] = bits;
    position_of_[bits] = pos;
  }

  if (spec.absorb_left == 0.0 && spec.absorb_right == 0.0) {
    // No sink is reachable: the absorbed-count law is the point mass at (0,0)
    // for every initial word, with no linear system to solve.
    no_absorption_ = true;
    resolved_.assign(static_cast<std::size_t>((k_max_ + 1) * (k_max_ + 1)),
                     Eigen::VectorXd::Zero(count));
    resolved_[0] = Eigen::VectorXd::Ones(count);
    solve_seconds_ = seconds_since(t0);
    return;
  }

  // Embedded jump chain pieces per state: non-absorbing moves to nonempty
  // words (matrix P), moves to the empty word, and the two absorptions.
  struct Absorb {
    double prob = 0.0;
    Index target_pos = -1;  // -1: absorption empties the word
  };
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(count, count);
  Eigen::VectorXd to_empty = Eigen::VectorXd::Zero(count);
  std::vector<Absorb> left(static_cast<std::size_t>(count));
  std::vector<Absorb> right(static_cast<std::size_t>(count));
  std::vector<std::pair<std::uint32_t, double>> moves;
  const std::uint32_t site1 = 1u << (n - 1);
  const std::uint32_t siteN = 1u;
  for (Index pos = 0; pos < count; ++pos) {
    const std::uint32_t bits = order_[static_cast<std::size_t>(pos)];
    moves.clear();
    spec.bulk_moves(bits, moves);
    double total = 0.0;
    for (const auto& mv : moves) total += mv.second;
    if (bits & site1) total += spec.absorb_left;
    if (bits & siteN) total += spec.absorb_right;
    if (total <= 0.0)
      throw std::runtime_error("dual jump chain has a frozen nonempty state");
    for (const auto& [to, rate] : moves) {
      if (to == 0)
        to_empty[pos] += rate / total;
      else
        m(pos, position_of_[to]) -= rate / total;
    }
    if ((bits & site1) && spec.absorb_left > 0.0) {
      const std::uint32_t to = bits & ~site1;
      left[static_cast<std::size_t>(pos)] = {spec.absorb_left / total,
                                             to ? position_of_[to] : -1};
    }
    if ((bits & siteN) && spec.absorb_right > 0.0) {
      const std::uint32_t to = bits & ~siteN;
      right[static_cast<std::size_t>(pos)] = {spec.absorb_right / total,
                                              to ? position_of_[to] : -1};
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  resolved_.resize(static_cast<std::size_t>((k_max_ + 1) * (k_max_ + 1)));
  for (int s = 0; s <= 2 * k_max_; ++s) {
    for (int mm = std::max(0, s - k_max_); mm <= std::min(s, k_max_); ++mm) {
      const int nn = s - mm;
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(count);
      if (mm == 0 && nn == 0) rhs = to_empty;
      for (Index pos = 0; pos < count; ++pos) {
        const auto& l = left[static_cast<std::size_t>(pos)];
        if (mm >= 1 && l.prob > 0.0) {
          if (l.target_pos >= 0)
            rhs[pos] += l.prob *
                        resolved_[static_cast<std::size_t>((mm - 1) * (k_max_ + 1) +
                                                           nn)][l.target_pos];
          else if (mm - 1 == 0 && nn == 0)
            rhs[pos] += l.prob;
        }
        const auto& r = right[static_cast<std::size_t>(pos)];
        if (nn >= 1 && r.prob > 0.0) {
          if (r.target_pos >= 0)
            rhs[pos] += r.prob *
                        resolved_[static_cast<std::size_t>(mm * (k_max_ + 1) + nn -
                                                           1)][r.target_pos];
          else if (mm == 0 && nn - 1 == 0)
            rhs[pos] += r.prob;
        }
      }
      Eigen::VectorXd sol = lu.solve(rhs);
      if ((m * sol - rhs).cwiseAbs().maxCoeff() > 1e-9)
        throw std::runtime_error("M_N solve failed (singular jump-chain system)");
      resolved_[static_cast<std::size_t>(mm * (k_max_ + 1) + nn)] = std::move(sol);
    }
  }
  solve_seconds_ = seconds_since(t0);
}

AbsorptionLaw AbsorptionSolver::law(const Configuration& init) const {
  if (init.size() != spec_.n_sites)
    throw std::invalid_argument("initial word has the wrong lattice size");
  AbsorptionLaw out;
  out.k_max = k_max_;
  out.joint = Eigen::MatrixXd::Zero(k_max_ + 1, k_max_ + 1);
  out.solve_seconds = solve_seconds_;
  const auto bits = static_cast<std::uint32_t>(index_of(init) - 1);
  if (bits == 0) {  // already extinct
    out.joint(0, 0) = 1.0;
    return out;
  }
  const Index pos = position_of_[bits];
  for (int m = 0; m <= k_max_; ++m)
    for (int n = 0; n <= k_max_; ++n)
      out.joint(m, n) = resolved_[static_cast<std::size_t>(m * (k_max_ + 1) + n)][pos];
  out.tail = std::max(0.0, 1.0 - out.joint.sum());
  return out;
}

double AbsorptionSolver::left_only(int x) const {
  Configuration c(spec_.n_sites);
  c.set(x, 1);
  if (k_max_ < 1) throw std::invalid_argument("left_only requires k_max >= 1");
  const auto bits = static_cast<std::uint32_t>(index_of(c) - 1);
  return resolved_[static_cast<std::size_t>(1 * (k_max_ + 1) + 0)][position_of_[bits]];
}

double AbsorptionSolver::right_only(int x) const {
  Configuration c(spec_.n_sites);
  c.set(x, 1);
  if (k_max_ < 1) throw std::invalid_argument("right_only requires k_max >= 1");
  const auto bits = static_cast<std::uint32_t>(index_of(c) - 1);
  return resolved_[static_cast<std::size_t>(0 * (k_max_ + 1) + 1)][position_of_[bits]];
}

AbsorptionLaw absorption_law(const DualModelSpec& spec, const DualConfiguration& init,
                             int k_max) {
  AbsorptionSolver solver(spec, k_max);
  AbsorptionLaw base = solver.law(init.sites);
  if (init.left_sink == 0 && init.right_sink == 0) return base;
  // Pre-filled sinks shift the law; mass pushed beyond the cap joins the tail.
  AbsorptionLaw out;
  out.k_max = k_max;
  out.joint = Eigen::MatrixXd::Zero(k_max + 1, k_max + 1);
  out.solve_seconds = base.solve_seconds;
  for (int m = 0; m <= k_max; ++m)
    for (int n = 0; n <= k_max; ++n) {
      const int sm = m + init.left_sink;
      const int sn = n + init.right_sink;
      if (sm <= k_max && sn <= k_max) out.joint(sm, sn) = base.joint(m, n);
    }
  out.tail = std::max(0.0, 1.0 - out.joint.sum());
  return out;
}

AbsorptionLaw absorption_law_via_transient(const DualModelSpec& spec,
                                           const DualConfiguration& init, int k_max,
                                           double live_tol) {
  const auto t0 = Clock::now();
  // Sink counts only grow, so paths ending within the reported block never
  // visit the cap; two spare levels keep cap-parked mass out of the block.
  DualGenerator dual = build_dual(spec, std::max(1, k_max) + 2);
  const Index dim = dual.space.dim();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
  p[dual.space.index_of(init)] = 1.0;

  // exp(t L^T) at a doubling horizon; squaring reuses the Pade factorization.
  double horizon = 1.0;
  Eigen::MatrixXd step = (horizon * dual.gen.dense()).exp().transpose();
  auto live_mass = [&](const Eigen::VectorXd& v) {
    double live = 0.0;
    for (Index i = 0; i < dim; ++i)
      if (dual.space.bits_of(i) != 0) live += v[i];
    return live;
  };
  p = step * p;
  for (int iter = 0; iter < 64 && live_mass(p) > live_tol; ++iter) {
    step = step * step;  // horizon doubles
    p = step * p;
    horizon *= 2.0;
  }
  AbsorptionLaw out;
  out.k_max = k_max;
  out.joint = Eigen::MatrixXd::Zero(k_max + 1, k_max + 1);
  for (int m = 0; m <= k_max; ++m)
    for (int n = 0; n <= k_max; ++n)
      out.joint(m, n) = p[dual.space.index_of(m, 0u, n)];
  out.tail = std::max(0.0, 1.0 - out.joint.sum());
  out.solve_seconds = seconds_since(t0);
  return out;
}

CorrelationValue correlation_direct(const StationaryMeasure& measure, int n,
                                    const std::vector<int>& sites) {
  if (measure.probabilities.size() != (Index{1} << n))
    throw std::invalid_argument("measure dimension does not match N");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i] < 1 || sites[i] > n)
      throw std::invalid_argument("correlation site outside the lattice");
    if (i > 0 && sites[i] <= sites[i - 1])
      throw std::invalid_argument("correlation sites must be strictly increasing");
  }
  std::uint32_t mask = 0;
  for (int x : sites) mask |= 1u << (n - x);
  double value = 0.0;
  for (Index i = 0; i < measure.probabilities.size(); ++i)
    if ((static_cast<std::uint32_t>(i) & mask) == mask)
      value += measure.probabilities[i];
  return CorrelationValue{sites, value, Route::direct, 0.0};
}

namespace {

CorrelationValue correlation_via_duality_impl(const DualModelSpec& spec, int n,
                                              const std::vector<int>& sites,
                                              double tol) {
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i] < 1 || sites[i] > n)
      throw std::invalid_argument("correlation site outside the lattice");
    if (i > 0 && sites[i] <= sites[i - 1])
      throw std::invalid_argument("correlation sites must be strictly increasing");
  }
  const std::size_t ell = sites.size();
  const std::size_t nsub = std::size_t{1} << ell;

  // Survival factors E[prod_{x in T}(1 - eta_x)] for every subset T, from one
  // k-resolved solve; the cap doubles until every tail is below tol.
  std::vector<double> survival(nsub, 1.0);
  std::vector<double> errors(nsub, 0.0);
  for (int cap = 8; cap <= 32; cap *= 2) {
    AbsorptionSolver solver(spec, cap);
    double worst_tail = 0.0;
    for (std::size_t s = 1; s < nsub; ++s) {
      Configuration init(n);
      for (std::size_t j = 0; j < ell; ++j)
        if (s & (std::size_t{1} << j)) init.set(sites[j], 1);
      AbsorptionLaw law = solver.law(init);
      double q = 0.0;
      for (int m = 0; m <= cap; ++m)
        for (int k = 0; k <= cap; ++k)
          if (law.joint(m, k) != 0.0)
            q += law.joint(m, k) * std::pow(spec.c_minus, m) * std::pow(spec.c_plus, k);
      survival[s] = q;
      errors[s] = law.tail;  // c factors are <= 1
      worst_tail = std::max(worst_tail, law.tail);
    }
    if (worst_tail < tol) break;
    if (cap * 2 > 32)
      throw std::runtime_error(
          "absorption tail mass did not reach the requested tolerance within cap 32");
  }
  double rho = 0.0;
  double err = 0.0;
  for (std::size_t s = 0; s < nsub; ++s) {
    const int sign = (std::popcount(s) % 2 == 0) ? 1 : -1;
    rho += sign * survival[s];
    err += errors[s];
  }
  return CorrelationValue{sites, rho, Route::duality, err};
}

}  // namespace

CorrelationValue correlation_via_duality(const DcpParams& params, int n,
                                         const std::vector<int>& sites, double tol) {
  if (params.alpha + params.gamma <= 0.0 && params.beta + params.delta <= 0.0)
    throw std::invalid_argument(
        "duality route requires alpha+gamma > 0 or beta+delta > 0");
  return correlation_via_duality_impl(dual_of(params, n), n, sites, tol);
}

CorrelationValue correlation_via_duality(const GdcpParams& params, int n,
                                         const std::vector<int>& sites, double tol) {
  if (params.alpha + params.gamma <= 0.0 && params.beta + params.delta <= 0.0)
    throw std::invalid_argument(
        "duality route requires alpha+gamma > 0 or beta+delta > 0");
  return correlation_via_duality_impl(dual_of(params, n), n, sites, tol);
}

std::vector<double> signed_subset_sum(const std::vector<double>& values) {
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t s = 0; s < values.size(); ++s) {
    double acc = 0.0;
    for (std::size_t t = s;; t = (t - 1) & s) {
      const int sign = (std::popcount(t) % 2 == 0) ? 1 : -1;
      acc += sign * values[t];
      if (t == 0) break;
    }
    out[s] = acc;
  }
  return out;
}

LemmaBound lemma_bound_check(const DcpParams& params, int n, int y) {
  if (y < 1 || y > n) throw std::invalid_argument("site outside the lattice");
  const DualModelSpec spec = dual_of(params, n);
  AbsorptionSolver solver(spec, 16);
  Configuration init(n);
  init.set(y, 1);
  AbsorptionLaw law = solver.law(init);
  double survive = 0.0;
  double hit = 0.0;
  for (int m = 0; m <= law.k_max; ++m)
    for (int k = 0; k <= law.k_max; ++k) {
      const double w = std::pow(spec.c_minus, m) * std::pow(spec.c_plus, k);
      survive += law.joint(m, k) * w;
      if (w < 1.0) hit += law.joint(m, k);
    }
  LemmaBound out;
  out.rho1 = 1.0 - survive;
  out.bound = hit + law.tail;
  return out;
}

}  // namespace ipsdual
