#include "ipsdual/duality.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

namespace ipsdual {

namespace {

DualityMatrix make_duality_matrix(double c_minus, double c_plus, int n,
                                  int sink_cap) {
  DualityMatrix d;
  d.space = DualSpace{n, sink_cap};
  d.c_minus = c_minus;
  d.c_plus = c_plus;
  const Index rows = Index{1} << n;
  d.values = Eigen::MatrixXd::Zero(rows, d.space.dim());
  for (Index col = 0; col < d.space.dim(); ++col) {
    const std::uint32_t xi = d.space.bits_of(col);
    const double sink_weight = std::pow(c_minus, d.space.left_of(col)) *
                               std::pow(c_plus, d.space.right_of(col));
    for (Index eta = 0; eta < rows; ++eta)
      if ((static_cast<std::uint32_t>(eta) & xi) == 0)  // no occupied dual site
        d.values(eta, col) = sink_weight;
  }
  return d;
}

}  // namespace

DualityMatrix duality_matrix(const DcpParams& params, int n, int sink_cap) {
  params.validate();
  if (params.alpha + params.gamma <= 0.0)
    throw std::invalid_argument("duality matrix needs alpha + gamma > 0 (c_- undefined)");
  if (params.beta + params.delta <= 0.0)
    throw std::invalid_argument("duality matrix needs beta + delta > 0 (c_+ undefined)");
  return make_duality_matrix(params.c_minus(), params.c_plus(), n, sink_cap);
}

DualityMatrix duality_matrix(const GdcpParams& params, int n, int sink_cap) {
  params.validate();
  if (params.alpha + params.gamma <= 0.0)
    throw std::invalid_argument("duality matrix needs alpha + gamma > 0 (c_- undefined)");
  if (params.beta + params.delta <= 0.0)
    throw std::invalid_argument("duality matrix needs beta + delta > 0 (c_+ undefined)");
  return make_duality_matrix(params.c_minus(), params.c_plus(), n, sink_cap);
}

double check_matrix_duality(const SparseGenerator& l, const DualGenerator& dual,
                            const DualityMatrix& d) {
  if (l.dim != d.values.rows() || dual.space.dim() != d.values.cols())
    throw std::invalid_argument("duality check dimension mismatch");
  Eigen::MatrixXd lhs = l.matrix() * d.values;
  Eigen::MatrixXd rhs = d.values * dual.gen.matrix().transpose();
  std::vector<char> excluded(static_cast<std::size_t>(dual.space.dim()), 0);
  for (Index row : dual.truncated_rows) excluded[static_cast<std::size_t>(row)] = 1;
  double residual = 0.0;
  for (Index col = 0; col < d.values.cols(); ++col) {
    if (excluded[static_cast<std::size_t>(col)]) continue;
    const double m = (lhs.col(col) - rhs.col(col)).cwiseAbs().maxCoeff();
    residual = std::max(residual, m);
  }
  return residual;
}

double check_bulk_self_duality(double lambda, double diffusion, int n) {
  const SparseGenerator gen = build_closed_bulk(lambda, diffusion, n);
  const Index dim = gen.dim;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Index eta = 0; eta < dim; ++eta)
    for (Index xi = 0; xi < dim; ++xi)
      h(eta, xi) = (static_cast<std::uint32_t>(eta) & static_cast<std::uint32_t>(xi))
                       ? 0.0
                       : 1.0;
  const Eigen::MatrixXd lm = gen.dense();
  return (lm * h - h * lm.transpose()).cwiseAbs().maxCoeff();
}

double check_ssep_parametric_duality(double a1, double a2, double a3, double a4,
                                     int n, double diffusion) {
  const SparseGenerator gen = build_closed_ssep(n, diffusion);
  auto g = [&](int eta, int xi) {
    const double base = a1 + a2 * eta;
    const double expo = a3 + a4 * xi;
    if (expo == 0.0) return 1.0;  // 0^0 = 1 so (1,-1,0,1) reduces to H
    return std::pow(base, expo);
  };
  const Index dim = gen.dim;
  Eigen::MatrixXd h = Eigen::MatrixXd::Ones(dim, dim);
  for (Index eta = 0; eta < dim; ++eta)
    for (Index xi = 0; xi < dim; ++xi) {
      double v = 1.0;
      for (int x = 0; x < n; ++x)
        v *= g((eta >> x) & 1, (xi >> x) & 1);
      h(eta, xi) = v;
    }
  const Eigen::MatrixXd lm = gen.dense();
  return (lm * h - h * lm.transpose()).cwiseAbs().maxCoeff();
}

namespace {

// SIR window machinery: states S=0, I=1, R=2 over [lo, hi].
struct Window {
  int lo, hi;
  std::vector<std::uint8_t> s;
  std::uint8_t at(int x) const { return s[static_cast<std::size_t>(x - lo)]; }
  void set(int x, std::uint8_t v) { s[static_cast<std::size_t>(x - lo)] = v; }
};

double d_fn(const Window& w, int r, int n, SirLayer layer) {
  const std::uint8_t leftmark = layer == SirLayer::G ? 1 : 2;  // I or R
  if (w.at(r - 1) != leftmark) return 0.0;
  for (int j = 0; j < n; ++j)
    if (w.at(r + j) != 0) return 0.0;
  return w.at(r + n) == 1 ? 1.0 : 0.0;
}

}  // namespace

double check_sir_duality(int r, int n, SirLayer layer, const SirParams& params) {
  params.validate();
  if (n < 1) throw std::invalid_argument("cluster length must be n >= 1");
  const int lo = r - 2;
  const int hi = r + n + 1;
  const int len = hi - lo + 1;
  Window w{lo, hi, std::vector<std::uint8_t>(static_cast<std::size_t>(len), 0)};

  double residual = 0.0;
  std::size_t total = 1;
  for (int i = 0; i < len; ++i) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t c = code;
    for (int i = 0; i < len; ++i) {
      w.s[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(c % 3);
      c /= 3;
    }
    const double d0 = d_fn(w, r, n, layer);

    // L^SIR acting on eta: infection terms A_y (I at y infects y+1) and
    // B_y (I at y infects y-1), recovery C_y.
    double lhs = 0.0;
    Window tmp = w;
    for (int y = lo; y <= hi - 1; ++y) {  // A_y needs sites y, y+1
      if (w.at(y) == 1 && w.at(y + 1) == 0) {
        tmp.set(y + 1, 1);
        lhs += params.beta * (d_fn(tmp, r, n, layer) - d0);
        tmp.set(y + 1, 0);
      }
    }
    for (int y = lo + 1; y <= hi; ++y) {  // B_y needs sites y-1, y
      if (w.at(y) == 1 && w.at(y - 1) == 0) {
        tmp.set(y - 1, 1);
        lhs += params.beta * (d_fn(tmp, r, n, layer) - d0);
        tmp.set(y - 1, 0);
      }
    }
    for (int y = lo; y <= hi; ++y) {  // C_y
      if (w.at(y) == 1) {
        const std::uint8_t old = tmp.at(y);
        tmp.set(y, 2);
        lhs += params.gamma * (d_fn(tmp, r, n, layer) - d0);
        tmp.set(y, old);
      }
    }

    // Dual generator acting on (r, n, i); the (r, n+1) target needs site
    // r+n+1, still inside the window.
    double rhs = params.beta * (d_fn(w, r, n + 1, layer) - d0);
    if (layer == SirLayer::G) {
      rhs += params.beta * (d_fn(w, r - 1, n + 1, SirLayer::G) - d0);
      rhs += 2.0 * params.gamma * (0.0 - d0);  // trap, d(eta, trap) = 0
    } else {
      rhs += params.gamma * (d_fn(w, r, n, SirLayer::G) - d0);
    }
    residual = std::max(residual, std::abs(lhs - rhs));
  }
  return residual;
}

ProcessDualityResult check_process_duality(const SparseGenerator& l,
                                           const DualGenerator& dual,
                                           const DualityMatrix& d, double t) {
  if (t < 0.0) throw std::invalid_argument("process duality requires t >= 0");
  const Eigen::MatrixXd e = (t * l.dense()).exp();
  const Eigen::MatrixXd e_dual = (t * dual.gen.dense()).exp();
  const Eigen::MatrixXd lhs = e * d.values;
  const Eigen::MatrixXd rhs = d.values * e_dual.transpose();

  ProcessDualityResult out;
  const int cap = dual.space.sink_cap;
  for (Index col = 0; col < dual.space.dim(); ++col) {
    if (dual.space.left_of(col) != 0 || dual.space.right_of(col) != 0) continue;
    out.residual =
        std::max(out.residual, (lhs.col(col) - rhs.col(col)).cwiseAbs().maxCoeff());
    double capped = 0.0;
    for (Index to = 0; to < dual.space.dim(); ++to)
      if (dual.space.left_of(to) == cap || dual.space.right_of(to) == cap)
        capped += e_dual(col, to);
    out.cap_mass = std::max(out.cap_mass, capped);
  }
  return out;
}

}  // namespace ipsdual
