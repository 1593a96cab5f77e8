#include "ipsdual/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace ipsdual {

namespace {

void require_finite_nonneg(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(name) + " must be finite and >= 0");
}

}  // namespace

std::string Configuration::to_string() const {
  std::string s;
  s.reserve(sites.size() + 2);
  s.push_back('(');
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (i) s.push_back(',');
    s.push_back(sites[i] ? '1' : '0');
  }
  s.push_back(')');
  return s;
}

void DcpParams::validate() const {
  require_finite_nonneg(alpha, "alpha");
  require_finite_nonneg(beta, "beta");
  require_finite_nonneg(gamma, "gamma");
  require_finite_nonneg(delta, "delta");
  require_finite_nonneg(diffusion, "diffusion");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("lambda must be finite and > 0");
}

void GdcpParams::validate() const {
  require_finite_nonneg(alpha, "alpha");
  require_finite_nonneg(beta, "beta");
  require_finite_nonneg(gamma, "gamma");
  require_finite_nonneg(delta, "delta");
  require_finite_nonneg(diffusion, "diffusion");
  require_finite_nonneg(lambda, "lambda");
  require_finite_nonneg(mu1, "mu1");
  require_finite_nonneg(mu2, "mu2");
}

GdcpParams GdcpParams::make_annihilating(double lambda, double mu2, double diffusion,
                                         double alpha, double gamma, double beta,
                                         double delta) {
  GdcpParams p;
  p.lambda = lambda;
  p.mu2 = mu2;
  p.mu1 = lambda + mu2;
  p.diffusion = diffusion;
  p.alpha = alpha;
  p.gamma = gamma;
  p.beta = beta;
  p.delta = delta;
  p.validate();
  return p;
}

void SirParams::validate() const {
  require_finite_nonneg(beta, "beta");
  require_finite_nonneg(gamma, "gamma");
}

Index index_of(const Configuration& config) {
  const int n = config.size();
  if (n < 1) throw std::invalid_argument("configuration must have N >= 1 sites");
  Index i = 1;
  for (int k = 1; k <= n; ++k) {
    const auto v = config.at(k);
    if (v > 1) throw std::invalid_argument("configuration entries must be 0 or 1");
    i += static_cast<Index>(v) << (n - k);
  }
  return i;
}

Configuration config_of(Index index, int n) {
  if (n < 1) throw std::invalid_argument("configuration must have N >= 1 sites");
  if (index < 1 || index > (Index{1} << n))
    throw std::out_of_range("configuration index out of range");
  Configuration c(n);
  Index bits = index - 1;
  for (int k = n; k >= 1; --k) {
    c.set(k, static_cast<std::uint8_t>(bits & 1));
    bits >>= 1;
  }
  return c;
}

Configuration flip(const Configuration& config, int x) {
  if (x < 1 || x > config.size()) throw std::out_of_range("flip: site outside the lattice");
  Configuration c = config;
  c.set(x, static_cast<std::uint8_t>(1 - c.at(x)));
  return c;
}

Configuration jump(const Configuration& config, int x, int y) {
  if (x < 1 || x > config.size() || y < 1 || y > config.size())
    throw std::out_of_range("jump: site outside the lattice");
  if (config.at(x) == 1 && config.at(y) == 0) {
    Configuration c = config;
    c.set(x, 0);
    c.set(y, 1);
    return c;
  }
  return config;
}

}  // namespace ipsdual
