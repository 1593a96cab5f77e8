#ifndef IPSDUAL_LATTICE_HPP
#define IPSDUAL_LATTICE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace ipsdual {

using Index = std::int64_t;

// Exact routes enumerate all 2^N configurations; beyond this cap only the
// Monte-Carlo path is available.
inline constexpr int kExactSiteCap = 20;

// Occupation word over the chain {1,...,N}. Sites are addressed 1-based
// everywhere in the public interface; storage is 0-based.
struct Configuration {
  std::vector<std::uint8_t> sites;

  Configuration() = default;
  explicit Configuration(int n) : sites(static_cast<std::size_t>(n), 0) {}
  Configuration(std::initializer_list<int> vals) {
    sites.reserve(vals.size());
    for (int v : vals) sites.push_back(static_cast<std::uint8_t>(v));
  }

  int size() const { return static_cast<int>(sites.size()); }
  std::uint8_t at(int x) const { return sites[static_cast<std::size_t>(x - 1)]; }
  void set(int x, std::uint8_t v) { sites[static_cast<std::size_t>(x - 1)] = v; }
  bool empty_config() const {
    for (auto s : sites)
      if (s) return false;
    return true;
  }
  int particle_count() const {
    int c = 0;
    for (auto s : sites) c += s;
    return c;
  }
  bool operator==(const Configuration&) const = default;
  std::string to_string() const;
};

// Open DCP rates: reservoirs (alpha, gamma) on the left, (delta, beta) on the
// right, infection lambda, exclusion rate diffusion. Death rate is 1.
struct DcpParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double lambda = 1.0;
  double diffusion = 0.0;

  // Left/right reservoir parameters c_- = gamma/(alpha+gamma),
  // c_+ = beta/(beta+delta); the reservoir densities are 1-c_-+ and 1-c_+.
  // Zero-rate boundaries (no absorption possible on that side) yield 0.
  double c_minus() const { return alpha + gamma > 0 ? gamma / (alpha + gamma) : 0.0; }
  double c_plus() const { return beta + delta > 0 ? beta / (beta + delta) : 0.0; }

  void validate() const;
};

// GDCP: boundary rates carry tilde semantics; death rates mu1 (empty
// neighbor side) and mu2 (occupied neighbor side) per bond.
struct GdcpParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double lambda = 1.0;
  double diffusion = 0.0;
  double mu1 = 0.5;
  double mu2 = 0.5;

  double c_minus() const { return alpha + gamma > 0 ? gamma / (alpha + gamma) : 0.0; }
  double c_plus() const { return beta + delta > 0 ? beta / (beta + delta) : 0.0; }

  // The annihilating-dual regime requires mu1 = lambda + mu2 exactly.
  bool annihilating() const { return mu1 == lambda + mu2; }
  static GdcpParams make_annihilating(double lambda, double mu2, double diffusion,
                                      double alpha, double gamma, double beta,
                                      double delta);

  void validate() const;
};

// SIR rates: infection beta (I infects S neighbors), recovery gamma. These
// have nothing to do with the reservoir rates of the same name.
struct SirParams {
  double beta = 1.0;
  double gamma = 1.0;

  void validate() const;
};

// Canonical 1-based configuration index i = 1 + sum_k 2^(N-k) eta_k.
Index index_of(const Configuration& config);
Configuration config_of(Index index, int n);

// Flip of the occupation variable at site x.
Configuration flip(const Configuration& config, int x);
// Particle jump x -> y; returns config unchanged unless eta_x(1-eta_y) = 1.
Configuration jump(const Configuration& config, int x, int y);

}  // namespace ipsdual

#endif  // IPSDUAL_LATTICE_HPP
