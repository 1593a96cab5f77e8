#ifndef IPSDUAL_GENERATOR_HPP
#define IPSDUAL_GENERATOR_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ipsdual/lattice.hpp"

namespace ipsdual {

// Intensity matrix over an indexed finite state space. Entries are stored as
// merged (row, col, rate) triplets, 0-based, with the diagonal fixed up so
// every row sums to zero.
struct SparseGenerator {
  Index dim = 0;
  std::vector<Eigen::Triplet<double>> entries;

  Eigen::SparseMatrix<double> matrix() const;
  Eigen::MatrixXd dense() const;
};

// Accumulates off-diagonal rates, merges duplicate (row, col) contributions
// by summation, then writes the diagonal.
class GeneratorAssembler {
 public:
  explicit GeneratorAssembler(Index dim) : dim_(dim) {}
  void add(Index from, Index to, double rate);
  SparseGenerator finish();

 private:
  Index dim_;
  std::vector<Eigen::Triplet<double>> raw_;
};

// Asserts nonnegative off-diagonals and zero row sums (within tol).
void verify_generator(const SparseGenerator& gen, double tol = 1e-14);

SparseGenerator build_dcp(const DcpParams& params, int n);
SparseGenerator build_gdcp(const GdcpParams& params, int n);
// Closed-boundary exclusion process alone (self-duality checks).
SparseGenerator build_closed_ssep(int n, double diffusion);
// Closed-boundary CP + SSEP bulk (no reservoirs), death rate 1.
SparseGenerator build_closed_bulk(double lambda, double diffusion, int n);

// Common description of the purely absorbing dual of a DCP or GDCP:
// bulk rates plus one absorption rate per edge site.
struct DualModelSpec {
  int n_sites = 1;
  double lambda = 0.0;     // dual birth rate
  double diffusion = 0.0;  // dual exclusion rate
  double mu1 = 0.5;        // death, empty neighbor side
  double mu2 = 0.5;        // death, occupied neighbor side
  bool uniform_edge_death = true;  // DCP dual: flat death rate 1 via edge halves
  double absorb_left = 0.0;
  double absorb_right = 0.0;
  double c_minus = 0.0;
  double c_plus = 0.0;

  // All moves of one dual particle configuration except absorptions.
  // Appends (target bits, rate); bits use the order_i convention
  // (site 1 = most significant).
  void bulk_moves(std::uint32_t bits,
                  std::vector<std::pair<std::uint32_t, double>>& out) const;
  double site_death_rate(std::uint32_t bits, int x) const;  // x 1-based
};

DualModelSpec dual_of(const DcpParams& params, int n);
DualModelSpec dual_of(const GdcpParams& params, int n);  // throws if theorem hypotheses fail

// Left sink count, bulk occupation word, right sink count.
struct DualConfiguration {
  int left_sink = 0;
  Configuration sites;
  int right_sink = 0;

  bool operator==(const DualConfiguration&) const = default;
};

// Truncated dual state space: sinks capped at sink_cap.
struct DualSpace {
  int n_sites = 1;
  int sink_cap = 8;

  Index dim() const {
    return (Index{1} << n_sites) * (sink_cap + 1) * (sink_cap + 1);
  }
  Index index_of(int m, std::uint32_t bits, int n) const;
  Index index_of(const DualConfiguration& d) const;
  DualConfiguration state_of(Index i) const;
  std::uint32_t bits_of(Index i) const;
  int left_of(Index i) const;
  int right_of(Index i) const;
};

struct DualGenerator {
  DualSpace space;
  DualModelSpec model;
  SparseGenerator gen;
  // Rows whose absorption transition would push a sink beyond the cap; those
  // rows are incomplete and excluded from exact duality checks.
  std::vector<Index> truncated_rows;
};

DualGenerator build_dual(const DcpParams& params, int n, int sink_cap);
DualGenerator build_dual(const GdcpParams& params, int n, int sink_cap);
DualGenerator build_dual(const DualModelSpec& spec, int sink_cap);

// SIR dual bilayer walk on a finite (r, n) box, plus trap and a flagged
// absorbing overflow state for transitions leaving the box.
enum class SirLayer : std::uint8_t { G, J };

struct SirDualState {
  bool trap = false;
  int r = 0;
  int n = 1;
  SirLayer layer = SirLayer::G;

  static SirDualState make_trap() { return SirDualState{true, 0, 1, SirLayer::G}; }
};

struct SirDualSpace {
  int r_lo = 0;
  int r_hi = 0;
  int n_max = 1;

  Index dim() const { return 2 * (r_hi - r_lo + 1) * n_max + 2; }  // + trap + overflow
  Index trap_index() const { return dim() - 2; }
  Index overflow_index() const { return dim() - 1; }
  Index index_of(int r, int n, SirLayer layer) const;
  SirDualState state_of(Index i) const;
  bool contains(int r, int n) const { return r >= r_lo && r <= r_hi && n >= 1 && n <= n_max; }
};

struct SirDualGenerator {
  SirDualSpace space;
  SirParams params;
  SparseGenerator gen;
};

SirDualGenerator build_sir_dual(const SirParams& params, int r_lo, int r_hi, int n_max);

// Fast-stirring birth-death chain on {0..N}. The `paper` convention uses the
// printed bulk infection rate lambda*n*(1-n/N); `corrected` doubles it, which
// is the convention that reproduces the exact D -> infinity limit.
enum class StirringConvention { paper, corrected };

struct BirthDeathChain {
  std::vector<double> up;    // up[k]: k -> k+1, k = 0..N-1
  std::vector<double> down;  // down[k]: k+1 -> k, k = 0..N-1

  // Detailed-balance stationary law; Dirac at 0 (flagged) when 0 is absorbing.
  std::pair<std::vector<double>, bool> stationary() const;
};

BirthDeathChain fast_stirring_chain(const DcpParams& params, int n,
                                    StirringConvention convention);

// (row, col, rate) triples, 1-based, diagonal included.
void write_matrix_market(const SparseGenerator& gen, std::ostream& os);

}  // namespace ipsdual

#endif  // IPSDUAL_GENERATOR_HPP
