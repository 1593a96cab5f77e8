#ifndef IPSDUAL_SOLVER_HPP
#define IPSDUAL_SOLVER_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ipsdual/generator.hpp"
#include "ipsdual/lattice.hpp"

namespace ipsdual {

// Dense null-space solves are restricted to this dimension.
inline constexpr Index kDenseSolveCap = Index{1} << 12;

struct StationaryMeasure {
  Eigen::VectorXd probabilities;
  bool dirac = false;  // reducible chain, known Dirac answer returned
  std::string note;
};

bool strongly_connected(const SparseGenerator& gen);

// Unique probability vector in the null space of L^T. Reducible chains with a
// unique absorbing state yield the Dirac answer with the dirac flag set.
StationaryMeasure stationary(const SparseGenerator& gen);

// Distribution at time t >= 0 from init, i.e. exp(t L^T) init.
Eigen::VectorXd transient(const SparseGenerator& gen, const Eigen::VectorXd& init,
                          double t);

// Spectral gap: smallest nonzero |Re| over the generator's eigenvalues.
// Feeds the 10/gap burn-in heuristic of the Monte-Carlo stationary estimates.
double spectral_gap(const SparseGenerator& gen);

// Joint law of the absorbed counts (left, right) up to k_max each.
struct AbsorptionLaw {
  int k_max = 0;
  Eigen::MatrixXd joint;  // joint(m, n) = P[xi_0(inf) = m, xi_{N+1}(inf) = n]
  double tail = 0.0;      // probability mass beyond the cap
  double solve_seconds = 0.0;
};

// First-jump conditioning on the embedded jump chain: the M_N systems, one LU
// factorization per dual model, solved k-resolved for every initial word at
// once. States follow the recursive ordering (site-1-occupied block first).
class AbsorptionSolver {
 public:
  AbsorptionSolver(const DualModelSpec& spec, int k_max);

  int k_max() const { return k_max_; }
  double solve_seconds() const { return solve_seconds_; }
  const DualModelSpec& spec() const { return spec_; }

  AbsorptionLaw law(const Configuration& init) const;
  // P[only one particle absorbed, on the given side] from a single particle
  // at site x; the u_x / v_x of the annihilating-dual route.
  double left_only(int x) const;
  double right_only(int x) const;

 private:
  DualModelSpec spec_;
  int k_max_;
  double solve_seconds_ = 0.0;
  bool no_absorption_ = false;
  std::vector<std::uint32_t> order_;       // position -> occupation bits
  std::vector<Index> position_of_;         // bits -> position (-1 for empty)
  std::vector<Eigen::VectorXd> resolved_;  // (m*(k_max+1)+n) -> law over states
};

AbsorptionLaw absorption_law(const DualModelSpec& spec, const DualConfiguration& init,
                             int k_max);

// Independent route: matrix exponential of the truncated dual generator,
// run until the live (non-extinct) mass falls below live_tol.
AbsorptionLaw absorption_law_via_transient(const DualModelSpec& spec,
                                           const DualConfiguration& init, int k_max,
                                           double live_tol = 1e-12);

enum class Route { direct, duality, monte_carlo };

struct CorrelationValue {
  std::vector<int> sites;
  double value = 0.0;
  Route route = Route::direct;
  double error_bound = 0.0;
};

// E_nu[prod eta_x] over the given strictly increasing sites.
CorrelationValue correlation_direct(const StationaryMeasure& measure, int n,
                                    const std::vector<int>& sites);

// Duality route: E[prod(1-eta)] from dual absorption laws, inverted to the
// ell-point function by inclusion-exclusion. The sink cap starts at 8 and
// doubles until the tail mass is below tol (up to 32).
CorrelationValue correlation_via_duality(const DcpParams& params, int n,
                                         const std::vector<int>& sites, double tol);
CorrelationValue correlation_via_duality(const GdcpParams& params, int n,
                                         const std::vector<int>& sites, double tol);

// Signed subset-sum transform S -> sum_{T subset S} (-1)^|T| v[T]; an
// involution exchanging {rho_k} and E[prod(1-eta)] values.
std::vector<double> signed_subset_sum(const std::vector<double>& values);

struct LemmaBound {
  double rho1 = 0.0;
  double bound = 0.0;
};

// rho_1(y) <= P[at least one absorption with c-weight < 1], both sides
// computed from the dual absorption law.
LemmaBound lemma_bound_check(const DcpParams& params, int n, int y);

}  // namespace ipsdual

#endif  // IPSDUAL_SOLVER_HPP
