#ifndef IPSDUAL_SIR_HPP
#define IPSDUAL_SIR_HPP

#include <functional>
#include <map>
#include <vector>

#include "ipsdual/generator.hpp"
#include "ipsdual/lattice.hpp"

namespace ipsdual {

enum class SirState : std::uint8_t { S = 0, I = 1, R = 2 };

// Finite window of Z with every site outside frozen at outside_state.
struct SirConfiguration {
  int lo = 0;
  std::vector<SirState> states;
  SirState outside = SirState::S;

  int hi() const { return lo + static_cast<int>(states.size()) - 1; }
  SirState at(int x) const {
    if (x < lo || x > hi()) return outside;
    return states[static_cast<std::size_t>(x - lo)];
  }
  void set(int x, SirState v) { states[static_cast<std::size_t>(x - lo)] = v; }
  std::vector<int> infected_sites() const;
};

enum class ClusterKind { G, J, H };

// Indicator of the cluster at (r, n): G needs I at r-1, J needs R at r-1,
// H drops the left endpoint; all need S on [r, r+n-1] and I at r+n.
int cluster_indicator(const SirConfiguration& eta, int r, int n, ClusterKind kind);

// Initial cluster data: either indicators of a concrete configuration or a
// caller-supplied evaluator (product / translation-invariant measures).
struct InitialClusters {
  std::function<double(ClusterKind, int r, int n)> eval;
  bool translation_invariant = false;
  // Set for concrete configurations; used to terminate the H telescoping.
  std::function<bool(int lo, int hi)> run_blocked;  // some site in [lo,hi] not S at t=0
};

InitialClusters clusters_of(const SirConfiguration& eta);
InitialClusters translation_invariant_clusters(
    std::function<double(ClusterKind, int n)> eval);

struct ClusterValues {
  ClusterKind kind = ClusterKind::G;
  int r = 0;
  int n = 1;
  double t = 0.0;
  double value = 0.0;
  double truncation_error = 0.0;
};

ClusterValues g_cluster(const InitialClusters& init, const SirParams& params, int r,
                        int n, double t, double tol);
ClusterValues j_cluster(const InitialClusters& init, const SirParams& params, int r,
                        int n, double t, double tol);
ClusterValues h_cluster(const InitialClusters& init, const SirParams& params, int r,
                        int n, double t, double tol, int n_max);

// Translation-invariant closed forms (independent oracles): the G series,
// the two-term J solution, and the H solution of the ODE system.
double sol_g(std::function<double(int)> g0, const SirParams& params, int n, double t,
             double tol);
double sol_j(std::function<double(int)> j0, std::function<double(int)> g0,
             const SirParams& params, int n, double t, double tol);
double sol_h(std::function<double(int)> h0, std::function<double(int)> g0,
             const SirParams& params, int n, double t, double tol);

// Closed-form transient of the bilayer dual walk started at (r, n, layer):
// probabilities over reachable states plus the trap.
struct SirDualDistribution {
  std::map<std::tuple<int, int, SirLayer>, double> mass;  // (r, n, layer)
  double trap = 0.0;

  double total() const;
};

SirDualDistribution dual_walk_transient(const SirParams& params, int r, int n,
                                        SirLayer layer, double t, double tol = 1e-14);

// Smallest margin g with P[Poisson(beta * horizon) >= g] < tail.
int light_cone_guard(double beta, double horizon, double tail = 1e-10);

}  // namespace ipsdual

#endif  // IPSDUAL_SIR_HPP
