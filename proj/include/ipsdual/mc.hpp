#ifndef IPSDUAL_MC_HPP
#define IPSDUAL_MC_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ipsdual/generator.hpp"
#include "ipsdual/lattice.hpp"
#include "ipsdual/sir.hpp"

namespace ipsdual {

// xoshiro256++ seeded through SplitMix64 from (seed, stream): deterministic,
// independent replica streams.
class SplitRng {
 public:
  SplitRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next();
  double uniform();  // (0, 1)
  double exponential(double rate);

 private:
  std::uint64_t s_[4];
};

// Unified continuous-time chain over an occupation word: the DCP/GDCP and
// their purely absorbing duals differ only in the boundary block.
struct ChainSpec {
  int n_sites = 1;
  double lambda = 1.0;
  double diffusion = 0.0;
  double mu1 = 0.5;
  double mu2 = 0.5;
  bool uniform_edge_death = true;
  bool dual = false;
  // reservoirs (primal models)
  double alpha = 0.0, gamma = 0.0, delta = 0.0, beta = 0.0;
  // sinks (dual models)
  double absorb_left = 0.0, absorb_right = 0.0;
};

ChainSpec chain_of(const DcpParams& params, int n);
ChainSpec chain_of(const GdcpParams& params, int n);
ChainSpec chain_of(const DualModelSpec& spec);

struct SimOutcome {
  Configuration final_state;
  long long events = 0;
  double time = 0.0;
  bool extinct = false;
  double tau = 0.0;  // extinction time, valid when extinct
  int absorbed_left = 0, absorbed_right = 0;  // duals only
  std::uint64_t stream = 0;
  bool step_budget_exceeded = false;
};

// Exact-in-law Gillespie run to t_end.
SimOutcome simulate(const ChainSpec& spec, const Configuration& init, double t_end,
                    std::uint64_t seed, std::uint64_t stream = 0);

// As simulate, invoking on_event(t, event_index, state) after every event.
SimOutcome simulate_logged(
    const ChainSpec& spec, const Configuration& init, double t_end,
    std::uint64_t seed, std::uint64_t stream,
    const std::function<void(double, long long, const Configuration&)>& on_event);

// Runs a dual chain until the bulk empties; records tau and both sink counts.
SimOutcome simulate_dual_until_extinct(const ChainSpec& spec,
                                       const DualConfiguration& init,
                                       std::uint64_t seed, std::uint64_t stream = 0,
                                       long long max_events = 50000000);

struct SirSimOutcome {
  SirConfiguration final_state;
  long long events = 0;
  bool edge_touched = false;  // light-cone guard violated
  std::uint64_t stream = 0;
};

SirSimOutcome simulate_sir(const SirParams& params, const SirConfiguration& init,
                           double t_end, std::uint64_t seed, std::uint64_t stream = 0);

// Time-averaged occupancy of one site over [t_burn, t_burn + t_avg].
double occupancy_time_average(const ChainSpec& spec, const Configuration& init,
                              int site, double t_burn, double t_avg,
                              std::uint64_t seed, std::uint64_t stream);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  int replicas = 0;
  std::uint64_t seed = 0;
};

// Replica r runs with an independent stream derived from (seed, r); identical
// (seed, replicas) give bit-identical results for any thread count.
Estimate estimate(int replicas, std::uint64_t seed, int threads,
                  const std::function<double(std::uint64_t, SplitRng&)>& replica_value);

// Single Gillespie steps restarted from a fixed state; counts of the resulting
// states, keyed by a textual state code. Feeds the chi-square gate against the
// generator's normalized rates.
struct StepFrequencies {
  std::map<std::string, long long> counts;
  long long steps = 0;
};

StepFrequencies single_step_frequencies(const ChainSpec& spec,
                                        const Configuration& from, long long steps,
                                        std::uint64_t seed);
StepFrequencies single_step_frequencies_sir(const SirParams& params,
                                            const SirConfiguration& from,
                                            long long steps, std::uint64_t seed);

// State codes used by StepFrequencies.
std::string chain_state_code(const Configuration& c, int absorbed_left,
                             int absorbed_right);
std::string sir_state_code(const SirConfiguration& c);

}  // namespace ipsdual

#endif  // IPSDUAL_MC_HPP
