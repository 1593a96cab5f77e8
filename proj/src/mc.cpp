#include "ipsdual/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace ipsdual {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

SplitRng::SplitRng(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed ^ (stream * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL);
  for (auto& s : s_) s = splitmix64(x);
  // avoid the all-zero state, however unlikely
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x1ULL;
}

std::uint64_t SplitRng::next() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double SplitRng::uniform() {
  // 53-bit mantissa in (0, 1); never returns 0
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double SplitRng::exponential(double rate) {
  return -std::log(uniform()) / rate;
}

ChainSpec chain_of(const DcpParams& params, int n) {
  params.validate();
  if (n < 1) throw std::invalid_argument("lattice size must be N >= 1");
  ChainSpec s;
  s.n_sites = n;
  s.lambda = params.lambda;
  s.diffusion = params.diffusion;
  s.mu1 = s.mu2 = 0.5;
  s.uniform_edge_death = true;
  s.alpha = params.alpha;
  s.gamma = params.gamma;
  s.delta = params.delta;
  s.beta = params.beta;
  return s;
}

ChainSpec chain_of(const GdcpParams& params, int n) {
  params.validate();
  if (n < 1) throw std::invalid_argument("lattice size must be N >= 1");
  ChainSpec s;
  s.n_sites = n;
  s.lambda = params.lambda;
  s.diffusion = params.diffusion;
  s.mu1 = params.mu1;
  s.mu2 = params.mu2;
  s.uniform_edge_death = false;
  s.alpha = params.alpha;
  s.gamma = params.gamma;
  s.delta = params.delta;
  s.beta = params.beta;
  return s;
}

ChainSpec chain_of(const DualModelSpec& spec) {
  ChainSpec s;
  s.n_sites = spec.n_sites;
  s.lambda = spec.lambda;
  s.diffusion = spec.diffusion;
  s.mu1 = spec.mu1;
  s.mu2 = spec.mu2;
  s.uniform_edge_death = spec.uniform_edge_death;
  s.dual = true;
  s.absorb_left = spec.absorb_left;
  s.absorb_right = spec.absorb_right;
  return s;
}

namespace {

// Per-site event rates, recomputed incrementally around each event site.
// Event codes within a site, in fixed selection order.
enum SiteEvent : int {
  kDeath = 0,        // occupied -> empty (death or boundary removal)
  kBirth = 1,        // empty -> occupied (infection or boundary insertion)
  kHopLeft = 2,      // particle hops x -> x-1
  kHopRight = 3,     // particle hops x -> x+1
  kAbsorbLeft = 4,   // dual: edge particle absorbed into the left sink
  kAbsorbRight = 5,  // dual: edge particle absorbed into the right sink
  kEventCount = 6
};

class ChainSimulator {
 public:
  ChainSimulator(const ChainSpec& spec, const Configuration& init)
      : spec_(spec), state_(init.sites) {
    if (init.size() != spec.n_sites)
      throw std::invalid_argument("initial configuration size mismatch");
    const std::size_t n = state_.size();
    rates_.assign(n * kEventCount, 0.0);
    site_total_.assign(n, 0.0);
    for (int x = 0; x < spec_.n_sites; ++x) refresh_site(x);
    rebuild_total();
  }

  double total_rate() const { return total_; }
  const std::vector<std::uint8_t>& state() const { return state_; }
  int absorbed_left() const { return absorbed_left_; }
  int absorbed_right() const { return absorbed_right_; }
  int particles() const {
    int c = 0;
    for (auto v : state_) c += v;
    return c;
  }

  // Chooses and applies one event (the holding time is drawn by the caller).
  void select_and_apply(SplitRng& rng) {
    double u = rng.uniform() * total_;
    int x = 0;
    const int n = spec_.n_sites;
    for (; x < n - 1; ++x) {
      if (u < site_total_[static_cast<std::size_t>(x)]) break;
      u -= site_total_[static_cast<std::size_t>(x)];
    }
    int ev = 0;
    for (; ev < kEventCount - 1; ++ev) {
      const double r = rates_[static_cast<std::size_t>(x * kEventCount + ev)];
      if (u < r) break;
      u -= r;
    }
    apply(x, static_cast<SiteEvent>(ev));
    if (++events_since_rebuild_ >= 65536) {
      for (int i = 0; i < n; ++i) refresh_site(i);
      rebuild_total();
      events_since_rebuild_ = 0;
    }
  }

 private:
  double site_death_rate(int x) const {  // x 0-based
    double rate = 0.0;
    if (x > 0) rate += state_[static_cast<std::size_t>(x - 1)] ? spec_.mu2 : spec_.mu1;
    if (x + 1 < spec_.n_sites)
      rate += state_[static_cast<std::size_t>(x + 1)] ? spec_.mu2 : spec_.mu1;
    if (spec_.uniform_edge_death) {  // one half per edge; both land on N = 1
      if (x == 0) rate += 0.5;
      if (x + 1 == spec_.n_sites) rate += 0.5;
    }
    if (!spec_.dual) {
      if (x == 0) rate += spec_.gamma;
      if (x + 1 == spec_.n_sites) rate += spec_.beta;
    }
    return rate;
  }

  void refresh_site(int x) {
    const std::size_t base = static_cast<std::size_t>(x) * kEventCount;
    double death = 0.0, birth = 0.0, hop_l = 0.0, hop_r = 0.0;
    double absorb_l = 0.0, absorb_r = 0.0;
    const bool occ = state_[static_cast<std::size_t>(x)] != 0;
    const bool occ_l = x > 0 && state_[static_cast<std::size_t>(x - 1)] != 0;
    const bool occ_r =
        x + 1 < spec_.n_sites && state_[static_cast<std::size_t>(x + 1)] != 0;
    if (occ) {
      death = site_death_rate(x);
      if (x > 0 && !occ_l) hop_l = spec_.diffusion;
      if (x + 1 < spec_.n_sites && !occ_r) hop_r = spec_.diffusion;
      if (spec_.dual) {
        if (x == 0) absorb_l = spec_.absorb_left;
        if (x + 1 == spec_.n_sites) absorb_r = spec_.absorb_right;
      }
    } else {
      birth = spec_.lambda * ((occ_l ? 1 : 0) + (occ_r ? 1 : 0));
      if (!spec_.dual) {
        if (x == 0) birth += spec_.alpha;
        if (x + 1 == spec_.n_sites) birth += spec_.delta;
      }
    }
    rates_[base + kDeath] = death;
    rates_[base + kBirth] = birth;
    rates_[base + kHopLeft] = hop_l;
    rates_[base + kHopRight] = hop_r;
    rates_[base + kAbsorbLeft] = absorb_l;
    rates_[base + kAbsorbRight] = absorb_r;
    site_total_[static_cast<std::size_t>(x)] =
        death + birth + hop_l + hop_r + absorb_l + absorb_r;
  }

  void rebuild_total() {
    total_ = 0.0;
    for (double s : site_total_) total_ += s;
  }

  void touch(int x) {
    for (int y = std::max(0, x - 1); y <= std::min(spec_.n_sites - 1, x + 1); ++y) {
      total_ -= site_total_[static_cast<std::size_t>(y)];
      refresh_site(y);
      total_ += site_total_[static_cast<std::size_t>(y)];
    }
  }

  void apply(int x, SiteEvent ev) {
    switch (ev) {
      case kDeath:
        state_[static_cast<std::size_t>(x)] = 0;
        touch(x);
        break;
      case kBirth:
        state_[static_cast<std::size_t>(x)] = 1;
        touch(x);
        break;
      case kHopLeft:
        state_[static_cast<std::size_t>(x)] = 0;
        state_[static_cast<std::size_t>(x - 1)] = 1;
        touch(x - 1);
        touch(x);
        break;
      case kHopRight:
        state_[static_cast<std::size_t>(x)] = 0;
        state_[static_cast<std::size_t>(x + 1)] = 1;
        touch(x);
        touch(x + 1);
        break;
      case kAbsorbLeft:
        state_[static_cast<std::size_t>(x)] = 0;
        ++absorbed_left_;
        touch(x);
        break;
      case kAbsorbRight:
        state_[static_cast<std::size_t>(x)] = 0;
        ++absorbed_right_;
        touch(x);
        break;
      default:
        throw std::logic_error("unreachable event");
    }
  }

  ChainSpec spec_;
  std::vector<std::uint8_t> state_;
  std::vector<double> rates_;
  std::vector<double> site_total_;
  double total_ = 0.0;
  int absorbed_left_ = 0;
  int absorbed_right_ = 0;
  int events_since_rebuild_ = 0;
};

}  // namespace

SimOutcome simulate(const ChainSpec& spec, const Configuration& init, double t_end,
                    std::uint64_t seed, std::uint64_t stream) {
  return simulate_logged(spec, init, t_end, seed, stream, nullptr);
}

SimOutcome simulate_logged(
    const ChainSpec& spec, const Configuration& init, double t_end,
    std::uint64_t seed, std::uint64_t stream,
    const std::function<void(double, long long, const Configuration&)>& on_event) {
  if (t_end < 0.0) throw std::invalid_argument("t_end must be >= 0");
  SplitRng rng(seed, stream);
  ChainSimulator sim(spec, init);
  SimOutcome out;
  out.stream = stream;
  double t = 0.0;
  while (sim.total_rate() > 0.0) {
    const double dt = rng.exponential(sim.total_rate());
    if (t + dt > t_end) break;
    t += dt;
    sim.select_and_apply(rng);
    ++out.events;
    if (on_event) {
      Configuration snapshot;
      snapshot.sites = sim.state();
      on_event(t, out.events, snapshot);
    }
  }
  out.time = t_end;
  out.final_state.sites = sim.state();
  out.absorbed_left = sim.absorbed_left();
  out.absorbed_right = sim.absorbed_right();
  if (spec.dual && sim.particles() == 0) {
    out.extinct = true;
    out.tau = t;
  }
  return out;
}

SimOutcome simulate_dual_until_extinct(const ChainSpec& spec,
                                       const DualConfiguration& init,
                                       std::uint64_t seed, std::uint64_t stream,
                                       long long max_events) {
  if (!spec.dual) throw std::invalid_argument("extinction runs need a dual chain");
  SplitRng rng(seed, stream);
  ChainSimulator sim(spec, init.sites);
  SimOutcome out;
  out.stream = stream;
  double t = 0.0;
  while (sim.particles() > 0) {
    if (sim.total_rate() <= 0.0)
      throw std::runtime_error("dual chain froze before extinction");
    t += rng.exponential(sim.total_rate());
    sim.select_and_apply(rng);
    if (++out.events >= max_events) {
      out.step_budget_exceeded = true;
      break;
    }
  }
  out.time = t;
  out.final_state.sites = sim.state();
  out.absorbed_left = init.left_sink + sim.absorbed_left();
  out.absorbed_right = init.right_sink + sim.absorbed_right();
  if (sim.particles() == 0) {
    out.extinct = true;
    out.tau = t;
  }
  return out;
}

namespace {

class SirSimulator {
 public:
  SirSimulator(const SirParams& params, const SirConfiguration& init)
      : params_(params), cfg_(init) {
    const int len = static_cast<int>(cfg_.states.size());
    rates_.assign(static_cast<std::size_t>(len) * 3, 0.0);
    site_total_.assign(static_cast<std::size_t>(len), 0.0);
    for (int i = 0; i < len; ++i) refresh(i);
    rebuild_total();
    // a frozen-I exterior facing an in-window S cannot be simulated faithfully
    if (cfg_.outside == SirState::I && len > 0 &&
        (cfg_.states.front() == SirState::S || cfg_.states.back() == SirState::S))
      edge_touched_ = true;
  }

  double total_rate() const { return total_; }
  const SirConfiguration& config() const { return cfg_; }
  bool edge_touched() const { return edge_touched_; }

  void select_and_apply(SplitRng& rng) {
    double u = rng.uniform() * total_;
    const int len = static_cast<int>(cfg_.states.size());
    int i = 0;
    for (; i < len - 1; ++i) {
      if (u < site_total_[static_cast<std::size_t>(i)]) break;
      u -= site_total_[static_cast<std::size_t>(i)];
    }
    int ev = 0;  // 0: recover, 1: infect left neighbor, 2: infect right neighbor
    for (; ev < 2; ++ev) {
      const double r = rates_[static_cast<std::size_t>(i * 3 + ev)];
      if (u < r) break;
      u -= r;
    }
    apply(i, ev);
  }

 private:
  SirState at_index(int i) const {
    if (i < 0 || i >= static_cast<int>(cfg_.states.size())) return cfg_.outside;
    return cfg_.states[static_cast<std::size_t>(i)];
  }

  void refresh(int i) {
    double recover = 0.0, left = 0.0, right = 0.0;
    if (cfg_.states[static_cast<std::size_t>(i)] == SirState::I) {
      recover = params_.gamma;
      if (at_index(i - 1) == SirState::S) left = params_.beta;
      if (at_index(i + 1) == SirState::S) right = params_.beta;
    }
    rates_[static_cast<std::size_t>(i * 3)] = recover;
    rates_[static_cast<std::size_t>(i * 3 + 1)] = left;
    rates_[static_cast<std::size_t>(i * 3 + 2)] = right;
    site_total_[static_cast<std::size_t>(i)] = recover + left + right;
  }

  void rebuild_total() {
    total_ = 0.0;
    for (double s : site_total_) total_ += s;
  }

  void touch(int i) {
    const int len = static_cast<int>(cfg_.states.size());
    for (int j = std::max(0, i - 1); j <= std::min(len - 1, i + 1); ++j) {
      total_ -= site_total_[static_cast<std::size_t>(j)];
      refresh(j);
      total_ += site_total_[static_cast<std::size_t>(j)];
    }
  }

  void apply(int i, int ev) {
    const int len = static_cast<int>(cfg_.states.size());
    if (ev == 0) {  // recovery is autonomous; never a light-cone event
      cfg_.states[static_cast<std::size_t>(i)] = SirState::R;
      touch(i);
      return;
    }
    const int target = ev == 1 ? i - 1 : i + 1;
    if (target < 0 || target >= len) {
      // infection escaped into the frozen exterior: the run is invalid
      edge_touched_ = true;
      return;
    }
    if (target == 0 || target == len - 1) edge_touched_ = true;
    cfg_.states[static_cast<std::size_t>(target)] = SirState::I;
    touch(target);
    touch(i);
  }

  SirParams params_;
  SirConfiguration cfg_;
  std::vector<double> rates_;
  std::vector<double> site_total_;
  double total_ = 0.0;
  bool edge_touched_ = false;
};

}  // namespace

SirSimOutcome simulate_sir(const SirParams& params, const SirConfiguration& init,
                           double t_end, std::uint64_t seed, std::uint64_t stream) {
  params.validate();
  if (t_end < 0.0) throw std::invalid_argument("t_end must be >= 0");
  SplitRng rng(seed, stream);
  SirSimulator sim(params, init);
  SirSimOutcome out;
  out.stream = stream;
  double t = 0.0;
  while (sim.total_rate() > 0.0) {
    const double dt = rng.exponential(sim.total_rate());
    if (t + dt > t_end) break;
    t += dt;
    sim.select_and_apply(rng);
    ++out.events;
  }
  out.final_state = sim.config();
  out.edge_touched = sim.edge_touched();
  return out;
}

double occupancy_time_average(const ChainSpec& spec, const Configuration& init,
                              int site, double t_burn, double t_avg,
                              std::uint64_t seed, std::uint64_t stream) {
  if (site < 1 || site > spec.n_sites)
    throw std::invalid_argument("site outside the lattice");
  if (t_avg <= 0.0) throw std::invalid_argument("averaging window must be positive");
  SplitRng rng(seed, stream);
  ChainSimulator sim(spec, init);
  const double t_end = t_burn + t_avg;
  double t = 0.0;
  double integral = 0.0;
  while (sim.total_rate() > 0.0) {
    const double dt = rng.exponential(sim.total_rate());
    const double t_next = std::min(t + dt, t_end);
    if (t_next > t_burn) {
      const double lo = std::max(t, t_burn);
      if (sim.state()[static_cast<std::size_t>(site - 1)]) integral += t_next - lo;
    }
    if (t + dt > t_end) return integral / t_avg;
    t += dt;
    sim.select_and_apply(rng);
  }
  // frozen state: the occupancy stays fixed through the window
  if (sim.state()[static_cast<std::size_t>(site - 1)])
    integral += t_end - std::max(t, t_burn);
  return integral / t_avg;
}

Estimate estimate(int replicas, std::uint64_t seed, int threads,
                  const std::function<double(std::uint64_t, SplitRng&)>& replica_value) {
  if (replicas < 2) throw std::invalid_argument("estimates need replicas >= 2");
  if (threads < 1) threads = 1;
  std::vector<double> values(static_cast<std::size_t>(replicas), 0.0);
  auto worker = [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      SplitRng rng(seed, static_cast<std::uint64_t>(r));
      values[static_cast<std::size_t>(r)] =
          replica_value(static_cast<std::uint64_t>(r), rng);
    }
  };
  if (threads == 1) {
    worker(0, replicas);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (replicas + threads - 1) / threads;
    for (int tid = 0; tid < threads; ++tid) {
      const int lo = tid * chunk;
      const int hi = std::min(replicas, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= replicas;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= (replicas - 1);
  Estimate e;
  e.mean = mean;
  e.std_error = std::sqrt(var / replicas);
  e.replicas = replicas;
  e.seed = seed;
  return e;
}

std::string chain_state_code(const Configuration& c, int absorbed_left,
                             int absorbed_right) {
  return c.to_string() + "+" + std::to_string(absorbed_left) + "+" +
         std::to_string(absorbed_right);
}

std::string sir_state_code(const SirConfiguration& c) {
  std::string s;
  for (auto v : c.states)
    s.push_back(v == SirState::S ? 'S' : v == SirState::I ? 'I' : 'R');
  return s;
}

StepFrequencies single_step_frequencies(const ChainSpec& spec,
                                        const Configuration& from, long long steps,
                                        std::uint64_t seed) {
  StepFrequencies out;
  out.steps = steps;
  for (long long k = 0; k < steps; ++k) {
    SplitRng rng(seed, static_cast<std::uint64_t>(k));
    ChainSimulator sim(spec, from);
    if (sim.total_rate() <= 0.0)
      throw std::runtime_error("state has no outgoing event");
    sim.select_and_apply(rng);
    Configuration c;
    c.sites = sim.state();
    ++out.counts[chain_state_code(c, sim.absorbed_left(), sim.absorbed_right())];
  }
  return out;
}

StepFrequencies single_step_frequencies_sir(const SirParams& params,
                                            const SirConfiguration& from,
                                            long long steps, std::uint64_t seed) {
  StepFrequencies out;
  out.steps = steps;
  for (long long k = 0; k < steps; ++k) {
    SplitRng rng(seed, static_cast<std::uint64_t>(k));
    SirSimulator sim(params, from);
    if (sim.total_rate() <= 0.0)
      throw std::runtime_error("state has no outgoing event");
    sim.select_and_apply(rng);
    ++out.counts[sir_state_code(sim.config())];
  }
  return out;
}

}  // namespace ipsdual
