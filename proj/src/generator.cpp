#include "ipsdual/generator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ipsdual {

namespace {

inline int bit_at(std::uint32_t bits, int n, int x) {  // x 1-based
  return static_cast<int>((bits >> (n - x)) & 1u);
}

inline std::uint32_t with_bit(std::uint32_t bits, int n, int x, int v) {
  const std::uint32_t mask = 1u << (n - x);
  return v ? (bits | mask) : (bits & ~mask);
}

void check_exact_size(int n) {
  if (n < 1) throw std::invalid_argument("lattice size must be N >= 1");
  if (n > kExactSiteCap)
    throw std::invalid_argument("exact routes are capped at N <= " +
                                std::to_string(kExactSiteCap));
}

// Off-diagonal bond and boundary moves shared by the DCP/GDCP builders.
struct BulkRates {
  double lambda, diffusion, mu1, mu2;
  bool uniform_edge_death;
};

template <typename Emit>
void emit_bulk_moves(std::uint32_t bits, int n, const BulkRates& r, Emit&& emit) {
  for (int x = 1; x < n; ++x) {
    const int l = bit_at(bits, n, x);
    const int rr = bit_at(bits, n, x + 1);
    if (l == 0 && rr == 1) {
      emit(with_bit(bits, n, x + 1, 0), r.mu1);
      emit(with_bit(with_bit(bits, n, x, 1), n, x + 1, 0), r.diffusion);
      emit(with_bit(bits, n, x, 1), r.lambda);
    } else if (l == 1 && rr == 0) {
      emit(with_bit(bits, n, x, 0), r.mu1);
      emit(with_bit(with_bit(bits, n, x, 0), n, x + 1, 1), r.diffusion);
      emit(with_bit(bits, n, x + 1, 1), r.lambda);
    } else if (l == 1 && rr == 1) {
      emit(with_bit(bits, n, x, 0), r.mu2);
      emit(with_bit(bits, n, x + 1, 0), r.mu2);
    }
  }
  if (r.uniform_edge_death) {
    if (bit_at(bits, n, 1)) emit(with_bit(bits, n, 1, 0), 0.5);
    if (bit_at(bits, n, n)) emit(with_bit(bits, n, n, 0), 0.5);
  }
}

SparseGenerator build_open_chain(int n, const BulkRates& rates, double alpha,
                                 double gamma, double delta, double beta) {
  check_exact_size(n);
  const Index dim = Index{1} << n;
  GeneratorAssembler asmbl(dim);
  for (std::uint32_t bits = 0; bits < static_cast<std::uint32_t>(dim); ++bits) {
    auto emit = [&](std::uint32_t to, double rate) {
      if (rate > 0.0) asmbl.add(bits, to, rate);
    };
    emit_bulk_moves(bits, n, rates, emit);
    if (bit_at(bits, n, 1))
      emit(with_bit(bits, n, 1, 0), gamma);
    else
      emit(with_bit(bits, n, 1, 1), alpha);
    if (bit_at(bits, n, n))
      emit(with_bit(bits, n, n, 0), beta);
    else
      emit(with_bit(bits, n, n, 1), delta);
  }
  return asmbl.finish();
}

}  // namespace

Eigen::SparseMatrix<double> SparseGenerator::matrix() const {
  Eigen::SparseMatrix<double> m(dim, dim);
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

Eigen::MatrixXd SparseGenerator::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& t : entries) m(t.row(), t.col()) += t.value();
  return m;
}

void GeneratorAssembler::add(Index from, Index to, double rate) {
  if (from == to) return;  // diagonal is derived, never accumulated
  raw_.emplace_back(static_cast<int>(from), static_cast<int>(to), rate);
}

SparseGenerator GeneratorAssembler::finish() {
  std::sort(raw_.begin(), raw_.end(), [](const auto& a, const auto& b) {
    return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
  });
  SparseGenerator gen;
  gen.dim = dim_;
  std::vector<double> rowsum(static_cast<std::size_t>(dim_), 0.0);
  for (std::size_t i = 0; i < raw_.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < raw_.size() && raw_[j].row() == raw_[i].row() &&
           raw_[j].col() == raw_[i].col()) {
      sum += raw_[j].value();
      ++j;
    }
    if (sum != 0.0) {
      gen.entries.emplace_back(raw_[i].row(), raw_[i].col(), sum);
      rowsum[static_cast<std::size_t>(raw_[i].row())] += sum;
    }
    i = j;
  }
  for (Index r = 0; r < dim_; ++r) {
    const double s = rowsum[static_cast<std::size_t>(r)];
    if (s != 0.0)
      gen.entries.emplace_back(static_cast<int>(r), static_cast<int>(r), -s);
  }
  raw_.clear();
  return gen;
}

void verify_generator(const SparseGenerator& gen, double tol) {
  std::vector<double> rowsum(static_cast<std::size_t>(gen.dim), 0.0);
  for (const auto& t : gen.entries) {
    if (t.row() != t.col() && t.value() < 0.0)
      throw std::runtime_error("generator has a negative off-diagonal rate");
    rowsum[static_cast<std::size_t>(t.row())] += t.value();
  }
  for (double s : rowsum)
    if (std::abs(s) > tol)
      throw std::runtime_error("generator row sum exceeds tolerance");
}

SparseGenerator build_dcp(const DcpParams& params, int n) {
  params.validate();
  BulkRates rates{params.lambda, params.diffusion, 0.5, 0.5, true};
  auto gen = build_open_chain(n, rates, params.alpha, params.gamma, params.delta,
                              params.beta);
  verify_generator(gen);
  return gen;
}

SparseGenerator build_gdcp(const GdcpParams& params, int n) {
  params.validate();
  BulkRates rates{params.lambda, params.diffusion, params.mu1, params.mu2, false};
  auto gen = build_open_chain(n, rates, params.alpha, params.gamma, params.delta,
                              params.beta);
  verify_generator(gen);
  return gen;
}

SparseGenerator build_closed_ssep(int n, double diffusion) {
  BulkRates rates{0.0, diffusion, 0.0, 0.0, false};
  auto gen = build_open_chain(n, rates, 0.0, 0.0, 0.0, 0.0);
  verify_generator(gen);
  return gen;
}

SparseGenerator build_closed_bulk(double lambda, double diffusion, int n) {
  BulkRates rates{lambda, diffusion, 0.5, 0.5, true};
  auto gen = build_open_chain(n, rates, 0.0, 0.0, 0.0, 0.0);
  verify_generator(gen);
  return gen;
}

void DualModelSpec::bulk_moves(std::uint32_t bits,
                               std::vector<std::pair<std::uint32_t, double>>& out) const {
  BulkRates rates{lambda, diffusion, mu1, mu2, uniform_edge_death};
  emit_bulk_moves(bits, n_sites, rates, [&](std::uint32_t to, double rate) {
    if (rate > 0.0) out.emplace_back(to, rate);
  });
}

double DualModelSpec::site_death_rate(std::uint32_t bits, int x) const {
  double rate = 0.0;
  if (x > 1) rate += bit_at(bits, n_sites, x - 1) ? mu2 : mu1;
  if (x < n_sites) rate += bit_at(bits, n_sites, x + 1) ? mu2 : mu1;
  if (uniform_edge_death) {  // one half per edge; both land on N = 1
    if (x == 1) rate += 0.5;
    if (x == n_sites) rate += 0.5;
  }
  return rate;
}

DualModelSpec dual_of(const DcpParams& params, int n) {
  params.validate();
  check_exact_size(n);
  DualModelSpec spec;
  spec.n_sites = n;
  spec.lambda = params.lambda;
  spec.diffusion = params.diffusion;
  spec.mu1 = 0.5;
  spec.mu2 = 0.5;
  spec.uniform_edge_death = true;
  spec.absorb_left = params.alpha + params.gamma;
  spec.absorb_right = params.beta + params.delta;
  spec.c_minus = params.c_minus();
  spec.c_plus = params.c_plus();
  return spec;
}

DualModelSpec dual_of(const GdcpParams& params, int n) {
  params.validate();
  check_exact_size(n);
  const double lambda_hat = params.lambda + params.mu2 - params.mu1;
  const double diff_hat = params.diffusion + params.mu1 - params.mu2;
  if (lambda_hat < 0.0)
    throw std::invalid_argument("GDCP dual requires lambda + mu2 - mu1 >= 0");
  if (diff_hat < 0.0)
    throw std::invalid_argument("GDCP dual requires diffusion + mu1 - mu2 >= 0");
  DualModelSpec spec;
  spec.n_sites = n;
  spec.lambda = lambda_hat;
  spec.diffusion = diff_hat;
  spec.mu1 = params.mu2;  // death rates exchanged
  spec.mu2 = params.mu1;
  spec.uniform_edge_death = false;
  spec.absorb_left = params.alpha + params.gamma;
  spec.absorb_right = params.beta + params.delta;
  spec.c_minus = params.c_minus();
  spec.c_plus = params.c_plus();
  return spec;
}

Index DualSpace::index_of(int m, std::uint32_t bits, int n) const {
  if (m < 0 || m > sink_cap || n < 0 || n > sink_cap)
    throw std::out_of_range("dual sink count outside the truncated space");
  return ((static_cast<Index>(m) * (sink_cap + 1) + n) << n_sites) |
         static_cast<Index>(bits);
}

Index DualSpace::index_of(const DualConfiguration& d) const {
  const auto bits = static_cast<std::uint32_t>(ipsdual::index_of(d.sites) - 1);
  return index_of(d.left_sink, bits, d.right_sink);
}

std::uint32_t DualSpace::bits_of(Index i) const {
  return static_cast<std::uint32_t>(i & ((Index{1} << n_sites) - 1));
}

int DualSpace::left_of(Index i) const {
  return static_cast<int>((i >> n_sites) / (sink_cap + 1));
}

int DualSpace::right_of(Index i) const {
  return static_cast<int>((i >> n_sites) % (sink_cap + 1));
}

DualConfiguration DualSpace::state_of(Index i) const {
  DualConfiguration d;
  d.left_sink = left_of(i);
  d.right_sink = right_of(i);
  d.sites = config_of(static_cast<Index>(bits_of(i)) + 1, n_sites);
  return d;
}

DualGenerator build_dual(const DualModelSpec& spec, int sink_cap) {
  if (sink_cap < 1) throw std::invalid_argument("sink cap must be >= 1");
  DualGenerator out;
  out.space = DualSpace{spec.n_sites, sink_cap};
  out.model = spec;
  const int n = spec.n_sites;
  const std::uint32_t nbits = 1u << n;
  GeneratorAssembler asmbl(out.space.dim());
  std::vector<std::pair<std::uint32_t, double>> moves;
  for (int m = 0; m <= sink_cap; ++m) {
    for (int nn = 0; nn <= sink_cap; ++nn) {
      for (std::uint32_t bits = 0; bits < nbits; ++bits) {
        const Index from = out.space.index_of(m, bits, nn);
        moves.clear();
        spec.bulk_moves(bits, moves);
        for (const auto& [to, rate] : moves)
          asmbl.add(from, out.space.index_of(m, to, nn), rate);
        if (bit_at(bits, n, 1) && spec.absorb_left > 0.0) {
          if (m < sink_cap)
            asmbl.add(from, out.space.index_of(m + 1, with_bit(bits, n, 1, 0), nn),
                      spec.absorb_left);
          else
            out.truncated_rows.push_back(from);
        }
        if (bit_at(bits, n, n) && spec.absorb_right > 0.0) {
          if (nn < sink_cap)
            asmbl.add(from, out.space.index_of(m, with_bit(bits, n, n, 0), nn + 1),
                      spec.absorb_right);
          else
            out.truncated_rows.push_back(from);
        }
      }
    }
  }
  out.gen = asmbl.finish();
  verify_generator(out.gen);
  return out;
}

DualGenerator build_dual(const DcpParams& params, int n, int sink_cap) {
  return build_dual(dual_of(params, n), sink_cap);
}

DualGenerator build_dual(const GdcpParams& params, int n, int sink_cap) {
  return build_dual(dual_of(params, n), sink_cap);
}

Index SirDualSpace::index_of(int r, int n, SirLayer layer) const {
  if (!contains(r, n)) throw std::out_of_range("SIR dual state outside the box");
  const Index width = r_hi - r_lo + 1;
  return (static_cast<Index>(layer == SirLayer::J) * n_max + (n - 1)) * width +
         (r - r_lo);
}

SirDualState SirDualSpace::state_of(Index i) const {
  if (i == trap_index()) return SirDualState::make_trap();
  if (i == overflow_index())
    throw std::out_of_range("overflow state has no (r, n, layer) coordinates");
  const Index width = r_hi - r_lo + 1;
  SirDualState s;
  s.r = static_cast<int>(i % width) + r_lo;
  Index rest = i / width;
  s.n = static_cast<int>(rest % n_max) + 1;
  s.layer = rest / n_max ? SirLayer::J : SirLayer::G;
  return s;
}

SirDualGenerator build_sir_dual(const SirParams& params, int r_lo, int r_hi,
                                int n_max) {
  params.validate();
  if (r_lo > r_hi || n_max < 1) throw std::invalid_argument("empty SIR dual box");
  SirDualGenerator out;
  out.space = SirDualSpace{r_lo, r_hi, n_max};
  out.params = params;
  GeneratorAssembler asmbl(out.space.dim());
  const Index overflow = out.space.overflow_index();
  auto target = [&](int r, int n, SirLayer layer) {
    return out.space.contains(r, n) ? out.space.index_of(r, n, layer) : overflow;
  };
  for (SirLayer layer : {SirLayer::G, SirLayer::J}) {
    for (int n = 1; n <= n_max; ++n) {
      for (int r = r_lo; r <= r_hi; ++r) {
        const Index from = out.space.index_of(r, n, layer);
        if (params.beta > 0.0)
          asmbl.add(from, target(r, n + 1, layer), params.beta);
        if (layer == SirLayer::G) {
          if (params.beta > 0.0)
            asmbl.add(from, target(r - 1, n + 1, SirLayer::G), params.beta);
          if (params.gamma > 0.0)
            asmbl.add(from, out.space.trap_index(), 2.0 * params.gamma);
        } else if (params.gamma > 0.0) {
          asmbl.add(from, out.space.index_of(r, n, SirLayer::G), params.gamma);
        }
      }
    }
  }
  out.gen = asmbl.finish();  // trap and overflow rows stay empty
  verify_generator(out.gen);
  return out;
}

std::pair<std::vector<double>, bool> BirthDeathChain::stationary() const {
  const std::size_t n = up.size();  // states 0..n
  std::vector<double> pi(n + 1, 0.0);
  if (up[0] == 0.0) {  // 0 is absorbing
    pi[0] = 1.0;
    return {pi, true};
  }
  std::vector<double> w(n + 1, 0.0);
  w[0] = 1.0;
  double total = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    w[k + 1] = w[k] * up[k] / down[k];  // down[k] holds rate of k+1 -> k
    total += w[k + 1];
  }
  for (std::size_t k = 0; k <= n; ++k) pi[k] = w[k] / total;
  return {pi, false};
}

BirthDeathChain fast_stirring_chain(const DcpParams& params, int n,
                                    StirringConvention convention) {
  params.validate();
  if (n < 1) throw std::invalid_argument("lattice size must be N >= 1");
  const double factor = convention == StirringConvention::corrected ? 2.0 : 1.0;
  BirthDeathChain chain;
  chain.up.resize(static_cast<std::size_t>(n));
  chain.down.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    chain.up[static_cast<std::size_t>(k)] =
        (factor * params.lambda * k + params.alpha + params.delta) *
        (1.0 - static_cast<double>(k) / n);
    chain.down[static_cast<std::size_t>(k)] =
        (k + 1) * (1.0 + (params.beta + params.gamma) / n);
  }
  return chain;
}

void write_matrix_market(const SparseGenerator& gen, std::ostream& os) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << gen.dim << " " << gen.dim << " " << gen.entries.size() << "\n";
  os.precision(17);
  for (const auto& t : gen.entries)
    os << t.row() + 1 << " " << t.col() + 1 << " " << t.value() << "\n";
}

}  // namespace ipsdual
