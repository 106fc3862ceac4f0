#include "zrlj/mc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "zrlj/errors.hpp"
#include "zrlj/hydrostatic.hpp"
#include "zrlj/parallel_kernels.hpp"

namespace zrlj {

double empirical_pairing(const ZRConfiguration& config, std::int64_t N, const std::function<double(double)>& G) {
  if (config.counts.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < config.counts.size(); ++i)
    if (config.counts[i] != 0) acc += G(static_cast<double>(i + 1) / static_cast<double>(N)) * config.counts[i];
  return acc / static_cast<double>(config.counts.size());
}

// ---- tables ----

double EventTables::destination_mass(std::int64_t x) const {
  const std::size_t lo = static_cast<std::size_t>(1 - x + (N - 2));
  const std::size_t hi = static_cast<std::size_t>(N - 1 - x + (N - 2));
  return offset_cdf[hi + 1] - offset_cdf[lo];
}

double EventTables::destination_weight(std::int64_t x, std::int64_t y) const {
  if (y < 1 || y >= N || y == x) return 0.0;
  const std::size_t i = static_cast<std::size_t>(y - x + (N - 2));
  return offset_cdf[i + 1] - offset_cdf[i];
}

std::int64_t EventTables::sample_destination(std::int64_t x, double u) const {
  const std::size_t lo = static_cast<std::size_t>(1 - x + (N - 2));
  const std::size_t hi = static_cast<std::size_t>(N - 1 - x + (N - 2));
  const double target = offset_cdf[lo] + u * (offset_cdf[hi + 1] - offset_cdf[lo]);
  auto it = std::upper_bound(offset_cdf.begin() + static_cast<std::ptrdiff_t>(lo) + 1,
                             offset_cdf.begin() + static_cast<std::ptrdiff_t>(hi) + 2, target);
  std::size_t i = static_cast<std::size_t>(it - offset_cdf.begin()) - 1;
  i = std::min(i, hi);
  std::int64_t y = static_cast<std::int64_t>(i) - (N - 2) + x;
  if (y == x) y += (y + 1 < N) ? 1 : -1;  // zero-width bin, only reachable through rounding
  return y;
}

EventTables build_event_tables(const TrafficSystem& s) {
  if (s.N < 3) throw ConfigError("simulation needs N >= 3");
  EventTables t;
  t.N = s.N;
  t.boundary_scale = s.boundary_scale;
  t.phi_alpha = s.phi_alpha;
  t.phi_beta = s.phi_beta;
  const std::size_t n = s.size();
  t.offset_cdf.assign(2 * n, 0.0);
  for (std::size_t i = 0; i + 1 < 2 * n; ++i) {
    const std::int64_t k = static_cast<std::int64_t>(i) - (s.N - 2);
    t.offset_cdf[i + 1] = t.offset_cdf[i] + s.kernel_row[static_cast<std::size_t>(std::abs(k))];
  }
  t.bulk.resize(n);
  t.left.resize(n);
  t.right.resize(n);
  t.death_base.resize(n);
  t.birth.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.bulk[i] = s.diag[i] - s.margin[i];
    t.left[i] = s.boundary_scale * s.rates.left[i];
    t.right[i] = s.boundary_scale * s.rates.right[i];
    t.death_base[i] = t.left[i] + t.right[i];
    t.birth[i] = s.phi_beta * t.right[i] + s.phi_alpha * t.left[i];
  }
  return t;
}

EventTables build_event_tables(const ModelParams& params, const JumpKernel& kernel, const ThermoTables& thermo) {
  return build_event_tables(assemble(params, thermo, kernel));
}

// ---- engine ----

namespace {

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : n_(n), tree_(n + 1, 0.0), val_(n, 0.0) {}

  void set(std::size_t i, double v) {
    const double d = v - val_[i];
    val_[i] = v;
    for (std::size_t j = i + 1; j <= n_; j += j & (~j + 1)) tree_[j] += d;
    if (++updates_ % 65536 == 0) rebuild();
  }
  double value(std::size_t i) const { return val_[i]; }
  double total() const {
    double s = 0.0;
    for (std::size_t j = n_; j > 0; j -= j & (~j + 1)) s += tree_[j];
    return s;
  }
  /// Smallest i with prefix(i+1) > target.
  std::size_t find(double target) const {
    std::size_t pos = 0;
    for (std::size_t step = std::bit_floor(n_); step > 0; step >>= 1) {
      if (pos + step <= n_ && tree_[pos + step] <= target) {
        pos += step;
        target -= tree_[pos];
      }
    }
    return std::min(pos, n_ - 1);
  }

 private:
  void rebuild() {
    std::fill(tree_.begin(), tree_.end(), 0.0);
    for (std::size_t i = 1; i <= n_; ++i) {
      tree_[i] += val_[i - 1];
      const std::size_t up = i + (i & (~i + 1));
      if (up <= n_) tree_[up] += tree_[i];
    }
  }

  std::size_t n_;
  std::vector<double> tree_;
  std::vector<double> val_;
  std::uint64_t updates_ = 0;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

 private:
  std::mt19937_64 gen_;
};

struct Move {
  std::ptrdiff_t a = -1, b = -1;
  int da = 0, db = 0;
};

constexpr std::int64_t kCountCap = std::int64_t{1} << 62;

class ZrpModel {
 public:
  ZrpModel(const EventTables& t, const RateFunction& g) : t_(t), g_(g), g_cache_{0.0} {}

  double g(std::int64_t k) {
    while (static_cast<std::int64_t>(g_cache_.size()) <= k) g_cache_.push_back(g_(static_cast<std::int64_t>(g_cache_.size())));
    return g_cache_[static_cast<std::size_t>(k)];
  }
  double observable(std::int64_t k) { return g(k); }
  double rate(std::size_t i, std::int64_t k) { return g(k) * (t_.bulk[i] + t_.death_base[i]) + t_.birth[i]; }

  Move plan(std::size_t i, std::int64_t k, Rng& rng) {
    const double gk = g(k);
    const double u = rng.uniform() * (gk * (t_.bulk[i] + t_.death_base[i]) + t_.birth[i]);
    Move m;
    m.a = static_cast<std::ptrdiff_t>(i);
    if (u < t_.birth[i]) {
      if (k + 1 >= kCountCap) throw ConvergenceError("simulate_zrp: occupation overflow at site " + std::to_string(i + 1));
      m.da = 1;
    } else if (u < t_.birth[i] + gk * t_.bulk[i]) {
      const std::int64_t x = static_cast<std::int64_t>(i) + 1;
      m.da = -1;
      m.b = static_cast<std::ptrdiff_t>(t_.sample_destination(x, rng.uniform()) - 1);
      m.db = 1;
    } else {
      m.da = -1;
    }
    return m;
  }

 private:
  const EventTables& t_;
  const RateFunction& g_;
  std::vector<double> g_cache_;
};

class ExclusionModel {
 public:
  explicit ExclusionModel(const EventTables& t) : t_(t) {
    const Tildes tl = tildes(t.phi_alpha, t.phi_beta);
    alpha_ = tl.alpha;
    beta_ = tl.beta;
  }
  double observable(std::int64_t k) { return static_cast<double>(k); }
  double rate(std::size_t i, std::int64_t k) {
    if (k == 1) return t_.bulk[i] + t_.left[i] * (1.0 - alpha_) + t_.right[i] * (1.0 - beta_);
    return t_.left[i] * alpha_ + t_.right[i] * beta_;
  }
  Move plan(std::size_t i, std::int64_t k, Rng& rng, const std::vector<std::int64_t>& eta) {
    Move m;
    if (k == 0) {
      m.a = static_cast<std::ptrdiff_t>(i);
      m.da = 1;
      return m;
    }
    const double u = rng.uniform() * rate(i, 1);
    if (u < t_.bulk[i]) {
      const std::int64_t y = t_.sample_destination(static_cast<std::int64_t>(i) + 1, rng.uniform());
      if (eta[static_cast<std::size_t>(y - 1)] == 0) {
        m.a = static_cast<std::ptrdiff_t>(i);
        m.da = -1;
        m.b = static_cast<std::ptrdiff_t>(y - 1);
        m.db = 1;
      }
    } else {
      m.a = static_cast<std::ptrdiff_t>(i);
      m.da = -1;
    }
    return m;
  }

 private:
  const EventTables& t_;
  double alpha_ = 0.0;
  double beta_ = 0.0;
};

/// 1 / lambda_min(D - P): relaxation time of the mean occupation dynamics.
double relaxation_time(const EventTables& t) {
  const std::size_t n = t.sites();
  double exit_mass = 0.0;
  for (double d : t.death_base) exit_mass += d;
  if (!(exit_mass > 0.0)) throw ConfigError("automatic burn-in needs reservoir coupling; pass t_burn explicitly");
  TrafficSystem s;
  s.N = t.N;
  s.diag.resize(n);
  s.margin.resize(n);
  s.kernel_row.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.margin[i] = t.death_base[i];
    s.diag[i] = t.bulk[i] + t.death_base[i];
    s.kernel_row[i] = i == 0 ? 0.0 : t.offset_cdf[t.N - 2 + i + 1] - t.offset_cdf[t.N - 2 + i];
  }
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double lambda_inv = 0.0;
  IterativeOptions opts;
  opts.tol = 1e-8;
  for (int it = 0; it < 25; ++it) {
    s.rhs = v;
    const FugacityProfile w = solve_iterative(s, opts);
    double norm = 0.0, dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      norm += w.values[i] * w.values[i];
      dot += w.values[i] * v[i];
    }
    norm = std::sqrt(norm);
    lambda_inv = dot;
    for (std::size_t i = 0; i < n; ++i) v[i] = w.values[i] / norm;
  }
  return lambda_inv;
}

template <class Model, class Planner>
SimEstimate run(const EventTables& tables, Model& model, Planner plan, const SimOptions& opts) {
  if (!(opts.t_sample > 0.0)) throw ConfigError("simulation: t_sample must be positive");
  if (opts.batches < 20) throw ConfigError("simulation: at least 20 batches are required");
  const std::size_t n = tables.sites();
  Rng rng(opts.seed);
  std::vector<std::int64_t> c(n, 0);
  std::int64_t total = 0;
  Fenwick F(n);
  for (std::size_t i = 0; i < n; ++i) F.set(i, model.rate(i, 0));

  double t = 0.0;
  auto draw_next = [&] {
    const double R = F.total();
    return R > 0.0 ? t + rng.exponential(R) : std::numeric_limits<double>::infinity();
  };
  double t_next = draw_next();

  SimEstimate est;
  est.N = tables.N;
  est.seed = opts.seed;
  std::int64_t events = 0;

  auto step = [&](auto&& before_change) {
    t = t_next;
    std::size_t i;
    do {
      i = F.find(rng.uniform() * F.total());
    } while (F.value(i) <= 0.0);
    const Move m = plan(model, i, c[i], rng, c);
    if (m.a >= 0) {
      before_change(static_cast<std::size_t>(m.a));
      if (m.b >= 0) before_change(static_cast<std::size_t>(m.b));
      const auto a = static_cast<std::size_t>(m.a);
      c[a] += m.da;
      total += m.da;
      F.set(a, model.rate(a, c[a]));
      if (m.b >= 0) {
        const auto b = static_cast<std::size_t>(m.b);
        c[b] += m.db;
        total += m.db;
        F.set(b, model.rate(b, c[b]));
      }
    }
    ++events;
    t_next = draw_next();
  };

  // burn-in
  double total_integral = 0.0, total_last = 0.0;
  auto touch_total = [&](std::size_t) {};
  auto advance_total = [&](double until) {
    while (t_next <= until) {
      total_integral += static_cast<double>(total) * (t_next - total_last);
      total_last = t_next;
      step(touch_total);
    }
    total_integral += static_cast<double>(total) * (until - total_last);
    total_last = until;
    t = until;
  };
  if (opts.t_burn >= 0.0) {
    advance_total(opts.t_burn);
  } else {
    const double tau = relaxation_time(tables);
    const double cap = 50.0 * tau;
    std::vector<double> chunk_means;
    double elapsed = 0.0;
    while (elapsed < cap) {
      const double start_integral = total_integral;
      advance_total(elapsed + tau);
      elapsed += tau;
      chunk_means.push_back((total_integral - start_integral) / tau);
      const std::size_t k = chunk_means.size();
      if (k < 5) continue;
      // last chunk inside the band of the three before it
      double m = 0.0, v = 0.0;
      for (std::size_t j = k - 4; j < k - 1; ++j) m += chunk_means[j] / 3.0;
      for (std::size_t j = k - 4; j < k - 1; ++j) v += (chunk_means[j] - m) * (chunk_means[j] - m) / 2.0;
      if (std::abs(chunk_means[k - 1] - m) <= 3.0 * std::sqrt(v) + 1e-12 * std::max(1.0, m)) break;
    }
  }
  est.t_burn = t;
  est.burn_events = events;

  double t_sample = opts.t_sample;
  if (opts.min_events > 0) {
    const double rate = (events > 1000 && t > 0.0) ? static_cast<double>(events) / t : F.total();
    if (rate > 0.0) t_sample = std::max(t_sample, 1.05 * static_cast<double>(opts.min_events) / rate);
  }
  est.t_sample = t_sample;

  // sampling
  const int B = opts.batches;
  const std::size_t bins = static_cast<std::size_t>(std::max(0, opts.pmf_bins));
  const double L = t_sample / B;
  const double T0 = t;
  std::vector<double> last(n, T0), a1(n, 0.0), a2(n, 0.0);
  std::vector<std::vector<double>> ap(bins ? n : 0, std::vector<double>(bins, 0.0));
  std::vector<std::vector<std::vector<double>>> batch_pmf;
  auto flush = [&](std::size_t j) {
    const double dt = t - last[j];
    if (dt > 0.0) {
      a1[j] += static_cast<double>(c[j]) * dt;
      a2[j] += model.observable(c[j]) * dt;
      if (bins && static_cast<std::size_t>(c[j]) < bins) ap[j][static_cast<std::size_t>(c[j])] += dt;
    }
    last[j] = t;
  };
  events = 0;
  est.min_total = est.max_total = total;
  for (int b = 0; b < B; ++b) {
    const double t_end = T0 + (b + 1) * L;
    while (t_next <= t_end) {
      step(flush);
      est.min_total = std::min(est.min_total, total);
      est.max_total = std::max(est.max_total, total);
    }
    t = t_end;
    std::vector<double> bx(n), bg(n);
    for (std::size_t j = 0; j < n; ++j) {
      flush(j);
      bx[j] = a1[j] / L;
      bg[j] = a2[j] / L;
      a1[j] = a2[j] = 0.0;
    }
    est.batch_xi.push_back(std::move(bx));
    est.batch_g.push_back(std::move(bg));
    if (bins) {
      for (auto& row : ap)
        for (double& v : row) v /= L;
      batch_pmf.push_back(ap);
      for (auto& row : ap) std::fill(row.begin(), row.end(), 0.0);
    }
  }
  est.events = events;

  auto mean_se = [B](auto get, double& mean, double& se) {
    double m = 0.0;
    for (int b = 0; b < B; ++b) m += get(b);
    m /= B;
    double v = 0.0;
    for (int b = 0; b < B; ++b) v += (get(b) - m) * (get(b) - m);
    mean = m;
    se = std::sqrt(v / (B - 1) / B);
  };
  est.mean_xi.resize(n);
  est.se_xi.resize(n);
  est.mean_g.resize(n);
  est.se_g.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    mean_se([&](int b) { return est.batch_xi[b][j]; }, est.mean_xi[j], est.se_xi[j]);
    mean_se([&](int b) { return est.batch_g[b][j]; }, est.mean_g[j], est.se_g[j]);
  }
  if (bins) {
    est.pmf.assign(n, std::vector<double>(bins));
    est.pmf_se.assign(n, std::vector<double>(bins));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < bins; ++k)
        mean_se([&](int b) { return batch_pmf[b][j][k]; }, est.pmf[j][k], est.pmf_se[j][k]);
  }
  est.final_state.counts = c;
  est.final_state.total = total;
  return est;
}

}  // namespace

SimEstimate simulate_zrp(const EventTables& tables, const RateFunction& g, const SimOptions& opts) {
  ZrpModel model(tables, g);
  return run(tables, model,
             [](ZrpModel& m, std::size_t i, std::int64_t k, Rng& rng, const std::vector<std::int64_t>&) {
               return m.plan(i, k, rng);
             },
             opts);
}

SimEstimate simulate_exclusion(const EventTables& tables, const SimOptions& opts) {
  ExclusionModel model(tables);
  return run(tables, model,
             [](ExclusionModel& m, std::size_t i, std::int64_t k, Rng& rng, const std::vector<std::int64_t>& c) {
               return m.plan(i, k, rng, c);
             },
             opts);
}

PairingEstimate pairing_estimate(const SimEstimate& est, const std::function<double(double)>& G) {
  const std::size_t B = est.batch_xi.size();
  if (B < 2) throw ConfigError("pairing_estimate: no batches");
  const std::size_t n = est.mean_xi.size();
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = G(static_cast<double>(j + 1) / static_cast<double>(est.N));
  std::vector<double> per(B, 0.0);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t j = 0; j < n; ++j) per[b] += w[j] * est.batch_xi[b][j];
    per[b] /= static_cast<double>(n);
  }
  PairingEstimate out;
  for (double v : per) out.value += v / static_cast<double>(B);
  double var = 0.0;
  for (double v : per) var += (v - out.value) * (v - out.value);
  out.se = std::sqrt(var / static_cast<double>(B - 1) / static_cast<double>(B));
  return out;
}

MappingReport mapping_check(const TrafficSystem& system, const FugacityProfile& exact, const RateFunction& g,
                            SimOptions zrp_opts, SimOptions excl_opts, double birth_scale) {
  EventTables tables = build_event_tables(system);
  MappingReport r;
  r.N = system.N;
  r.exact_phi = exact.values;
  r.phi_sum = system.phi_alpha + system.phi_beta;
  EventTables zrp_tables = tables;
  for (double& b : zrp_tables.birth) b *= birth_scale;
  r.zrp = simulate_zrp(zrp_tables, g, zrp_opts);
  r.exclusion = simulate_exclusion(tables, excl_opts);
  const std::size_t n = tables.sites();
  int ok_z = 0, ok_e = 0, ok_c = 0;
  auto zscore = [](double d, double se) {
    if (se > 0.0) return d / se;
    return d == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), d);
  };
  for (std::size_t j = 0; j < n; ++j) {
    const double phi = exact.values[j];
    const double gz = r.zrp.mean_g[j], sz = r.zrp.se_g[j];
    const double ge = r.phi_sum * r.exclusion.mean_xi[j], se = r.phi_sum * r.exclusion.se_xi[j];
    r.z_zrp.push_back(zscore(gz - phi, sz));
    r.z_excl.push_back(zscore(ge - phi, se));
    r.z_cross.push_back(zscore(gz - ge, std::hypot(sz, se)));
    ok_z += std::abs(r.z_zrp.back()) <= 3.0;
    ok_e += std::abs(r.z_excl.back()) <= 3.0;
    ok_c += std::abs(r.z_cross.back()) <= 3.0;
  }
  r.frac_zrp = static_cast<double>(ok_z) / static_cast<double>(n);
  r.frac_excl = static_cast<double>(ok_e) / static_cast<double>(n);
  r.frac_cross = static_cast<double>(ok_c) / static_cast<double>(n);
  r.pass = r.frac_zrp >= 0.95 && r.frac_excl >= 0.95 && r.frac_cross >= 0.95;
  return r;
}

BruteForceResult brute_force_two_site(const EventTables& tables, const RateFunction& g, const ThermoTables& thermo,
                                      std::span<const double> phi, int K) {
  if (tables.N != 3) throw ConfigError("brute_force_two_site: N must be 3");
  if (K < 1) throw ConfigError("brute_force_two_site: K must be positive");
  const std::size_t side = static_cast<std::size_t>(K) + 1;
  const std::size_t n = side * side;
  std::vector<double> A(n * n, 0.0);  // A = Q^T, row-major
  auto index = [side](std::size_t a, std::size_t b) { return a * side + b; };
  auto add = [&](std::size_t from, std::size_t to, double rate) {
    if (rate == 0.0) return;
    A[to * n + from] += rate;
    A[from * n + from] -= rate;
  };
  for (std::size_t a = 0; a < side; ++a) {
    for (std::size_t b = 0; b < side; ++b) {
      const std::size_t s = index(a, b);
      const std::size_t cnt[2] = {a, b};
      for (std::size_t x = 0; x < 2; ++x) {
        const std::size_t y = 1 - x;
        std::size_t up[2] = {a, b}, down[2] = {a, b}, move[2] = {a, b};
        if (cnt[x] < static_cast<std::size_t>(K)) {
          up[x] += 1;
          add(s, index(up[0], up[1]), tables.birth[x]);
        }
        if (cnt[x] > 0) {
          const double gk = g(static_cast<std::int64_t>(cnt[x]));
          down[x] -= 1;
          add(s, index(down[0], down[1]), gk * tables.death_base[x]);
          if (cnt[y] < static_cast<std::size_t>(K)) {
            move[x] -= 1;
            move[y] += 1;
            const double w = tables.destination_weight(static_cast<std::int64_t>(x) + 1, static_cast<std::int64_t>(y) + 1);
            add(s, index(move[0], move[1]), gk * w);
          }
        }
      }
    }
  }
  std::vector<double> rhs(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) A[(n - 1) * n + j] = 1.0;
  rhs[n - 1] = 1.0;
  if (!kernels::omp::lu_solve(A, rhs, n)) throw ConvergenceError("brute_force_two_site: singular generator");

  BruteForceResult r;
  r.K = K;
  r.marginals.assign(2, std::vector<double>(side, 0.0));
  for (std::size_t a = 0; a < side; ++a) {
    for (std::size_t b = 0; b < side; ++b) {
      const double p = rhs[index(a, b)];
      r.marginals[0][a] += p;
      r.marginals[1][b] += p;
      if (a == side - 1 || b == side - 1) r.leakage += p;
    }
  }
  for (std::size_t x = 0; x < 2; ++x) {
    double tv = 0.0, covered = 0.0;
    for (std::size_t k = 0; k < side; ++k) {
      const double q = thermo.ness_marginal_pmf(phi[x], static_cast<std::int64_t>(k));
      covered += q;
      tv += std::abs(r.marginals[x][k] - q);
    }
    tv += std::max(0.0, 1.0 - covered);
    r.tv.push_back(0.5 * tv);
    r.max_tv = std::max(r.max_tv, 0.5 * tv);
  }
  return r;
}

}  // namespace zrlj
