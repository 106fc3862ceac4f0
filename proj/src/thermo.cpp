#include "zrlj/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "zrlj/errors.hpp"

namespace zrlj {

namespace {

constexpr std::int64_t kMaxTerms = 1'000'000;
constexpr std::int64_t kLogCache = 1 << 16;
constexpr int kQuietTerms = 5;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

RateFunction RateFunction::identity() { return RateFunction{}; }

RateFunction RateFunction::indicator() {
  RateFunction g;
  g.kind_ = RateKind::indicator;
  return g;
}

RateFunction RateFunction::figure3() {
  RateFunction g;
  g.kind_ = RateKind::figure3;
  return g;
}

RateFunction RateFunction::table(std::vector<double> values, TailRule tail, double tail_constant) {
  if (values.empty()) throw ConfigError("rate table: no entries");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw ConfigError("rate table: g(" + std::to_string(i + 1) + ") must be positive and finite");
  }
  if (tail == TailRule::constant && !(tail_constant > 0.0 && std::isfinite(tail_constant)))
    throw ConfigError("rate table: tail constant must be positive");
  RateFunction g;
  g.kind_ = RateKind::table;
  g.values_ = std::move(values);
  g.tail_ = tail;
  g.tail_constant_ = tail_constant;
  return g;
}

RateFunction RateFunction::parse_table(std::istream& in) {
  std::map<std::int64_t, double> entries;
  bool have_tail = false;
  TailRule tail = TailRule::identity;
  double c = 0.0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "rate table line " + std::to_string(lineno) + ": ";
    if (line.rfind("tail:", 0) == 0) {
      if (have_tail) throw ConfigError(where + "duplicate tail rule");
      std::istringstream ts(line.substr(5));
      std::string word;
      ts >> word;
      if (word == "identity") {
        tail = TailRule::identity;
      } else if (word == "constant") {
        tail = TailRule::constant;
        if (!(ts >> c)) throw ConfigError(where + "tail constant needs a value");
      } else {
        throw ConfigError(where + "unknown tail rule '" + word + "'");
      }
      have_tail = true;
      continue;
    }
    std::istringstream ls(line);
    std::int64_t k = 0;
    double v = 0.0;
    std::string rest;
    if (!(ls >> k >> v) || (ls >> rest)) throw ConfigError(where + "expected 'k value'");
    if (k < 0) throw ConfigError(where + "negative k");
    if (k == 0) {
      if (v != 0.0) throw ConfigError(where + "g(0) must be 0");
      continue;
    }
    if (!entries.emplace(k, v).second) throw ConfigError(where + "duplicate k");
  }
  if (!have_tail) throw ConfigError("rate table: missing 'tail:' rule");
  if (entries.empty()) throw ConfigError("rate table: no entries");
  std::vector<double> values;
  std::int64_t expect = 1;
  for (const auto& [k, v] : entries) {
    if (k != expect) throw ConfigError("rate table: missing g(" + std::to_string(expect) + ")");
    values.push_back(v);
    ++expect;
  }
  return table(std::move(values), tail, c);
}

RateFunction RateFunction::load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("rate table: cannot open " + path);
  RateFunction g = parse_table(in);
  g.source_ = path;
  return g;
}

RateFunction RateFunction::from_spec(const std::string& spec) {
  if (spec == "identity") return identity();
  if (spec == "indicator") return indicator();
  if (spec == "figure3") return figure3();
  if (spec.rfind("table:", 0) == 0) return load_table(spec.substr(6));
  throw ConfigError("unknown rate function '" + spec + "'");
}

double RateFunction::operator()(std::int64_t k) const {
  if (k <= 0) return 0.0;
  switch (kind_) {
    case RateKind::identity: return static_cast<double>(k);
    case RateKind::indicator: return 1.0;
    case RateKind::figure3: {
      const double b = 1.0 + 3.0 / static_cast<double>(k);
      return b * b * b;
    }
    case RateKind::table:
      if (k <= static_cast<std::int64_t>(values_.size())) return values_[static_cast<std::size_t>(k - 1)];
      return tail_ == TailRule::identity ? static_cast<double>(k) : tail_constant_;
  }
  return 0.0;
}

std::string RateFunction::name() const {
  switch (kind_) {
    case RateKind::identity: return "identity";
    case RateKind::indicator: return "indicator";
    case RateKind::figure3: return "figure3";
    case RateKind::table: return source_.empty() ? std::string("table") : "table:" + source_;
  }
  return "?";
}

double RateFunction::limit() const {
  switch (kind_) {
    case RateKind::identity: return ThermoTables::kInf;
    case RateKind::indicator:
    case RateKind::figure3: return 1.0;
    case RateKind::table: return tail_ == TailRule::identity ? ThermoTables::kInf : tail_constant_;
  }
  return ThermoTables::kInf;
}

bool RateFunction::non_decreasing(std::int64_t K) const {
  for (std::int64_t k = 1; k < K; ++k) {
    if ((*this)(k + 1) < (*this)(k)) return false;
  }
  return true;
}

double estimate_phi_star(const RateFunction& g, std::int64_t K) {
  double lo = ThermoTables::kInf;
  for (std::int64_t k = K / 2; k <= K; ++k) lo = std::min(lo, g(k));
  return lo;
}

ThermoTables::ThermoTables(RateFunction rate, double truncation_tol)
    : rate_(std::move(rate)), tol_(truncation_tol) {
  if (!(tol_ > 0.0 && tol_ < 1e-3)) throw ConfigError("thermo: truncation tolerance out of range");
  log_g_.resize(kLogCache);
  log_fact_.resize(kLogCache + 1);
  log_fact_[0] = 0.0;
  for (std::int64_t k = 1; k <= kLogCache; ++k) {
    log_g_[k - 1] = std::log(rate_(k));
    log_fact_[k] = log_fact_[k - 1] + log_g_[k - 1];
  }
  phi_star_ = rate_.limit();
  phi_limit_ = std::isfinite(phi_star_) ? 0.999 * phi_star_ : kInf;
  m_star_ = kInf;
  if (std::isfinite(phi_star_) && rate_.kind() != RateKind::indicator) {
    // At the radius the series either converges (finite m*) or not.
    try {
      const SeriesMoments s = series(phi_star_);
      m_star_ = s.s1 / s.s0;
    } catch (const ConvergenceError&) {
      m_star_ = kInf;
    }
  }
}

double ThermoTables::log_g(std::int64_t k) const {
  if (k <= kLogCache) return log_g_[static_cast<std::size_t>(k - 1)];
  return std::log(rate_(k));
}

double ThermoTables::log_factorial(std::int64_t k) const {
  if (k < 0) throw DomainError("log_factorial: negative k");
  if (k <= kLogCache) return log_fact_[static_cast<std::size_t>(k)];
  double acc = log_fact_.back();
  for (std::int64_t j = kLogCache + 1; j <= k; ++j) acc += log_g(j);
  return acc;
}

void ThermoTables::check_phi(double phi, const char* who) const {
  if (!(phi >= 0.0)) throw DomainError(std::string(who) + ": fugacity must be non-negative");
  if (phi >= phi_star_)
    throw DomainError(std::string(who) + ": fugacity " + std::to_string(phi) +
                      " at or beyond the radius of convergence " + std::to_string(phi_star_));
  if (phi > phi_limit_)
    throw DomainError(std::string(who) + ": fugacity " + std::to_string(phi) + " beyond the working margin " +
                      std::to_string(phi_limit_));
}

SeriesMoments ThermoTables::series(double phi) const {
  SeriesMoments m;
  m.s0 = 1.0;
  m.terms = 1;
  if (phi == 0.0) return m;
  const double lphi = std::log(phi);
  double ref = 0.0;  // log of the scale of the sums
  double lf = 0.0;
  double prev = 0.0;
  int quiet = 0;
  for (std::int64_t k = 1; k <= kMaxTerms; ++k) {
    lf += log_g(k);
    const double l = static_cast<double>(k) * lphi - lf;
    if (l > ref) {
      const double f = std::exp(ref - l);
      m.s0 *= f;
      m.s1 *= f;
      m.s2 *= f;
      ref = l;
    }
    const double t = std::exp(l - ref);
    const double kd = static_cast<double>(k);
    m.s0 += t;
    m.s1 += kd * t;
    m.s2 += kd * kd * t;
    m.terms = k + 1;
    const bool small = t < tol_ * m.s0 && kd * t < tol_ * m.s1 && kd * kd * t < tol_ * m.s2;
    quiet = (small && l <= prev) ? quiet + 1 : 0;
    prev = l;
    if (quiet >= kQuietTerms) {
      m.log_scale = ref;
      return m;
    }
  }
  throw ConvergenceError("thermo: series at phi=" + std::to_string(phi) + " did not converge in " +
                         std::to_string(kMaxTerms) + " terms");
}

SeriesMoments ThermoTables::moments(double phi) const {
  check_phi(phi, "moments");
  return series(phi);
}

double ThermoTables::partition_Z(double phi) const { return std::exp(log_Z(phi)); }

double ThermoTables::log_Z(double phi) const {
  check_phi(phi, "partition_Z");
  const SeriesMoments s = series(phi);
  return s.log_scale + std::log(s.s0);
}

double ThermoTables::mean_R(double phi) const {
  check_phi(phi, "mean_R");
  if (phi == 0.0) return 0.0;
  const SeriesMoments s = series(phi);
  return s.s1 / s.s0;
}

double ThermoTables::mean_R_derivative(double phi) const {
  check_phi(phi, "mean_R_derivative");
  if (phi == 0.0) return 1.0 / rate_(1);
  const SeriesMoments s = series(phi);
  const double mean = s.s1 / s.s0;
  return (s.s2 / s.s0 - mean * mean) / phi;
}

double ThermoTables::fugacity_Phi(double m) const {
  if (!(m >= 0.0)) throw DomainError("fugacity_Phi: density must be non-negative");
  if (m >= m_star_)
    throw DomainError("fugacity_Phi: density " + std::to_string(m) + " at or beyond m* = " + std::to_string(m_star_));
  if (m == 0.0) return 0.0;
  double lo = 0.0;
  double hi;
  if (std::isfinite(phi_limit_)) {
    hi = phi_limit_;
    if (mean_R(hi) < m)
      throw DomainError("fugacity_Phi: density " + std::to_string(m) + " lies beyond the working margin (R(" +
                        std::to_string(hi) + ") = " + std::to_string(mean_R(hi)) + ")");
  } else {
    hi = std::max(1.0, m);
    while (mean_R(hi) < m) {
      lo = hi;
      hi *= 2.0;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    const double f = mean_R(x) - m;
    if (std::abs(f) <= 1e-14 * std::max(1.0, m)) return x;
    (f < 0.0 ? lo : hi) = x;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return x;
    double next = x - f / mean_R_derivative(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  throw ConvergenceError("fugacity_Phi: no convergence for m = " + std::to_string(m));
}

double ThermoTables::ness_marginal_pmf(double phi, std::int64_t k) const {
  check_phi(phi, "ness_marginal_pmf");
  if (k < 0) return 0.0;
  if (phi == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(k) * std::log(phi) - log_factorial(k) - log_Z(phi));
}

}  // namespace zrlj
