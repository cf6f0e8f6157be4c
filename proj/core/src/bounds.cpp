#include "hlaser/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "gauss_legendre.hpp"
#include "hlaser/errors.hpp"

namespace hlaser {
namespace {

constexpr double kAi0 = 0.355028053887817239;    // Ai(0)
constexpr double kAiP0 = 0.258819403792806798;   // -Ai'(0)

double ideal_g1(double l, double a, double b) { return std::exp(-0.5 * l * std::abs(a - b)); }

double ideal_g2(double l, double s, double sp, double tp, double t) {
  const double combo = std::abs(s - t) + std::abs(sp - tp) + std::abs(s - tp) + std::abs(t - sp) -
                       std::abs(s - sp) - std::abs(t - tp);
  return std::exp(-0.5 * l * combo);
}

// Gauss rule on [a, b] split at c when a < c < b.
detail::GaussRule split_rule(const detail::GaussRule& base, double a, double b, double c) {
  if (!(c > a && c < b)) return detail::mapped(base, a, b);
  const detail::GaussRule left = detail::mapped(base, a, c);
  const detail::GaussRule right = detail::mapped(base, c, b);
  detail::GaussRule out;
  const auto n = base.nodes.size();
  out.nodes.resize(2 * n);
  out.weights.resize(2 * n);
  out.nodes << left.nodes, right.nodes;
  out.weights << left.weights, right.weights;
  return out;
}

MsseTerms assemble(const HeterodyneSetup& st, double g1_integral, double cross, double same) {
  const double n = st.flux, tau = st.window;
  MsseTerms out;
  out.sds = 1.0 + 2.0 * n / tau * g1_integral + n * n / (tau * tau) * cross;
  out.ss = n * n / (tau * tau) * same;
  out.mse = (out.sds - out.ss) / (2.0 * n * n * tau * tau);
  return out;
}

MsseTerms quadrature_at(const HeterodyneSetup& st, int order) {
  const double l = st.linewidth, tau = st.window;
  const detail::GaussRule base = detail::gauss_legendre(order);
  const detail::GaussRule pos = detail::mapped(base, 0.0, tau);
  const detail::GaussRule neg = detail::mapped(base, -tau, 0.0);

  double g1_integral = 0.0;
  for (Eigen::Index i = 0; i < pos.nodes.size(); ++i) {
    const detail::GaussRule inner = split_rule(base, 0.0, tau, pos.nodes[i]);
    for (Eigen::Index j = 0; j < inner.nodes.size(); ++j) {
      g1_integral += pos.weights[i] * inner.weights[j] * ideal_g1(l, pos.nodes[i], inner.nodes[j]);
    }
  }

  // s in [0, tau], s' in [-tau, 0], t' in [0, tau], t in [-tau, 0]: kinks at t' = s, t = s'.
  double cross = 0.0;
  for (Eigen::Index i = 0; i < pos.nodes.size(); ++i) {
    const double s = pos.nodes[i];
    const detail::GaussRule tp_rule = split_rule(base, 0.0, tau, s);
    for (Eigen::Index j = 0; j < neg.nodes.size(); ++j) {
      const double sp = neg.nodes[j];
      const detail::GaussRule t_rule = split_rule(base, -tau, 0.0, sp);
      double acc = 0.0;
      for (Eigen::Index k = 0; k < tp_rule.nodes.size(); ++k) {
        for (Eigen::Index q = 0; q < t_rule.nodes.size(); ++q) {
          acc += tp_rule.weights[k] * t_rule.weights[q] * ideal_g2(l, s, sp, tp_rule.nodes[k], t_rule.nodes[q]);
        }
      }
      cross += pos.weights[i] * neg.weights[j] * acc;
    }
  }

  // s, s' in [0, tau], t', t in [-tau, 0]: kinks at s' = s, t = t'.
  double same = 0.0;
  for (Eigen::Index i = 0; i < pos.nodes.size(); ++i) {
    const double s = pos.nodes[i];
    const detail::GaussRule sp_rule = split_rule(base, 0.0, tau, s);
    for (Eigen::Index j = 0; j < neg.nodes.size(); ++j) {
      const double tp = neg.nodes[j];
      const detail::GaussRule t_rule = split_rule(base, -tau, 0.0, tp);
      double acc = 0.0;
      for (Eigen::Index k = 0; k < sp_rule.nodes.size(); ++k) {
        for (Eigen::Index q = 0; q < t_rule.nodes.size(); ++q) {
          acc += sp_rule.weights[k] * t_rule.weights[q] * ideal_g2(l, s, sp_rule.nodes[k], tp, t_rule.nodes[q]);
        }
      }
      same += pos.weights[i] * neg.weights[j] * acc;
    }
  }
  return assemble(st, g1_integral, cross, same);
}

double horner(const double* c, int n, double x) {
  double acc = 0.0;
  for (int k = n - 1; k >= 0; --k) acc = acc * x + c[k];
  return acc;
}

}  // namespace

double airy_ai(double z) {
  if (!(std::abs(z) <= 4.0)) throw ValidationError("airy_ai series is limited to |z| <= 4");
  const double z3 = z * z * z;
  double f_term = 1.0, g_term = z;
  double f = f_term, g = g_term;
  for (int k = 0; k < 200; ++k) {
    f_term *= z3 / ((3.0 * k + 2.0) * (3.0 * k + 3.0));
    g_term *= z3 / ((3.0 * k + 3.0) * (3.0 * k + 4.0));
    f += f_term;
    g += g_term;
    if (std::abs(f_term) + std::abs(g_term) < 1e-18 * (std::abs(f) + std::abs(g))) break;
  }
  return kAi0 * f - kAiP0 * g;
}

double airy_zero() {
  static const double root = [] {
    double lo = -3.0, hi = -2.0;  // Ai(lo) < 0 < Ai(hi)
    while (hi - lo > 1e-14) {
      const double mid = 0.5 * (lo + hi);
      (airy_ai(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return root;
}

double mse_constant() { return 4.0 * std::pow(std::abs(airy_zero() / 3.0), 3); }

double heisenberg_coefficient() { return 2.0 / 3.0 * std::pow(std::abs(3.0 / airy_zero()), 6); }

double heisenberg_bound(double mu) {
  if (!(mu > 0.0)) throw ValidationError("mu must be positive");
  return heisenberg_coefficient() * std::pow(mu, 4);
}

double sql_bound(double mu) {
  if (!(mu > 0.0)) throw ValidationError("mu must be positive");
  return 16.0 * mu * mu;
}

double HeterodyneSetup::sigma() const { return window * std::sqrt(flux * linewidth); }

HeterodyneSetup HeterodyneSetup::from_sigma(double flux, double linewidth, double sigma) {
  HeterodyneSetup st{flux, linewidth, sigma / std::sqrt(flux * linewidth)};
  st.validate();
  return st;
}

void HeterodyneSetup::validate() const {
  if (!(flux > 0.0 && linewidth > 0.0 && window > 0.0) || !std::isfinite(window)) {
    throw ValidationError("heterodyne setup needs positive flux, linewidth and window");
  }
}

MsseTerms msse_terms(const HeterodyneSetup& st) {
  st.validate();
  const double n = st.flux, tau = st.window, x = st.linewidth * st.window;
  const double em = std::expm1(0.5 * x);  // e^{x/2} - 1
  // Q = 4 e^{-4x} (e^{x/2} - 1)^4 (2 e^{x/2} + 3 e^x + 1)^2 / (9 x^4)
  const double ratio = em / x;
  const double poly = 2.0 * (1.0 + em) + 3.0 * std::exp(x) + 1.0;
  const double q = 4.0 * std::exp(-4.0 * x) * std::pow(ratio, 4) * poly * poly / 9.0;
  double h = 0.0, p = 0.0;
  if (x < kMsseSeriesBelow) {
    static constexpr double hc[] = {1.0 / 4,      -1.0 / 24,        1.0 / 192,           -1.0 / 1920,
                                    1.0 / 23040,  -1.0 / 322560,    1.0 / 5160960,       -1.0 / 92897280,
                                    1.0 / 1857945600};
    static constexpr double pq[] = {0.0,
                                    4.0 / 3,
                                    -3.0 / 2,
                                    193.0 / 180,
                                    -869.0 / 1440,
                                    181.0 / 630,
                                    -289867.0 / 2419200,
                                    649007.0 / 14515200,
                                    -31409.0 / 2073600};
    h = horner(hc, 9, x);
    p = q + horner(pq, 9, x);
  } else {
    h = (x + 2.0 * std::exp(-0.5 * x) - 2.0) / (x * x);
    const double f = std::exp(0.5 * x) * (x - 2.0) + 2.0;
    p = 16.0 * std::exp(-x) * f * f / std::pow(x, 4);
  }
  MsseTerms out;
  out.sds = 1.0 + 8.0 * n * tau * h + n * n * tau * tau * p;
  out.ss = n * n * tau * tau * q;
  // p - q before scaling, so small x keeps its digits.
  out.mse = 1.0 / (2.0 * n * n * tau * tau) + 4.0 * h / (n * tau) + 0.5 * (p - q);
  return out;
}

double msse_exact(const HeterodyneSetup& setup) { return msse_terms(setup).mse; }

MsseTerms msse_quadrature(const HeterodyneSetup& setup, int order, double tol) {
  setup.validate();
  if (order < 24) throw ValidationError("quadrature order must be at least 24");
  const MsseTerms coarse = quadrature_at(setup, order);
  const MsseTerms fine = quadrature_at(setup, 2 * order);
  const double change = std::abs(fine.mse - coarse.mse) / std::abs(fine.mse);
  if (!(change <= tol)) {
    throw NumericalFailure("MSE quadrature not converged under order doubling", change);
  }
  return fine;
}

double optimal_sigma(double flux, double linewidth, double lo, double hi) {
  if (!(lo > 0.0 && hi > lo)) throw ValidationError("sigma bracket must satisfy 0 < lo < hi");
  auto f = [&](double sigma) { return msse_exact(HeterodyneSetup::from_sigma(flux, linewidth, sigma)); };
  return boost::math::tools::brent_find_minima(f, lo, hi, 50).first;
}

BoundChain bound_chain(double mu, double coherence) {
  if (!(mu > 0.0 && coherence > 0.0)) throw ValidationError("mu and coherence must be positive");
  BoundChain out;
  out.mu = mu;
  out.coherence = coherence;
  const double linewidth_per_flux = 4.0 / coherence;
  out.lhs = 2.0 * std::sqrt(2.0 * linewidth_per_flux / 3.0);
  out.rhs = mse_constant() / (mu * mu);
  out.slack = (out.lhs / out.rhs) * (out.lhs / out.rhs);
  out.satisfied = out.lhs >= out.rhs * (1.0 - 1e-12);
  return out;
}

double binomial_entropy(long j) {
  if (j < 0) throw ValidationError("binomial size must be nonnegative");
  if (j == 0) return 0.0;
  if (j > kEntropyExactMax) {
    const double x = static_cast<double>(j);
    return 0.5 * std::log(std::numbers::pi * std::numbers::e * x / 2.0) - 1.0 / (12.0 * x * x) -
           1.0 / (6.0 * x * x * x);
  }
  const double sd = 0.5 * std::sqrt(static_cast<double>(j));
  const long lo = std::max(0L, static_cast<long>(std::floor(0.5 * j - 10.0 * sd)) - 1);
  const long hi = std::min(j, static_cast<long>(std::ceil(0.5 * j + 10.0 * sd)) + 1);
  const double lg_j = std::lgamma(j + 1.0), ln2j = j * std::numbers::ln2;
  double h = 0.0;
  for (long k = lo; k <= hi; ++k) {
    const double lp = lg_j - std::lgamma(k + 1.0) - std::lgamma(static_cast<double>(j - k) + 1.0) - ln2j;
    h -= std::exp(lp) * lp;
  }
  return h;
}

GAsymmetry g_asymmetry(double nbar, long cutoff) {
  if (!(nbar >= 0.0)) throw ValidationError("nbar must be nonnegative");
  GAsymmetry out;
  out.cutoff = cutoff;
  if (nbar == 0.0) return out;
  if (!(static_cast<double>(cutoff) >= 50.0 * nbar)) throw ValidationError("cutoff must be at least 50 * nbar");
  const double q = nbar / (1.0 + nbar);
  const double log_q = std::log(q);
  const double log_norm = std::log1p(-q);
  double sum = 0.0;
  for (long j = 1; j <= cutoff; ++j) {
    const double weight = std::exp(log_norm + j * log_q);
    if (weight == 0.0) break;
    sum += weight * binomial_entropy(j);
  }
  // H(Bin(j, 1/2)) <= ln(pi e j / 2) / 2 and sum_{j>J} p_j ln j <= q^{J+1} (ln(J+1) + nbar / (J+1)).
  const double next = static_cast<double>(cutoff) + 1.0;
  out.tail_bound = std::exp((cutoff + 1.0) * log_q) *
                   (0.5 * std::log(std::numbers::pi * std::numbers::e / 2.0) + 0.5 * std::log(next) +
                    0.5 * nbar / next);
  if (out.tail_bound > kAsymmetryTailTol) {
    throw ValidationError("cutoff too small: tail bound " + std::to_string(out.tail_bound));
  }
  out.value = sum;
  return out;
}

}  // namespace hlaser
