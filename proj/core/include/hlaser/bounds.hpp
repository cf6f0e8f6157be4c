#pragma once

namespace hlaser {

/// Ai(z) from its Maclaurin series; |z| <= 4.
double airy_ai(double z);

/// First zero of Ai, by bisection on [-3, -2].
double airy_zero();

/// 4 |z_A / 3|^3: optimal-phase-measurement MSE constant.
double mse_constant();

/// (2/3) |3 / z_A|^6.
double heisenberg_coefficient();

double heisenberg_bound(double mu);
double sql_bound(double mu);

struct HeterodyneSetup {
  double flux = 1.0;
  double linewidth = 0.0;
  double window = 0.0;  // tau

  double sigma() const;
  static HeterodyneSetup from_sigma(double flux, double linewidth, double sigma);
  void validate() const;
};

struct MsseTerms {
  double sds = 0.0;  // <S^dag S>
  double ss = 0.0;   // <S^2>
  double mse = 0.0;  // (sds - ss) / (2 N^2 tau^2)
};

inline constexpr double kMsseSeriesBelow = 1e-2;

/// Closed forms, with Taylor branches for l tau below kMsseSeriesBelow.
MsseTerms msse_terms(const HeterodyneSetup& setup);
double msse_exact(const HeterodyneSetup& setup);

/// Iterated Gauss-Legendre over the ideal g1/g2 integrals, split at the kinks.
/// Runs at `order` and 2 * order; throws NumericalFailure if the two
/// disagree by more than `tol` relative.
MsseTerms msse_quadrature(const HeterodyneSetup& setup, int order = 24, double tol = 1e-9);

/// argmin over sigma in [lo, hi] of msse_exact at fixed flux and linewidth.
double optimal_sigma(double flux, double linewidth, double lo = 0.5, double hi = 3.0);

struct BoundChain {
  double mu = 0.0;
  double coherence = 0.0;
  double lhs = 0.0;    // 2 sqrt(2 l / (3 N)) with l = 4 N / c
  double rhs = 0.0;    // 4 |z_A / 3|^3 / mu^2
  double slack = 0.0;  // (lhs / rhs)^2 = heisenberg_bound(mu) / c
  bool satisfied = false;
};

BoundChain bound_chain(double mu, double coherence);

/// Shannon entropy (nats) of Binomial(j, 1/2). Exact sum up to
/// kEntropyExactMax, asymptotic expansion above.
inline constexpr long kEntropyExactMax = 20000;
double binomial_entropy(long j);

struct GAsymmetry {
  double value = 0.0;
  double tail_bound = 0.0;
  long cutoff = 0;
};

/// sum_j p_j H(Binomial(j, 1/2)) for geometric p_j with mean nbar, j <= cutoff.
GAsymmetry g_asymmetry(double nbar, long cutoff);

inline constexpr double kAsymmetryTailTol = 1e-6;

}  // namespace hlaser
