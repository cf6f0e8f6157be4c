#include "hlaser/control.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hlaser/errors.hpp"

namespace hlaser {
namespace {

using Extended = boost::multiprecision::cpp_bin_float_50;

template <class Real>
Real node_power(int n, int m) {  // n^{m + 1/2}
  using std::pow;
  using std::sqrt;
  return pow(Real(n), m) * sqrt(Real(n));
}

// Golub-Van Loan interpolation form: solves sum_m a_m x_n^m = f_n.
template <class Real>
std::vector<Real> bjorck_pereyra(const std::vector<Real>& x, std::vector<Real> f) {
  const int n = static_cast<int>(x.size()) - 1;
  for (int k = 0; k < n; ++k) {
    for (int i = n; i >= k + 1; --i) f[i] = (f[i] - f[i - 1]) / (x[i] - x[i - k - 1]);
  }
  for (int k = n - 1; k >= 0; --k) {
    for (int i = k; i < n; ++i) f[i] -= f[i + 1] * x[k];
  }
  return f;
}

struct Solved {
  Eigen::VectorXd v;
  double residual = 0.0;
};

template <class Real>
std::vector<Real> solve_in(int dim, const Eigen::VectorXd& rhs) {
  const int size = dim - 1;
  std::vector<Real> x(size), f(size);
  for (int i = 0; i < size; ++i) {
    const int n = i + 1;
    x[i] = Real(n);
    f[i] = Real(rhs[i]) / node_power<Real>(n, 1);
  }
  return bjorck_pereyra(x, f);
}

template <class Real>
Solved solve_typed(int dim, const Eigen::VectorXd& rhs) {
  const std::vector<Real> v = solve_in<Real>(dim, rhs);
  const int size = dim - 1;
  Solved out;
  out.v.resize(size);
  for (int i = 0; i < size; ++i) out.v[i] = static_cast<double>(v[i]);
  for (int i = 0; i < size; ++i) {
    Real acc = -Real(rhs[i]);
    for (int m = 0; m < size; ++m) acc += node_power<Real>(i + 1, m + 1) * v[m];
    using std::abs;
    out.residual = std::max(out.residual, static_cast<double>(abs(acc)));
  }
  return out;
}

template <class Real>
int det_sign(int dim) {
  using std::abs;
  const int size = dim - 1;
  std::vector<std::vector<Real>> a(size, std::vector<Real>(size));
  for (int i = 0; i < size; ++i) {
    for (int m = 0; m < size; ++m) a[i][m] = node_power<Real>(i + 1, m + 1);
  }
  int sign = 1;
  for (int k = 0; k < size; ++k) {
    int pivot = k;
    for (int i = k + 1; i < size; ++i) {
      if (abs(a[i][k]) > abs(a[pivot][k])) pivot = i;
    }
    if (a[pivot][k] == Real(0)) return 0;
    if (pivot != k) {
      std::swap(a[pivot], a[k]);
      sign = -sign;
    }
    if (a[k][k] < Real(0)) sign = -sign;
    for (int i = k + 1; i < size; ++i) {
      const Real factor = a[i][k] / a[k][k];
      for (int m = k; m < size; ++m) a[i][m] -= factor * a[k][m];
    }
  }
  return sign;
}

Precision resolve(Precision p, int dim, int double_max) {
  if (p == Precision::automatic) return dim <= double_max ? Precision::double_precision : Precision::extended;
  return p;
}

void check_dim(int dim) {
  if (dim < 2) throw ValidationError("dimension must be at least 2");
}

// Loss target (L s+ - L^T s-) is minus the basis combination built from v = F^-1 loss.
template <class Real>
Eigen::MatrixXd build_generator(const LaserModel& model, GeneratorKind which, Eigen::VectorXd& v_out) {
  const int dim = model.dim;
  const int size = dim - 1;
  Eigen::VectorXd rhs = which == GeneratorKind::gain ? model.gain : model.loss;
  std::vector<Real> v = solve_in<Real>(dim, rhs);
  if (which == GeneratorKind::loss) {
    for (auto& c : v) c = -c;
  }
  v_out.resize(size);
  for (int i = 0; i < size; ++i) v_out[i] = static_cast<double>(v[i]);
  // (a^dag a)^m a^dag has <n|.|n-1> = n^{m+1/2}; s- = |0><1| on the qubit.
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(2 * dim, 2 * dim);
  for (int n = 1; n < dim; ++n) {
    Real amp = 0;
    for (int m = 0; m < size; ++m) amp += node_power<Real>(n, m + 1) * v[m];
    const double a = static_cast<double>(amp);
    gen(2 * n + 0, 2 * (n - 1) + 1) += a;   // raise cavity, lower qubit
    gen(2 * (n - 1) + 1, 2 * n + 0) -= a;   // lower cavity, raise qubit
  }
  return gen;
}

}  // namespace

std::string to_string(Precision p) {
  switch (p) {
    case Precision::automatic: return "automatic";
    case Precision::double_precision: return "double";
    case Precision::extended: return "extended";
  }
  return "unknown";
}

Precision parse_precision(const std::string& name) {
  if (name == "double") return Precision::double_precision;
  if (name == "extended") return Precision::extended;
  if (name == "automatic" || name == "auto") return Precision::automatic;
  throw ValidationError("unknown precision '" + name + "' (expected double or extended)");
}

std::string to_string(GeneratorKind k) { return k == GeneratorKind::gain ? "gain" : "loss"; }

VandermondeSystem solve_vandermonde(int dim, const Eigen::VectorXd& rhs, Precision precision) {
  check_dim(dim);
  if (rhs.size() != dim - 1) throw ValidationError("rhs must have length dim - 1");
  VandermondeSystem sys;
  sys.dim = dim;
  sys.rhs = rhs;
  sys.precision = resolve(precision, dim, kDoubleSolveMaxDim);
  const Solved s = sys.precision == Precision::double_precision ? solve_typed<double>(dim, rhs)
                                                                : solve_typed<Extended>(dim, rhs);
  sys.v = s.v;
  sys.residual = s.residual;
  sys.v_norm = s.v.cwiseAbs().maxCoeff();
  const double scale = rhs.cwiseAbs().maxCoeff();
  if (!(sys.residual <= 1e-6 * scale)) {
    throw NumericalFailure("Vandermonde residual " + std::to_string(sys.residual) +
                               " too large; use extended precision",
                           sys.residual);
  }
  return sys;
}

int det_positive(int dim, Precision precision) {
  check_dim(dim);
  const Precision p = resolve(precision, dim, kDoubleDetMaxDim);
  if (p == Precision::double_precision && dim > kDoubleDetMaxDim) {
    throw ValidationError("double-precision determinant limited to dim <= " + std::to_string(kDoubleDetMaxDim));
  }
  const int sign = p == Precision::double_precision ? det_sign<double>(dim) : det_sign<Extended>(dim);
  if (sign != 1) throw NumericalFailure("determinant sign is not positive (precision loss)", sign);
  return sign;
}

GeneratorReconstruction reconstruct_generator(const LaserModel& model, GeneratorKind which, Precision precision) {
  check_dim(model.dim);
  const int dim = model.dim;
  GeneratorReconstruction out;
  out.which = which;
  out.dim = dim;
  out.precision = resolve(precision, dim, kDoubleSolveMaxDim);
  // Surfaces solver failure before building anything.
  solve_vandermonde(dim, which == GeneratorKind::gain ? model.gain : model.loss, out.precision);
  out.generator = out.precision == Precision::double_precision ? build_generator<double>(model, which, out.v)
                                                               : build_generator<Extended>(model, which, out.v);
  out.v_norm = out.v.cwiseAbs().maxCoeff();

  Eigen::MatrixXd target = Eigen::MatrixXd::Zero(2 * dim, 2 * dim);
  for (int n = 1; n < dim; ++n) {
    if (which == GeneratorKind::gain) {  // G s- - G^T s+
      target(2 * n, 2 * (n - 1) + 1) += model.gain_at(n);
      target(2 * (n - 1) + 1, 2 * n) -= model.gain_at(n);
    } else {  // L s+ - L^T s-
      target(2 * (n - 1) + 1, 2 * n) += model.loss_at(n);
      target(2 * n, 2 * (n - 1) + 1) -= model.loss_at(n);
    }
  }
  out.residual = (out.generator - target).cwiseAbs().maxCoeff();
  out.skew_residual = (out.generator + out.generator.transpose()).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace hlaser
