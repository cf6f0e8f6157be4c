#include "simplex.hpp"

#include <cmath>
#include <limits>
#include <memory>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace hlaser::detail {
namespace {

struct Context {
  const std::function<double(const Eigen::VectorXd&)>* f;
  Eigen::VectorXd scratch;
};

double trampoline(const gsl_vector* v, void* params) {
  auto* ctx = static_cast<Context*>(params);
  for (Eigen::Index i = 0; i < ctx->scratch.size(); ++i) ctx->scratch[i] = gsl_vector_get(v, i);
  const double y = (*ctx->f)(ctx->scratch);
  return std::isfinite(y) ? y : std::numeric_limits<double>::max();
}

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};

}  // namespace

SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& f,
                               const Eigen::VectorXd& start, const Eigen::VectorXd& step,
                               long max_iterations, double size_tol) {
  const auto n = static_cast<std::size_t>(start.size());
  gsl_set_error_handler_off();
  Context ctx{&f, Eigen::VectorXd(start.size())};

  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(n));
  std::unique_ptr<gsl_vector, VectorDeleter> s(gsl_vector_alloc(n));
  for (std::size_t i = 0; i < n; ++i) {
    gsl_vector_set(x.get(), i, start[static_cast<Eigen::Index>(i)]);
    gsl_vector_set(s.get(), i, step[static_cast<Eigen::Index>(i)]);
  }
  gsl_multimin_function fn{&trampoline, n, &ctx};
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));
  gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), s.get());

  SimplexResult out;
  while (out.iterations < max_iterations) {
    ++out.iterations;
    if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), size_tol) == GSL_SUCCESS) {
      out.converged = true;
      break;
    }
  }
  out.x.resize(start.size());
  for (std::size_t i = 0; i < n; ++i) out.x[static_cast<Eigen::Index>(i)] = gsl_vector_get(gsl_multimin_fminimizer_x(m.get()), i);
  out.value = gsl_multimin_fminimizer_minimum(m.get());
  return out;
}

}  // namespace hlaser::detail
