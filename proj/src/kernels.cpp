#include "fevolve/kernels.hpp"

#include <cstdlib>
#include <exception>
#include <string>

#include <omp.h>

namespace fevolve::kernels {

namespace {

int initial_thread_count() {
  if (const char* env = std::getenv("FEVOLVE_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
    }
  }
  return omp_get_max_threads();
}

int& threads() {
  static int n = initial_thread_count();
  return n;
}

// Runs body(i) for i in [0, n) on the OpenMP team, rethrowing the first
// exception on the calling thread.
template <class Body>
void parallel_for(std::ptrdiff_t n, Body&& body) {
  std::exception_ptr failure;
#pragma omp parallel for schedule(static) num_threads(threads())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(fevolve_kernel_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

int thread_count() { return threads(); }
void set_thread_count(int n) { threads() = n > 0 ? n : 1; }

void weighted_tensors_serial(std::span<const double> samples, std::span<const double> weights,
                             const TensorFn& tensor, std::span<Mat> out) {
  for (std::size_t q = 0; q < samples.size(); ++q) out[q] = weights[q] * tensor(samples[q]);
}

void weighted_tensors_parallel(std::span<const double> samples, std::span<const double> weights,
                               const TensorFn& tensor, std::span<Mat> out) {
  parallel_for(static_cast<std::ptrdiff_t>(samples.size()), [&](std::ptrdiff_t q) {
    const auto i = static_cast<std::size_t>(q);
    out[i] = weights[i] * tensor(samples[i]);
  });
}

void evaluate_nodes_serial(const StateFn& g, std::span<const CVec> states, std::span<CVec> out) {
  for (std::size_t n = 0; n < states.size(); ++n) out[n] = g(states[n]);
}

void evaluate_nodes_parallel(const StateFn& g, std::span<const CVec> states, std::span<CVec> out) {
  parallel_for(static_cast<std::ptrdiff_t>(states.size()), [&](std::ptrdiff_t n) {
    const auto i = static_cast<std::size_t>(n);
    out[i] = g(states[i]);
  });
}

void nodal_map_serial(const std::function<Complex(Complex)>& f, const CVec& in, CVec& out) {
  out.resize(in.size());
  for (Eigen::Index i = 0; i < in.size(); ++i) out[i] = f(in[i]);
}

void nodal_map_parallel(const std::function<Complex(Complex)>& f, const CVec& in, CVec& out) {
  out.resize(in.size());
  parallel_for(in.size(), [&](std::ptrdiff_t i) { out[i] = f(in[i]); });
}

}  // namespace fevolve::kernels
