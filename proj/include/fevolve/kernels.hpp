#pragma once

#include <functional>
#include <span>

#include "fevolve/types.hpp"

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP version; both produce bitwise-identical output because each output
// slot is written by exactly one iteration.

namespace fevolve::kernels {

/// Per-sample tensor model: writes the dim x dim tensor for a sampled value.
using TensorFn = std::function<Mat(double)>;
/// Right-hand side evaluated at one state. Must be reentrant.
using StateFn = std::function<CVec(const CVec&)>;

/// out[q] = weights[q] * D(samples[q]) for every quadrature sample.
void weighted_tensors_serial(std::span<const double> samples, std::span<const double> weights,
                             const TensorFn& tensor, std::span<Mat> out);
void weighted_tensors_parallel(std::span<const double> samples, std::span<const double> weights,
                               const TensorFn& tensor, std::span<Mat> out);

/// out[n] = g(states[n]) at every time node.
void evaluate_nodes_serial(const StateFn& g, std::span<const CVec> states, std::span<CVec> out);
void evaluate_nodes_parallel(const StateFn& g, std::span<const CVec> states, std::span<CVec> out);

/// Applies a scalar map entrywise (nodal nonlinearity).
void nodal_map_serial(const std::function<Complex(Complex)>& f, const CVec& in, CVec& out);
void nodal_map_parallel(const std::function<Complex(Complex)>& f, const CVec& in, CVec& out);

/// Thread count used by the parallel kernels. Honors FEVOLVE_THREADS.
int thread_count();
void set_thread_count(int n);

}  // namespace fevolve::kernels
