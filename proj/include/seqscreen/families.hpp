#pragma once

#include "seqscreen/model.hpp"

#include <memory>
#include <string>
#include <vector>

namespace seqscreen {

// Builtin signal families -----------------------------------------------------

std::shared_ptr<const SignalDistribution> make_uniform_signal(double lower, double upper);

/// Beta(a, b) rescaled to [lower, upper].
std::shared_ptr<const SignalDistribution> make_beta_signal(double a, double b, double lower = 0.0, double upper = 1.0);

/// Density tabulated at equally spaced nodes spanning [lower, upper],
/// interpolated log-linearly between nodes and normalized to unit mass.
/// Values must be strictly positive.
std::shared_ptr<const SignalDistribution> make_table_signal(double lower, double upper, std::vector<double> density);

// Builtin kernel families -----------------------------------------------------

enum class NoiseFamily { Normal, Logistic, Laplace };

NoiseFamily parse_noise_family(const std::string& name);
std::string to_string(NoiseFamily f);

/// V = v + scale * eps with eps standard (mean-zero) noise; support is the real line.
std::shared_ptr<const ValuationKernel> make_additive_noise_kernel(NoiseFamily noise, double scale = 1.0);

/// H_v(V) = V^v on (0, 1). Requires a strictly positive signal support.
std::shared_ptr<const ValuationKernel> make_power_kernel();

/// h_v(V) proportional to exp(v V) on (0, 1). dH/dv by finite differences.
std::shared_ptr<const ValuationKernel> make_exp_tilt_kernel(StepPolicy step = {});

/// Tabulated kernel on a (v, V) lattice with bilinear interpolation.
///
/// `H` is row-major with one row per v node. `h` and `dHdv` are optional
/// tables of the same shape; when absent they are the partial derivatives of
/// the bilinear H surface. The value support is [V_nodes.front(), V_nodes.back()].
struct KernelTable {
    std::vector<double> v_nodes;
    std::vector<double> V_nodes;
    std::vector<double> H;
    std::vector<double> h;
    std::vector<double> dHdv;
};
std::shared_ptr<const ValuationKernel> make_table_kernel(KernelTable table);

/// Samples an existing kernel on a lattice (H, h and dH/dv all tabulated).
KernelTable tabulate_kernel(const ValuationKernel& kernel, std::vector<double> v_nodes, std::vector<double> V_nodes);

}  // namespace seqscreen
