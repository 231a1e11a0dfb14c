#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lensopt/optics/types.hpp"

namespace lensopt::analysis {

/// Scalar objective; empty optional marks an infeasible point.
using ScalarFn = std::function<std::optional<double>(const Vector6&)>;

/// Some stencil point could not be evaluated. Coordinates are 1-based.
class InfeasibleStencil : public std::runtime_error {
public:
    InfeasibleStencil(std::vector<int> coordinates, double delta);
    const std::vector<int>& coordinates() const noexcept { return coordinates_; }
    double delta() const noexcept { return delta_; }

private:
    std::vector<int> coordinates_;
    double delta_;
};

Vector6 fd_gradient(const ScalarFn& f, const Vector6& x, double delta);

/// Second-order central stencils. `asymmetry`, if given, receives
/// max |H_ij - H_ji| of the raw stencil before symmetrization.
Matrix6 fd_hessian(const ScalarFn& f, const Vector6& x, double delta, double* asymmetry = nullptr);

enum class Verdict { minimum, maximum, saddle, degenerate_flat, inconsistent_across_deltas };

std::string_view to_string(Verdict v);

/// Sign pattern of a spectrum; |lambda| <= 1e-6 * spectral radius counts as zero.
Verdict verdict_from_spectrum(const Vector6& eigenvalues);

struct DeltaProbe {
    double delta = 0.0;
    bool evaluable = false;
    double gradient_norm = 0.0;
    Vector6 gradient = Vector6::Zero();
    Vector6 spectrum = Vector6::Zero();  // ascending
    Verdict verdict = Verdict::degenerate_flat;
};

struct CriticalPointReport {
    Vector6 point = Vector6::Zero();
    double value = 0.0;
    std::vector<DeltaProbe> sweep;
    std::size_t consensus = 0;  // index into sweep
    double condition_number = 0.0;
    double dominance_ratio = 0.0;  // largest |lambda| over the second largest
    Verdict verdict = Verdict::degenerate_flat;

    const DeltaProbe& consensus_probe() const { return sweep[consensus]; }
};

/// 1e-4, 1e-5, ..., 1e-12.
std::vector<double> default_delta_sweep();

/// Probes every delta; deltas whose stencil leaves the feasible set are kept
/// in the sweep but marked non-evaluable. Throws InfeasibleStencil only when
/// no delta is evaluable.
CriticalPointReport classify_critical_point(const ScalarFn& f, const Vector6& x, const std::vector<double>& sweep);

}  // namespace lensopt::analysis
