#pragma once

#include "seqscreen/model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace seqscreen {

struct HazardValues {
    double hazard = 0.0;          // f / (1 - F)
    double inverse_hazard = 0.0;  // (1 - F) / f
};

/// Hazard and inverse hazard of the signal. Throws DomainError when
/// 1 - F(v) <= 1e-15 (move the grid off the top with endpoint_margin) or f(v) == 0.
HazardValues hazard(const ScreeningModel& model, double v);

/// gamma(v, V) = -(dH_v(V)/dv) / h_v(V). Throws DensityUnderflowError when h < 1e-300.
double gamma(const ScreeningModel& model, double v, double V);

/// psi(v, V) = V - inverse_hazard(v) * gamma(v, V).
double virtual_value(const ScreeningModel& model, double v, double V);

enum class Assumption { A0, A1, A2, FOSD, PSI };

std::string to_string(Assumption a);
Assumption parse_assumption(const std::string& name);
inline constexpr std::array<Assumption, 5> kAllAssumptions = {Assumption::A0, Assumption::A1, Assumption::A2,
                                                               Assumption::FOSD, Assumption::PSI};

/// Grid on which a verdict was reached, including tail truncation.
struct GridProvenance {
    GridSpec spec;
    double v_first = 0.0;
    double v_last = 0.0;
    double V_first = 0.0;
    double V_last = 0.0;
    bool truncated_lower = false;
    bool truncated_upper = false;
};

/// One offending pair (or point, for FOSD). Non-finite coordinates mean
/// "not applicable" (e.g. V for the signal-only A0 scan).
struct Witness {
    std::string axis;  // "v", "V" or "point"
    double v0 = 0.0;
    double V0 = 0.0;
    double value0 = 0.0;
    double v1 = 0.0;
    double V1 = 0.0;
    double value1 = 0.0;
    double magnitude = 0.0;
};

struct CheckReport {
    Assumption id = Assumption::A0;
    bool pass = true;
    /// Scanned quantity and how it was scanned, e.g. "dHdv/h increasing in V".
    std::string quantity;
    std::string scan;
    /// Sorted by decreasing magnitude.
    std::vector<Witness> witnesses;
    GridProvenance grid;
    ToleranceConfig tolerances;
    double min_value = 0.0;
    double max_value = 0.0;
    std::size_t evaluated_points = 0;
    std::size_t failed_points = 0;
    std::string note;
};

/// Every primitive evaluated once on the interior lattice. Row-major in (v, V).
struct GridEvaluation {
    GridSpec spec;
    std::vector<double> vs;
    ValueGrid values;
    std::vector<SignalValues> signal;
    std::vector<std::uint8_t> signal_ok;
    std::vector<KernelValues> kernel;
    std::vector<std::uint8_t> kernel_ok;
    std::size_t failed_points = 0;

    std::size_t index(std::size_t i, std::size_t j) const { return i * values.points.size() + j; }
    const std::vector<double>& Vs() const { return values.points; }
    bool ok(std::size_t i, std::size_t j) const { return signal_ok[i] && kernel_ok[index(i, j)]; }
    double gamma(std::size_t i, std::size_t j) const;
    double inverse_hazard(std::size_t i) const;
    double hazard(std::size_t i) const;
    double psi(std::size_t i, std::size_t j) const;
    GridProvenance provenance() const;
};

/// Evaluates the lattice (rows in parallel). Throws EvaluationError naming
/// the failing region when more than 1% of the points cannot be evaluated.
GridEvaluation evaluate_grid(const ScreeningModel& model, const GridSpec& grid);

CheckReport check_assumption(const GridEvaluation& eval, Assumption which, const ToleranceConfig& tol);
CheckReport check_assumption(const ScreeningModel& model, Assumption which, const GridSpec& grid,
                             const ToleranceConfig& tol);

/// Spot check of a declared dominating bound b(V) >= |dH_v(V)/dv|.
struct TailBoundCheck {
    bool declared = false;
    std::size_t samples = 0;
    bool pass = true;
    double worst_ratio = 0.0;
};

struct RegularityReport {
    std::array<CheckReport, 5> checks;
    /// A0, A1 and A2 all pass.
    bool es_regular = false;
    /// psi weakly increasing in both coordinates.
    bool psi_regular = false;
    TailBoundCheck tail_bound;
    std::string signal_family;
    std::string kernel_family;

    const CheckReport& get(Assumption a) const { return checks[static_cast<std::size_t>(a)]; }
};

RegularityReport regularity_report(const ScreeningModel& model, const GridSpec& grid, const ToleranceConfig& tol);
RegularityReport regularity_report(const ScreeningModel& model, const GridEvaluation& eval,
                                   const ToleranceConfig& tol);

}  // namespace seqscreen
