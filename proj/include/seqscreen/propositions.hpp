#pragma once

#include "seqscreen/model.hpp"
#include "seqscreen/regularity.hpp"

#include <string>
#include <vector>

namespace seqscreen {

enum class Verdict {
    Consistent,              // every conclusion check passed
    DiscrepancyFlagged,      // a conclusion check failed
    HypothesisNotSatisfied,  // a hypothesis failed; conclusions not asserted
    NotApplicable,           // the proposition does not speak to this model
};

std::string to_string(Verdict v);

struct NamedCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct EvidenceTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct PropositionReport {
    int proposition = 0;
    /// "forward" or "converse" for proposition 3, empty otherwise.
    std::string direction;
    std::vector<NamedCheck> hypotheses;
    /// Only populated when every hypothesis passed.
    std::vector<NamedCheck> conclusions;
    /// Supporting checks that do not decide the verdict.
    std::vector<NamedCheck> diagnostics;
    std::vector<EvidenceTable> evidence;
    std::vector<std::string> notes;
    Verdict verdict = Verdict::NotApplicable;
    std::string summary;
    GridProvenance grid;
    ToleranceConfig tolerances;
};

/// 1 for a flagged discrepancy, 0 otherwise.
int exit_code(const PropositionReport& r);

/// Delta(v, S) = H_v(S + v) on the lattice (v_i, S_j), S_j = V_j - v_mid.
struct DeltaPoint {
    double v = 0.0;
    double S = 0.0;
    double delta = 0.0;
    /// dDelta/dv by a Richardson difference of H_v(S + v) in v.
    double delta1_fd = 0.0;
    /// h + dH/dv = h (1 - gamma) at (v, S + v).
    double delta1_factored = 0.0;
    double residual = 0.0;
    /// False where S + v leaves the open value support (Delta in {0, 1},
    /// Delta_1 = 0) or the density is too small for the factored form.
    bool evaluable = false;
};

struct DeltaField {
    std::vector<double> vs;
    std::vector<double> Ss;
    /// Row-major in (v, S).
    std::vector<DeltaPoint> points;
    std::size_t evaluable = 0;
    std::size_t over_tolerance = 0;
    double worst_residual = 0.0;
    double max_abs_delta1 = 0.0;

    const DeltaPoint& at(std::size_t i, std::size_t j) const { return points[i * Ss.size() + j]; }
};

/// Cross-checks the two forms of Delta_1. Throws EvaluationError naming the
/// region when the residual exceeds 1e-4 at more than 1% of evaluable points.
DeltaField delta_diagnostic(const ScreeningModel& model, const GridSpec& grid, const ToleranceConfig& tol = {});

PropositionReport verify_prop1(const ScreeningModel& model, const GridSpec& grid = {},
                               const ToleranceConfig& tol = {});

PropositionReport verify_prop2(const ScreeningModel& model, const GridSpec& grid = {},
                               const ToleranceConfig& tol = {});

enum class Prop3Direction { Forward, Converse };
std::string to_string(Prop3Direction d);

PropositionReport verify_prop3(const ScreeningModel& model, Prop3Direction direction, const GridSpec& grid = {},
                               const ToleranceConfig& tol = {});

}  // namespace seqscreen
