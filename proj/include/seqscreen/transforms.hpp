#pragma once

#include "seqscreen/model.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace seqscreen {

enum class RelabelingKind {
    InverseHazardIntegral,  // phi' = (1 - F)/f
    IntegratedHazard,       // phi' = f/(1 - F), phi = -log(1 - F)
    RunningMaxHazard,       // phi' = hazard / running max of hazard
    Mean,                   // phi = E[V | v]
    Affine,                 // phi = slope * v + intercept
    Tabulated,              // cubic Hermite through (v, phi, phi') nodes
};

std::string to_string(RelabelingKind k);
/// Accepts both `integrated_hazard` and `integrated-hazard` spellings.
RelabelingKind parse_relabeling_kind(const std::string& name);

/// Strictly increasing C^1 bijection phi of the signal support.
class Relabeling {
public:
    virtual ~Relabeling() = default;

    virtual RelabelingKind kind() const = 0;
    /// Kind the map was built as; tabulated maps remember their source.
    virtual std::string origin() const { return to_string(kind()); }
    virtual Interval domain() const = 0;
    /// [phi(lo), phi(hi)]; the upper end may be +inf (integrated hazard).
    virtual Interval codomain() const = 0;
    virtual double map(double v) const = 0;
    virtual double derivative(double v) const = 0;
    /// phi^{-1}(w), clamped to the domain for w on the codomain boundary.
    virtual double inverse(double w) const = 0;
};

struct RelabelingParams {
    /// phi(v_lo) for the integral kinds.
    double w_lower = 0.0;
    double slope = 1.0;
    double intercept = 0.0;
    /// Cells of the warm-start lattice.
    std::size_t lattice_cells = 512;
};

/// Builds a relabeling of the model's signal space. Throws
/// IntegrabilityError when a defining integral diverges (naming the
/// endpoint) and ArgumentError when the mean is not strictly increasing.
std::shared_ptr<const Relabeling> make_relabeling(const ScreeningModel& model, RelabelingKind kind,
                                                  const RelabelingParams& params = {}, const GridSpec& grid = {},
                                                  const ToleranceConfig& tol = {});

struct RelabelingNode {
    double v = 0.0;
    double w = 0.0;
    double dphi = 0.0;
};

/// Cubic Hermite relabeling through the given nodes (strictly increasing v
/// and w, positive derivatives).
std::shared_ptr<const Relabeling> make_tabulated_relabeling(std::vector<RelabelingNode> nodes, std::string origin);

/// Samples phi and phi' at the given signal values.
std::vector<RelabelingNode> sample_relabeling(const Relabeling& r, std::span<const double> vs);

/// Lattice written by the transform command: the grid's signal points with
/// `refine - 1` extra points inside each gap.
std::vector<double> relabeling_lattice(const ScreeningModel& model, const GridSpec& grid, std::size_t refine = 4);

/// A model carried through a relabeling. `model` evaluates
/// F~(w) = F(phi^{-1}(w)), f~(w) = f(v)/phi'(v), H~_w = H_{phi^{-1}(w)},
/// dH~_w/dw = (dH_v/dv)/phi'(v), and its signal grid is the image of the
/// base grid (matched grids).
struct TransformedModel {
    ScreeningModel base;
    std::shared_ptr<const Relabeling> relabeling;
    ScreeningModel model;
};

/// Result of the construction-time self-check of the two covariance identities.
struct IdentityCheck {
    std::size_t points = 0;
    double worst_hazard_residual = 0.0;
    double worst_ratio_residual = 0.0;
};

/// Wraps `base` with `r` and verifies both identities (transformed hazard
/// and transformed rate ratio) against finite differences of the
/// transformed F~ and H~ at 32 fixed interior points. Throws SelfCheckError
/// when a relative residual exceeds 1e-6.
TransformedModel apply_relabeling(const ScreeningModel& base, std::shared_ptr<const Relabeling> r,
                                  const GridSpec& grid = {}, IdentityCheck* check = nullptr);

/// Wraps without the self-check (used when loading tabulated maps from file
/// and by the self-check itself).
TransformedModel wrap_relabeling(const ScreeningModel& base, std::shared_ptr<const Relabeling> r);

struct GammaPsi {
    double gamma = 0.0;
    double psi = 0.0;
};

/// gamma~ and psi~ of the transformed model at (w, V).
GammaPsi transformed_gamma_psi(const TransformedModel& tm, double w, double V);

}  // namespace seqscreen
