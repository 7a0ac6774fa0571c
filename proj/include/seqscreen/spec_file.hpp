#pragma once

#include "seqscreen/model.hpp"
#include "seqscreen/transforms.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace seqscreen {

// Model spec files are INI-like:
//
//   # comment
//   [signal]
//   family = beta
//   support = 0 1
//   params = 2 2
//
//   [kernel]
//   family = additive_noise
//   noise.family = logistic
//   noise.scale = 1
//
// Sections: [signal], [kernel] (required), [grid], [tolerances] and
// [relabeling] (written by `transform`). Numeric lists are separated by
// whitespace or commas. Unknown sections and keys are errors.

struct SpecEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct SpecSection {
    std::string name;
    int line = 0;
    std::vector<SpecEntry> entries;

    const SpecEntry* find(const std::string& key) const;
};

struct SpecDocument {
    std::vector<SpecSection> sections;

    const SpecSection* find(const std::string& name) const;
};

/// Syntax pass only (sections, key = value, duplicates). Throws SpecError.
SpecDocument parse_spec_document(const std::string& text);

struct LoadedSpec {
    /// Model to analyse; relabeled when the file has a [relabeling] section.
    ScreeningModel model;
    GridSpec grid;
    ToleranceConfig tolerances;
    /// Unrelabeled model for relabeled files.
    std::optional<ScreeningModel> base;
    std::shared_ptr<const Relabeling> relabeling;
    SpecDocument document;

    /// The model the file's [signal]/[kernel] sections describe.
    const ScreeningModel& defining_model() const { return base ? *base : model; }
};

/// Throws SpecError (with line numbers) for syntax and schema problems and
/// ArgumentError for invalid family parameters.
LoadedSpec load_spec_text(const std::string& text);
LoadedSpec load_spec_file(const std::string& path);

/// Serializes a relabeled model: the [signal] and [kernel] sections of
/// `source` verbatim, the resolved grid and tolerances, and a [relabeling]
/// section tabulating (v, phi(v), phi'(v)) at `lattice`.
std::string write_relabeled_spec(const LoadedSpec& source, const GridSpec& grid, const ToleranceConfig& tol,
                                 const Relabeling& r, std::span<const double> lattice);

/// Renders a number with 17 significant digits.
std::string format_number(double x);

}  // namespace seqscreen
