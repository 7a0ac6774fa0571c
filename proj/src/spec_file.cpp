#include "seqscreen/spec_file.hpp"

#include "seqscreen/errors.hpp"
#include "seqscreen/families.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace seqscreen {

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw SpecError("line " + std::to_string(line) + ": " + msg, line);
}

std::vector<double> parse_numbers(const SpecEntry& e) {
    std::vector<double> out;
    const std::string& s = e.value;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
        if (i >= s.size()) break;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != ',') ++j;
        double x = 0.0;
        const char* first = s.data() + i;
        const char* last = s.data() + j;
        if (*first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, x);
        if (ec != std::errc() || ptr != last)
            fail(e.line, "key '" + e.key + "': cannot parse '" + s.substr(i, j - i) + "' as a number");
        out.push_back(x);
        i = j;
    }
    return out;
}

double parse_number(const SpecEntry& e) {
    auto xs = parse_numbers(e);
    if (xs.size() != 1) fail(e.line, "key '" + e.key + "' expects one number, got " + std::to_string(xs.size()));
    return xs[0];
}

std::size_t parse_count(const SpecEntry& e) {
    const double x = parse_number(e);
    if (!(x >= 1.0) || x != static_cast<double>(static_cast<std::size_t>(x)) || x > 1e7)
        fail(e.line, "key '" + e.key + "' expects a positive integer, got '" + e.value + "'");
    return static_cast<std::size_t>(x);
}

// Checks that every key is allowed and that required keys are present.
void check_keys(const SpecSection& s, const std::set<std::string>& allowed, const std::set<std::string>& required,
                const std::string& context) {
    for (const auto& e : s.entries)
        if (!allowed.count(e.key)) fail(e.line, "unknown key '" + e.key + "' in section [" + s.name + "]" + context);
    for (const auto& k : required)
        if (!s.find(k)) fail(s.line, "section [" + s.name + "] is missing required key '" + k + "'" + context);
}

Interval parse_support(const SpecEntry& e) {
    auto xs = parse_numbers(e);
    if (xs.size() != 2) fail(e.line, "key 'support' expects two numbers 'lower upper'");
    if (!std::isfinite(xs[0]) || !std::isfinite(xs[1]) || !(xs[0] < xs[1]))
        fail(e.line, "signal support must be finite with lower < upper");
    return Interval{xs[0], xs[1]};
}

std::shared_ptr<const SignalDistribution> build_signal(const SpecSection& s) {
    const SpecEntry* fam = s.find("family");
    if (!fam) fail(s.line, "section [signal] is missing required key 'family'");
    const std::string& f = fam->value;
    try {
        if (f == "uniform") {
            check_keys(s, {"family", "support"}, {"support"}, " for family uniform");
            const Interval iv = parse_support(*s.find("support"));
            return make_uniform_signal(iv.lower, iv.upper);
        }
        if (f == "beta") {
            check_keys(s, {"family", "support", "params"}, {"params"}, " for family beta");
            Interval iv{0.0, 1.0};
            if (const auto* e = s.find("support")) iv = parse_support(*e);
            const SpecEntry& p = *s.find("params");
            auto ab = parse_numbers(p);
            if (ab.size() != 2) fail(p.line, "beta params expects two shape parameters 'a b'");
            return make_beta_signal(ab[0], ab[1], iv.lower, iv.upper);
        }
        if (f == "table") {
            check_keys(s, {"family", "support", "params"}, {"support", "params"}, " for family table");
            const Interval iv = parse_support(*s.find("support"));
            const SpecEntry& p = *s.find("params");
            auto dens = parse_numbers(p);
            if (dens.size() < 2) fail(p.line, "table params expects at least two density values");
            return make_table_signal(iv.lower, iv.upper, std::move(dens));
        }
    } catch (const SpecError&) {
        throw;
    } catch (const Error& e) {
        fail(fam->line, std::string("invalid [signal]: ") + e.what());
    }
    fail(fam->line, "unknown signal family '" + f + "' (expected uniform, beta or table)");
}

std::shared_ptr<const ValuationKernel> build_kernel(const SpecSection& s) {
    const SpecEntry* fam = s.find("family");
    if (!fam) fail(s.line, "section [kernel] is missing required key 'family'");
    const std::string& f = fam->value;
    try {
        if (f == "additive_noise") {
            check_keys(s, {"family", "noise.family", "noise.scale"}, {"noise.family"}, " for family additive_noise");
            const SpecEntry& nf = *s.find("noise.family");
            NoiseFamily noise{};
            try {
                noise = parse_noise_family(nf.value);
            } catch (const Error& e) {
                fail(nf.line, e.what());
            }
            double scale = 1.0;
            if (const auto* e = s.find("noise.scale")) scale = parse_number(*e);
            return make_additive_noise_kernel(noise, scale);
        }
        if (f == "power") {
            check_keys(s, {"family"}, {}, " for family power");
            return make_power_kernel();
        }
        if (f == "exp_tilt") {
            check_keys(s, {"family"}, {}, " for family exp_tilt");
            return make_exp_tilt_kernel();
        }
        if (f == "table") {
            check_keys(s, {"family", "table.v", "table.V", "table.H", "table.h", "table.dHdv"},
                       {"table.v", "table.V", "table.H"}, " for family table");
            KernelTable t;
            t.v_nodes = parse_numbers(*s.find("table.v"));
            t.V_nodes = parse_numbers(*s.find("table.V"));
            t.H = parse_numbers(*s.find("table.H"));
            if (const auto* e = s.find("table.h")) t.h = parse_numbers(*e);
            if (const auto* e = s.find("table.dHdv")) t.dHdv = parse_numbers(*e);
            return make_table_kernel(std::move(t));
        }
    } catch (const SpecError&) {
        throw;
    } catch (const Error& e) {
        fail(fam->line, std::string("invalid [kernel]: ") + e.what());
    }
    fail(fam->line, "unknown kernel family '" + f + "' (expected additive_noise, power, exp_tilt or table)");
}

GridSpec build_grid(const SpecSection* s) {
    GridSpec g;
    if (!s) return g;
    check_keys(*s, {"v_points", "V_points", "endpoint_margin", "tail_mass_cut"}, {}, "");
    if (const auto* e = s->find("v_points")) g.v_points = parse_count(*e);
    if (const auto* e = s->find("V_points")) g.V_points = parse_count(*e);
    if (const auto* e = s->find("endpoint_margin")) g.endpoint_margin = parse_number(*e);
    if (const auto* e = s->find("tail_mass_cut")) g.tail_mass_cut = parse_number(*e);
    try {
        g.validate();
    } catch (const Error& e) {
        fail(s->line, std::string("invalid [grid]: ") + e.what());
    }
    return g;
}

ToleranceConfig build_tolerances(const SpecSection* s) {
    ToleranceConfig t;
    if (!s) return t;
    check_keys(*s, {"monotonicity", "quadrature_rel"}, {}, "");
    if (const auto* e = s->find("monotonicity")) t.monotonicity_slack = parse_number(*e);
    if (const auto* e = s->find("quadrature_rel")) t.quadrature_rel = parse_number(*e);
    try {
        t.validate();
    } catch (const Error& e) {
        fail(s->line, std::string("invalid [tolerances]: ") + e.what());
    }
    return t;
}

std::shared_ptr<const Relabeling> build_relabeling(const SpecSection& s) {
    check_keys(s, {"kind", "lattice"}, {"kind", "lattice"}, "");
    const SpecEntry& kind = *s.find("kind");
    try {
        parse_relabeling_kind(kind.value);
    } catch (const Error& e) {
        fail(kind.line, e.what());
    }
    const SpecEntry& lat = *s.find("lattice");
    auto xs = parse_numbers(lat);
    if (xs.size() < 6 || xs.size() % 3 != 0)
        fail(lat.line, "relabeling lattice expects (v, w, dphi) triples, at least two of them");
    std::vector<RelabelingNode> nodes(xs.size() / 3);
    for (std::size_t k = 0; k < nodes.size(); ++k) nodes[k] = RelabelingNode{xs[3 * k], xs[3 * k + 1], xs[3 * k + 2]};
    try {
        return make_tabulated_relabeling(std::move(nodes), parse_relabeling_kind(kind.value) == RelabelingKind::Tabulated
                                                               ? std::string("tabulated")
                                                               : to_string(parse_relabeling_kind(kind.value)));
    } catch (const Error& e) {
        fail(lat.line, e.what());
    }
}

}  // namespace

const SpecEntry* SpecSection::find(const std::string& key) const {
    for (const auto& e : entries)
        if (e.key == key) return &e;
    return nullptr;
}

const SpecSection* SpecDocument::find(const std::string& name) const {
    for (const auto& s : sections)
        if (s.name == name) return &s;
    return nullptr;
}

SpecDocument parse_spec_document(const std::string& text) {
    static const std::set<std::string> known = {"signal", "kernel", "grid", "tolerances", "relabeling"};
    SpecDocument doc;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        if (auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(line, "malformed section header '" + s + "'");
            std::string name = trim(std::string_view(s).substr(1, s.size() - 2));
            if (!known.count(name)) fail(line, "unknown section [" + name + "]");
            if (doc.find(name)) fail(line, "duplicate section [" + name + "]");
            doc.sections.push_back(SpecSection{name, line, {}});
            continue;
        }
        auto eq = s.find('=');
        if (eq == std::string::npos) fail(line, "expected 'key = value', got '" + s + "'");
        std::string key = trim(std::string_view(s).substr(0, eq));
        std::string value = trim(std::string_view(s).substr(eq + 1));
        if (key.empty()) fail(line, "missing key before '='");
        if (doc.sections.empty()) fail(line, "key '" + key + "' appears before any section header");
        SpecSection& sec = doc.sections.back();
        if (sec.find(key)) fail(line, "duplicate key '" + key + "' in section [" + sec.name + "]");
        if (value.empty()) fail(line, "key '" + key + "' has an empty value");
        sec.entries.push_back(SpecEntry{key, value, line});
    }
    return doc;
}

LoadedSpec load_spec_text(const std::string& text) {
    SpecDocument doc = parse_spec_document(text);
    const SpecSection* sig = doc.find("signal");
    const SpecSection* ker = doc.find("kernel");
    if (!sig) fail(0, "missing required section [signal]");
    if (!ker) fail(0, "missing required section [kernel]");
    auto signal = build_signal(*sig);
    auto kernel = build_kernel(*ker);
    GridSpec grid = build_grid(doc.find("grid"));
    ToleranceConfig tol = build_tolerances(doc.find("tolerances"));

    std::optional<ScreeningModel> base;
    try {
        base.emplace(signal, kernel);
    } catch (const Error& e) {
        fail(ker->line, std::string("signal and kernel are incompatible: ") + e.what());
    }
    if (const SpecSection* rel = doc.find("relabeling")) {
        auto r = build_relabeling(*rel);
        const Interval s = signal->support();
        const Interval d = r->domain();
        if (d.lower < s.lower || d.upper > s.upper)
            fail(rel->line, "relabeling lattice " + d.describe() + " leaves the signal support " + s.describe());
        TransformedModel tm = wrap_relabeling(*base, r);
        return LoadedSpec{tm.model, grid, tol, tm.base, r, std::move(doc)};
    }
    return LoadedSpec{*base, grid, tol, std::nullopt, nullptr, std::move(doc)};
}

LoadedSpec load_spec_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecError("cannot open model spec '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_spec_text(ss.str());
}

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string write_relabeled_spec(const LoadedSpec& source, const GridSpec& grid, const ToleranceConfig& tol,
                                 const Relabeling& r, std::span<const double> lattice) {
    if (source.relabeling) throw ArgumentError("model is already relabeled; nested relabelings are not supported");
    std::ostringstream out;
    out << "# relabeled model (" << r.origin() << ")\n";
    for (const char* name : {"signal", "kernel"}) {
        const SpecSection* s = source.document.find(name);
        out << "[" << name << "]\n";
        for (const auto& e : s->entries) out << e.key << " = " << e.value << "\n";
        out << "\n";
    }
    out << "[grid]\n"
        << "v_points = " << grid.v_points << "\n"
        << "V_points = " << grid.V_points << "\n"
        << "endpoint_margin = " << format_number(grid.endpoint_margin) << "\n"
        << "tail_mass_cut = " << format_number(grid.tail_mass_cut) << "\n\n";
    out << "[tolerances]\n"
        << "monotonicity = " << format_number(tol.monotonicity_slack) << "\n"
        << "quadrature_rel = " << format_number(tol.quadrature_rel) << "\n\n";
    const auto nodes = sample_relabeling(r, lattice);
    out << "[relabeling]\n"
        << "kind = " << r.origin() << "\n"
        << "lattice =";
    for (const auto& n : nodes)
        out << "  " << format_number(n.v) << " " << format_number(n.w) << " " << format_number(n.dphi);
    out << "\n";
    return out.str();
}

}  // namespace seqscreen
