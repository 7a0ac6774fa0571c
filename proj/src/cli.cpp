#include "seqscreen/cli.hpp"

#include "seqscreen/errors.hpp"
#include "seqscreen/propositions.hpp"
#include "seqscreen/regularity.hpp"
#include "seqscreen/report_json.hpp"
#include "seqscreen/spec_file.hpp"
#include "seqscreen/transforms.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <optional>
#include <sstream>

namespace seqscreen {

namespace {

struct Options {
    std::string model;
    std::string grid;
    std::optional<double> slack;
    std::string out;
    std::string kind;
    int prop = 0;
    std::string direction = "both";
    std::string what;
    double slope = 1.0;
    double intercept = 0.0;
};

void apply_grid_override(const std::string& text, GridSpec& g) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) throw ArgumentError("--grid expects NxM, got '" + text + "'");
    auto count = [&](const std::string& s) -> std::size_t {
        std::size_t pos = 0;
        unsigned long n = 0;
        try {
            n = std::stoul(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != s.size() || n < 2) throw ArgumentError("--grid expects NxM with N, M >= 2, got '" + text + "'");
        return n;
    };
    g.v_points = count(text.substr(0, x));
    g.V_points = count(text.substr(x + 1));
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ArgumentError("cannot write '" + path + "'");
    f << text;
    if (!f) throw ArgumentError("failed writing '" + path + "'");
}

Json config_json(const GridSpec& g, const ToleranceConfig& t) {
    Json j;
    j["grid"] = to_json(g);
    j["tolerances"] = to_json(t);
    return j;
}

struct Resolved {
    LoadedSpec spec;
    GridSpec grid;
    ToleranceConfig tol;
};

Resolved resolve(const Options& o) {
    LoadedSpec spec = load_spec_file(o.model);
    GridSpec grid = spec.grid;
    ToleranceConfig tol = spec.tolerances;
    if (!o.grid.empty()) apply_grid_override(o.grid, grid);
    if (o.slack) tol.monotonicity_slack = *o.slack;
    grid.validate();
    tol.validate();
    validate_model(spec.defining_model(), grid, tol);
    return Resolved{std::move(spec), grid, tol};
}

int run_check(const Options& o, std::ostream& out, std::ostream& err) {
    const Resolved r = resolve(o);
    const RegularityReport rep = regularity_report(r.spec.model, r.grid, r.tol);
    Json j;
    j["command"] = "check";
    j["model"] = model_echo(r.spec.document);
    j["config"] = config_json(r.grid, r.tol);
    j["report"] = to_json(rep);
    emit(dump(j), o.out, out);
    for (const auto& c : rep.checks) {
        err << to_string(c.id) << ": " << (c.pass ? "pass" : "FAIL");
        if (!c.pass && !c.witnesses.empty()) {
            const Witness& w = c.witnesses.front();
            err << " (worst witness v=" << format_number(w.v0) << ", V=" << format_number(w.V0)
                << ", magnitude " << format_number(w.magnitude) << ")";
        }
        err << "\n";
    }
    err << "ES-regular: " << (rep.es_regular ? "yes" : "no") << ", psi-regular: " << (rep.psi_regular ? "yes" : "no")
        << "\n";
    return rep.es_regular ? 0 : 1;
}

int run_verify(const Options& o, std::ostream& out, std::ostream& err) {
    const Resolved r = resolve(o);
    std::vector<PropositionReport> reports;
    switch (o.prop) {
        case 1:
            reports.push_back(verify_prop1(r.spec.model, r.grid, r.tol));
            break;
        case 2:
            reports.push_back(verify_prop2(r.spec.model, r.grid, r.tol));
            break;
        case 3:
            if (o.direction != "converse")
                reports.push_back(verify_prop3(r.spec.model, Prop3Direction::Forward, r.grid, r.tol));
            if (o.direction != "forward")
                reports.push_back(verify_prop3(r.spec.model, Prop3Direction::Converse, r.grid, r.tol));
            break;
        default:
            throw ArgumentError("--prop must be 1, 2 or 3");
    }
    Json j;
    j["command"] = "verify";
    j["proposition"] = o.prop;
    j["model"] = model_echo(r.spec.document);
    j["config"] = config_json(r.grid, r.tol);
    Json arr = Json::array();
    int code = 0;
    for (const auto& rep : reports) {
        arr.push_back(to_json(rep));
        code = std::max(code, exit_code(rep));
        err << "proposition " << rep.proposition << (rep.direction.empty() ? "" : " (" + rep.direction + ")") << ": "
            << rep.summary << "\n";
    }
    j["reports"] = std::move(arr);
    emit(dump(j), o.out, out);
    return code;
}

int run_transform(const Options& o, std::ostream& out, std::ostream& err) {
    const Resolved r = resolve(o);
    if (r.spec.relabeling) throw ArgumentError("model is already relabeled; nested relabelings are not supported");
    const RelabelingKind kind = parse_relabeling_kind(o.kind);
    RelabelingParams params;
    params.slope = o.slope;
    params.intercept = o.intercept;
    auto phi = make_relabeling(r.spec.model, kind, params, r.grid, r.tol);
    IdentityCheck ic;
    apply_relabeling(r.spec.model, phi, r.grid, &ic);
    const auto lattice = relabeling_lattice(r.spec.model, r.grid);
    emit(write_relabeled_spec(r.spec, r.grid, r.tol, *phi, lattice), o.out, out);
    err << "relabeling " << phi->origin() << ": " << lattice.size() << " lattice nodes, codomain "
        << phi->codomain().describe() << ", identity residuals " << format_number(ic.worst_hazard_residual) << " / "
        << format_number(ic.worst_ratio_residual) << "\n";
    return 0;
}

int run_grid(const Options& o, std::ostream& out, std::ostream&) {
    enum class Q { H, h, dHdv, gamma, psi };
    Q q{};
    if (o.what == "H") q = Q::H;
    else if (o.what == "h") q = Q::h;
    else if (o.what == "dHdv") q = Q::dHdv;
    else if (o.what == "gamma") q = Q::gamma;
    else if (o.what == "psi") q = Q::psi;
    else throw ArgumentError("unknown quantity '" + o.what + "' (expected H, h, dHdv, gamma or psi)");

    const Resolved r = resolve(o);
    const GridEvaluation e = evaluate_grid(r.spec.model, r.grid);
    std::string csv = "v,V,value\n";
    csv.reserve(64 * e.vs.size() * e.Vs().size());
    for (std::size_t i = 0; i < e.vs.size(); ++i) {
        for (std::size_t j = 0; j < e.Vs().size(); ++j) {
            double value = std::nan("");
            if (e.ok(i, j)) {
                const KernelValues& k = e.kernel[e.index(i, j)];
                switch (q) {
                    case Q::H: value = k.H; break;
                    case Q::h: value = k.h; break;
                    case Q::dHdv: value = k.dHdv; break;
                    case Q::gamma: value = e.gamma(i, j); break;
                    case Q::psi: value = e.psi(i, j); break;
                }
            }
            csv += format_number(e.vs[i]);
            csv += ',';
            csv += format_number(e.Vs()[j]);
            csv += ',';
            csv += format_number(value);
            csv += '\n';
        }
    }
    emit(csv, o.out, out);
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Regularity and relabeling checks for sequential-screening models", "seqscreen"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("model", o.model, "model spec file")->required();
        sub->add_option("--grid", o.grid, "lattice size NxM (signal x value)");
        sub->add_option("--slack", o.slack, "monotonicity slack");
        sub->add_option("--out", o.out, "output path (default: standard output)");
    };
    CLI::App* check = app.add_subcommand("check", "run every assumption check");
    common(check);
    CLI::App* verify = app.add_subcommand("verify", "run a proposition suite");
    common(verify);
    verify->add_option("--prop", o.prop, "proposition")->required()->check(CLI::IsMember({1, 2, 3}));
    verify->add_option("--direction", o.direction, "proposition 3 direction")
        ->check(CLI::IsMember({"forward", "converse", "both"}));
    CLI::App* transform = app.add_subcommand("transform", "write a relabeled model spec");
    common(transform);
    transform->add_option("--kind", o.kind, "relabeling kind")->required();
    transform->add_option("--slope", o.slope, "affine slope");
    transform->add_option("--intercept", o.intercept, "affine intercept");
    CLI::App* grid = app.add_subcommand("grid", "export a field on the lattice as CSV");
    common(grid);
    grid->add_option("--what", o.what, "H, h, dHdv, gamma or psi")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (check->parsed()) return run_check(o, out, err);
        if (verify->parsed()) return run_verify(o, out, err);
        if (transform->parsed()) return run_transform(o, out, err);
        if (grid->parsed()) return run_grid(o, out, err);
    } catch (const SpecError& e) {
        err << "error: " << o.model << ": " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

}  // namespace seqscreen
