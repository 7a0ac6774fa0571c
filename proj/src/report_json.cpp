#include "seqscreen/report_json.hpp"

#include <cmath>

namespace seqscreen {

namespace {

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json to_json(const GridSpec& g) {
    Json j;
    j["v_points"] = g.v_points;
    j["V_points"] = g.V_points;
    j["endpoint_margin"] = g.endpoint_margin;
    j["tail_mass_cut"] = g.tail_mass_cut;
    return j;
}

Json to_json(const ToleranceConfig& t) {
    Json j;
    j["monotonicity_slack"] = t.monotonicity_slack;
    j["quadrature_rel"] = t.quadrature_rel;
    j["derivative_step"] = {{"rel", t.derivative_step.rel}, {"abs_min", t.derivative_step.abs_min}};
    return j;
}

Json to_json(const GridProvenance& p) {
    Json j = to_json(p.spec);
    j["v_range"] = {number(p.v_first), number(p.v_last)};
    j["V_range"] = {number(p.V_first), number(p.V_last)};
    return j;
}

Json to_json(const Witness& w) {
    Json j;
    j["axis"] = w.axis;
    j["from"] = {{"v", number(w.v0)}, {"V", number(w.V0)}, {"value", number(w.value0)}};
    j["to"] = {{"v", number(w.v1)}, {"V", number(w.V1)}, {"value", number(w.value1)}};
    j["magnitude"] = number(w.magnitude);
    return j;
}

Json to_json(const CheckReport& r, std::size_t max_witnesses) {
    Json j;
    j["assumption"] = to_string(r.id);
    j["pass"] = r.pass;
    j["quantity"] = r.quantity;
    j["scan"] = r.scan;
    j["range"] = {number(r.min_value), number(r.max_value)};
    j["evaluated_points"] = r.evaluated_points;
    j["failed_points"] = r.failed_points;
    j["witness_count"] = r.witnesses.size();
    Json ws = Json::array();
    for (std::size_t k = 0; k < r.witnesses.size() && k < max_witnesses; ++k) ws.push_back(to_json(r.witnesses[k]));
    j["witnesses"] = std::move(ws);
    j["grid"] = to_json(r.grid);
    j["tolerances"] = to_json(r.tolerances);
    j["truncation"] = {{"lower", r.grid.truncated_lower}, {"upper", r.grid.truncated_upper}};
    j["note"] = r.note;
    return j;
}

Json to_json(const RegularityReport& r, std::size_t max_witnesses) {
    Json j;
    j["signal_family"] = r.signal_family;
    j["kernel_family"] = r.kernel_family;
    j["es_regular"] = r.es_regular;
    j["psi_regular"] = r.psi_regular;
    Json failing = Json::array();
    for (const auto& c : r.checks)
        if (!c.pass) failing.push_back(to_string(c.id));
    j["failing"] = std::move(failing);
    Json checks = Json::array();
    for (const auto& c : r.checks) checks.push_back(to_json(c, max_witnesses));
    j["checks"] = std::move(checks);
    j["tail_bound"] = {{"declared", r.tail_bound.declared},
                       {"samples", r.tail_bound.samples},
                       {"pass", r.tail_bound.pass},
                       {"worst_ratio", number(r.tail_bound.worst_ratio)}};
    return j;
}

Json to_json(const PropositionReport& r) {
    auto checks = [](const std::vector<NamedCheck>& cs) {
        Json a = Json::array();
        for (const auto& c : cs) a.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        return a;
    };
    Json j;
    j["proposition"] = r.proposition;
    if (!r.direction.empty()) j["direction"] = r.direction;
    j["verdict"] = to_string(r.verdict);
    j["summary"] = r.summary;
    j["hypotheses"] = checks(r.hypotheses);
    j["conclusions"] = checks(r.conclusions);
    j["diagnostics"] = checks(r.diagnostics);
    Json ev = Json::array();
    for (const auto& t : r.evidence) {
        Json rows = Json::array();
        for (const auto& row : t.rows) {
            Json a = Json::array();
            for (double x : row) a.push_back(number(x));
            rows.push_back(std::move(a));
        }
        ev.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}});
    }
    j["evidence"] = std::move(ev);
    j["notes"] = r.notes;
    j["grid"] = to_json(r.grid);
    j["tolerances"] = to_json(r.tolerances);
    j["truncation"] = {{"lower", r.grid.truncated_lower}, {"upper", r.grid.truncated_upper}};
    return j;
}

Json model_echo(const SpecDocument& doc) {
    Json j;
    for (const auto& s : doc.sections) {
        if (s.name == "grid" || s.name == "tolerances") continue;
        Json sec;
        for (const auto& e : s.entries) {
            if (e.key == "lattice") {
                sec[e.key] = "(" + std::to_string(e.value.size()) + " characters)";
                continue;
            }
            sec[e.key] = e.value;
        }
        j[s.name] = std::move(sec);
    }
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace seqscreen
