#include "mendel/report.hpp"

namespace mendel {
using nlohmann::json;

namespace {

json optional_time(const std::optional<double>& t) { return t ? json(*t) : json(nullptr); }

json quadratic_json(const Quadratic2& q) {
    return {{"x1x2", q.x1x2}, {"x2x2", q.x2x2}, {"x1x1", q.x1x1}};
}

json flow_json(const ReducedFlow& flow) { return {{"x1", quadratic_json(flow[0])}, {"x2", quadratic_json(flow[1])}}; }

}  // namespace

json to_json(const ModelParams& p) {
    return {{"f", p.f},   {"D", p.D},       {"delta", p.delta},         {"c", p.c},
            {"eta", p.eta}, {"c_aB", p.c_aB}, {"compat", std::string(name(p.compat))},
            {"K", p.K},   {"mu", p.mu}};
}

json state_json(const State& n) {
    json j = json::object();
    for (const auto g : kGenotypes) j[std::string(name(g))] = n[index(g)];
    return j;
}

json counts_json(const Counts& N) {
    json j = json::object();
    for (const auto g : kGenotypes) j[std::string(name(g))] = N[index(g)];
    return j;
}

json to_json(const PhaseSettings& s) {
    return {{"eps", s.eps},
            {"eps0", s.eps0},
            {"t2_delta", s.delta},
            {"entry_radius", s.entry_radius},
            {"t3_level", s.t3_level ? json(*s.t3_level) : json(nullptr)}};
}

json to_json(const PhaseReport& r) {
    return {{"settings", to_json(r.settings)},
            {"t3_level", r.t3_level},
            {"times",
             {{"T1", optional_time(r.T1)},
              {"T_eq", optional_time(r.T_eq)},
              {"T2", optional_time(r.T2)},
              {"T2_aA", optional_time(r.T2_aA)},
              {"T2_aB", optional_time(r.T2_aB)},
              {"T3", optional_time(r.T3)},
              {"T_entry", optional_time(r.T_entry)}}},
            {"min_sigma_aA_aB", {{"value", r.sigma_aA_aB.value}, {"time", r.sigma_aA_aB.time}}},
            {"min_weighted_a", {{"value", r.weighted_a.value}, {"time", r.weighted_a.time}}},
            {"functional_window_end", r.functional_window_end},
            {"sigma_at_T2", optional_time(r.sigma_at_T2)},
            {"t_end", r.t_end}};
}

json to_json(const IntegrationStats& s) {
    return {{"accepted_steps", s.accepted_steps}, {"rejected_steps", s.rejected_steps},
            {"evaluations", s.evaluations},       {"clamp_events", s.clamp_events},
            {"t_final", s.t_final},               {"stopped_early", s.stopped_by_observer}};
}

json to_json(const FixedPointSet& fp) {
    json list = json::array();
    for (const auto& x : fp.all)
        list.push_back({{"label", x.label}, {"n", json(std::vector<double>(x.n.begin(), x.n.end()))},
                        {"residual", x.residual}});
    return list;
}

json to_json(const SpectrumReport& s) {
    json values = json::array();
    for (const auto& e : s.eigenvalues) values.push_back({{"re", e.real()}, {"im", e.imag()}});
    return {{"label", s.label}, {"eigenvalues", values}, {"classification", std::string(name(s.classification))}};
}

json to_json(const ScalingFit& f) {
    return {{"axes", std::string(name(f.axes))}, {"points", f.points},       {"slope", f.slope},
            {"intercept", f.intercept},          {"slope_se", f.slope_se},   {"r_squared", f.r_squared},
            {"residual_rms", f.residual_rms}};
}

json to_json(const FlowVerdict& v) {
    return {{"verdict", v.attracting ? "attracting" : "repelling"},
            {"max_s", v.max_s},
            {"argmax_theta", v.argmax_theta},
            {"min_s", v.min_s}};
}

json to_json(const CenterManifoldReduction& cm) {
    json h = json::array();
    for (int k = 0; k < 4; ++k)
        h.push_back({{"component", k + 3}, {"lambda", cm.h(k, 0)}, {"nu", cm.h(k, 1)}, {"mu", cm.h(k, 2)}});
    json checks = json::array();
    for (const auto& c : cm.checks)
        checks.push_back({{"name", c.name},
                          {"numeric", c.numeric},
                          {"closed_form", c.closed_form},
                          {"relative_error", c.relative_error}});
    json stable = json::array();
    for (const double v : cm.stable_eigenvalues) stable.push_back(v);
    return {{"point", state_json(cm.point)},
            {"stable_eigenvalues", stable},
            {"h", h},
            {"cme_residual", cm.cme_residual},
            {"reduced_flow", flow_json(cm.flow)},
            {"closed_form_flow", flow_json(cm.closed_form)},
            {"coefficient_checks", checks},
            {"max_relative_mismatch", cm.max_relative_mismatch},
            {"closed_form_agrees", cm.closed_form_agrees},
            {"verdict", to_json(cm.verdict)},
            {"closed_form_verdict", to_json(cm.closed_form_verdict)}};
}

json summary_json(const SimulationResult& r) {
    return {{"status", std::string(name(r.status))},
            {"t_final", r.t_final},
            {"events", r.events},
            {"final_counts", counts_json(r.final_counts)}};
}

}  // namespace mendel
