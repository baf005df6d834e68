#include "rmtlab/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "rmtlab/errors.hpp"

namespace rmtlab {

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw IoError("cannot parse '" + path + "': " + e.what());
    }
}

void apply_override(Json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidParameter("override must look like key=value: " + assignment);
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    Json value;
    try {
        value = Json::parse(raw);
    } catch (const Json::parse_error&) {
        value = raw;
    }
    Json* node = &doc;
    std::stringstream path(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(path, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->is_object()) *node = Json::object();
        node = &(*node)[parts[i]];
    }
    if (!node->is_object()) *node = Json::object();
    (*node)[parts.back()] = value;
}

Complex complex_from_json(const Json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw InvalidParameter("complex value must be a number or [re, im], got " + j.dump());
}

Json complex_to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

EntryDistribution distribution_from_json(const Json& j) {
    if (j.is_string()) return EntryDistribution::from_name(j.get<std::string>());
    const std::string kind = j.value("kind", std::string("ginibre"));
    double param = 0.0;
    if (j.contains("params")) {
        const Json& p = j["params"];
        if (p.contains("p")) param = p["p"].get<double>();
        else if (p.contains("weight")) param = p["weight"].get<double>();
    }
    return EntryDistribution::from_name(kind, param);
}

Json distribution_to_json(const EntryDistribution& d) {
    Json j;
    switch (d.kind()) {
    case EntryKind::ginibre: j["kind"] = "ginibre"; break;
    case EntryKind::four_phase: j["kind"] = "four_phase"; break;
    case EntryKind::sparse_phase: j["kind"] = "sparse_phase"; j["params"] = {{"p", d.parameter()}}; break;
    case EntryKind::mixture: j["kind"] = "mixture"; j["params"] = {{"weight", d.parameter()}}; break;
    }
    return j;
}

FunctionSpec function_spec_from_json(const Json& j) {
    FunctionSpec f;
    f.family = j.at("family").get<std::string>();
    if (j.contains("params"))
        for (const auto& [k, v] : j["params"].items()) {
            if (k == "part") f.part = v.get<std::string>();
            else f.params[k] = v.get<double>();
        }
    if (j.contains("part")) f.part = j["part"].get<std::string>();
    return f;
}

Json function_spec_to_json(const FunctionSpec& f) {
    Json j;
    j["family"] = f.family;
    j["params"] = Json::object();
    for (const auto& [k, v] : f.params) j["params"][k] = v;
    if (f.family == "fourier") j["part"] = f.part;
    return j;
}

namespace {

std::vector<Complex> complex_list(const Json& j) {
    std::vector<Complex> out;
    // A list of entries, each a number or [re, im]; a bare number is a single shift.
    if (j.is_array())
        for (const auto& e : j) out.push_back(complex_from_json(e));
    else out.push_back(complex_from_json(j));
    return out;
}

} // namespace

ExperimentConfig parse_experiment(const Json& doc) {
    ExperimentConfig c;
    c.source = doc;
    try {
        c.experiment = doc.value("experiment", c.experiment);
        if (doc.contains("n")) {
            const Json& n = doc["n"];
            c.ns.clear();
            if (n.is_array()) for (const auto& v : n) c.ns.push_back(v.get<std::size_t>());
            else c.ns.push_back(n.get<std::size_t>());
            if (c.ns.empty()) throw InvalidParameter("config: n list is empty");
        }
        if (doc.contains("distribution")) c.distribution = distribution_from_json(doc["distribution"]);
        if (doc.contains("functions"))
            for (const auto& f : doc["functions"]) c.functions.push_back(function_spec_from_json(f));
        c.replicas = doc.value("replicas", c.replicas);
        c.base_seed = doc.value("base_seed", c.base_seed);
        if (doc.contains("kappa4") && !doc["kappa4"].is_null()) c.kappa4_override = doc["kappa4"].get<double>();
        if (doc.contains("quad")) {
            const Json& q = doc["quad"];
            c.quad.n_r = q.value("n_r", c.quad.n_r);
            c.quad.n_theta = q.value("n_theta", c.quad.n_theta);
            c.quad.fourier_K = q.value("fourier_K", c.quad.fourier_K);
            c.quad.fourier_M = q.value("fourier_M", c.quad.fourier_M);
            c.quad.check_convergence = q.value("check_convergence", c.quad.check_convergence);
        }
        if (doc.contains("girko")) {
            const Json& g = doc["girko"];
            c.girko.T = g.value("T", c.girko.T);
            c.girko.zgrid.n_r = g.value("grid_r", c.girko.zgrid.n_r);
            c.girko.zgrid.n_theta = g.value("grid_theta", c.girko.zgrid.n_theta);
            c.girko.zgrid.radius = g.value("radius", c.girko.zgrid.radius);
            c.girko.delta0 = g.value("delta0", c.girko.delta0);
            c.girko.delta1 = g.value("delta1", c.girko.delta1);
        }
        if (doc.contains("locallaw")) {
            const Json& l = doc["locallaw"];
            if (l.contains("eta_exponents")) c.locallaw.eta_exponents = l["eta_exponents"].get<std::vector<double>>();
            if (l.contains("z")) c.locallaw.z = complex_from_json(l["z"]);
            if (l.contains("two_resolvent_ns"))
                c.locallaw.two_resolvent_ns = l["two_resolvent_ns"].get<std::vector<std::size_t>>();
            c.locallaw.two_resolvent_replicas = l.value("two_resolvent_replicas", c.locallaw.two_resolvent_replicas);
            c.locallaw.two_resolvent_eta = l.value("two_resolvent_eta", c.locallaw.two_resolvent_eta);
            if (l.contains("z1")) c.locallaw.z1 = complex_from_json(l["z1"]);
            if (l.contains("z2")) c.locallaw.z2 = complex_from_json(l["z2"]);
        }
        if (doc.contains("overlap")) {
            const Json& o = doc["overlap"];
            if (o.contains("z1")) c.overlap.z1 = complex_from_json(o["z1"]);
            if (o.contains("z2")) c.overlap.z2 = complex_from_json(o["z2"]);
            c.overlap.k = o.value("k", c.overlap.k);
        }
        if (doc.contains("independence")) {
            const Json& o = doc["independence"];
            if (o.contains("z1")) c.independence.z1 = complex_from_json(o["z1"]);
            if (o.contains("z2")) c.independence.z2 = complex_from_json(o["z2"]);
            c.independence.eta = o.value("eta", c.independence.eta);
            c.independence.omega_hat = o.value("omega_hat", c.independence.omega_hat);
        }
        if (doc.contains("dbm")) {
            const Json& d = doc["dbm"];
            c.dbm.dt = d.value("dt", c.dbm.dt);
            c.dbm.t_final = d.value("t_final", c.dbm.t_final);
            c.dbm.mode = d.value("mode", c.dbm.mode);
            if (d.contains("z")) c.dbm.zs = complex_list(d["z"]);
            c.dbm.K = d.value("K", c.dbm.K);
            c.dbm.record_every = d.value("record_every", c.dbm.record_every);
            c.dbm.substep_cap = d.value("substep_cap", c.dbm.substep_cap);
        }
        if (doc.contains("output")) {
            c.output_csv = doc["output"].value("csv", std::string());
            c.output_json = doc["output"].value("json", std::string());
        }
    } catch (const Json::exception& e) {
        throw InvalidParameter(std::string("config: ") + e.what());
    }
    if (c.replicas < 2 && (c.experiment == "clt" || c.experiment == "dbm-independence"))
        throw InvalidParameter("config: at least two replicas are needed for variance estimates");
    return c;
}

ExperimentConfig load_experiment(const std::string& path, const std::vector<std::string>& overrides) {
    Json doc = load_json_file(path);
    for (const auto& o : overrides) apply_override(doc, o);
    return parse_experiment(doc);
}

std::string config_hash(const Json& doc) {
    const std::string s = doc.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace rmtlab
