#include "prwlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <regex>
#include <set>

#include <json.hpp>

#include "prwlab/error.hpp"

namespace prwlab {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }) ==
            allowed.end()) {
            throw Error(ErrorKind::validation, (where.empty() ? "" : where + ".") + it.key() + ": unknown key");
        }
    }
}

const json* child(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) return nullptr;
    const json& v = obj.at(key);
    if (!v.is_object()) throw Error(ErrorKind::validation, where + ": expected an object");
    return &v;
}

double get_positive(const json& obj, const char* key, const std::string& name, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) throw Error(ErrorKind::validation, name + ": expected a number");
    const double x = v.get<double>();
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw Error(ErrorKind::validation, name + ": must be positive, got " + v.dump());
    }
    return x;
}

std::uint64_t get_count(const json& obj, const char* key, const std::string& name, std::uint64_t fallback,
                        bool allow_zero = false) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (v.is_number_unsigned()) {
        const auto x = v.get<std::uint64_t>();
        if (x == 0 && !allow_zero) throw Error(ErrorKind::validation, name + ": must be positive");
        return x;
    }
    if (v.is_number_integer()) {
        throw Error(ErrorKind::validation, name + ": must be positive, got " + v.dump());
    }
    throw Error(ErrorKind::validation, name + ": expected a nonnegative integer");
}

double parse_schedule(const std::string& text) {
    static const std::regex re(R"(\s*floor\s*\(\s*t\s*\^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*\)\s*)");
    std::smatch m;
    if (!std::regex_match(text, m, re)) {
        throw Error(ErrorKind::validation,
                    "generations.j_schedule: expected an expression of the form floor(t^p), got '" + text + "'");
    }
    return std::stod(m[1].str());
}

std::size_t line_of(std::string_view text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

int GenerationsConfig::j_at(double t) const {
    return std::max(1, static_cast<int>(std::floor(std::pow(t, schedule_power) + 1e-12)));
}

std::string GenerationsConfig::schedule_text() const {
    char buf[48];
    std::snprintf(buf, sizeof buf, "floor(t^%.17g)", schedule_power);
    return buf;
}

void validate_config(ExperimentConfig& c) {
    c.warnings.clear();
    if (!(c.grid.h > 0.0)) throw Error(ErrorKind::validation, "grid.h: must be positive");
    if (!(c.grid.T >= c.grid.h)) throw Error(ErrorKind::validation, "grid.T: must be at least grid.h");
    if (c.generations.jmax < 1) throw Error(ErrorKind::validation, "generations.jmax: must be positive");
    const double p = c.generations.schedule_power;
    if (!(p > 0.0 && p <= 2.0 / 3.0 + 1e-12)) {
        throw Error(ErrorKind::validation, "generations.j_schedule: exponent must lie in (0, 2/3]");
    }
    if (p >= 0.5) {
        c.warnings.push_back("generations.j_schedule: exponent " + std::to_string(p) +
                             " is outside the o(t^(1/2)) window of the second-order predictor");
    }
    if (!grid_aligned(c.model, c.grid.h)) {
        throw Error(ErrorKind::grid_mismatch, "grid.h: step " + std::to_string(c.grid.h) +
                                                  " is not aligned with the point masses of " + c.model.id());
    }
    for (double t : c.verify.t_checkpoints) {
        if (!(t > 0.0)) throw Error(ErrorKind::validation, "verify.t_checkpoints: entries must be positive");
    }
    if (c.output_dir.empty()) throw Error(ErrorKind::validation, "output_dir: must not be empty");
}

ExperimentConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::parse, "config parse error at line " + std::to_string(line_of(text, e.byte)) +
                                          ": " + e.what());
    }
    if (!root.is_object()) throw Error(ErrorKind::validation, "config: top level must be an object");
    reject_unknown(root, "", {"model", "grid", "generations", "simulate", "verify", "output_dir"});

    ExperimentConfig c;
    const json* model = child(root, "model", "model");
    if (!model) throw Error(ErrorKind::validation, "model: missing");
    reject_unknown(*model, "model", {"family", "params", "coupling"});
    if (!model->contains("family") || !model->at("family").is_string()) {
        throw Error(ErrorKind::validation, "model.family: expected a string");
    }
    const Family fam = parse_family(model->at("family").get<std::string>());
    std::vector<ModelParam> params;
    if (const json* ps = child(*model, "params", "model.params")) {
        for (auto it = ps->begin(); it != ps->end(); ++it) {
            const std::string name = "model.params." + it.key();
            if (!it->is_number()) throw Error(ErrorKind::validation, name + ": expected a number");
            params.push_back({it.key(), it->get<double>()});
        }
    }
    std::optional<Coupling> coupling;
    if (model->contains("coupling")) {
        if (!model->at("coupling").is_string()) throw Error(ErrorKind::validation, "model.coupling: expected a string");
        coupling = parse_coupling(model->at("coupling").get<std::string>());
    }
    c.model = JointStepModel::from_params(fam, params, coupling);

    if (const json* g = child(root, "grid", "grid")) {
        reject_unknown(*g, "grid", {"h", "T"});
        c.grid.h = get_positive(*g, "h", "grid.h", c.grid.h);
        c.grid.T = get_positive(*g, "T", "grid.T", c.grid.T);
    }
    if (const json* g = child(root, "generations", "generations")) {
        reject_unknown(*g, "generations", {"jmax", "j_schedule"});
        const auto jmax = get_count(*g, "jmax", "generations.jmax", static_cast<std::uint64_t>(c.generations.jmax));
        if (jmax > 1000) throw Error(ErrorKind::validation, "generations.jmax: at most 1000");
        c.generations.jmax = static_cast<int>(jmax);
        if (g->contains("j_schedule")) {
            if (!g->at("j_schedule").is_string()) {
                throw Error(ErrorKind::validation, "generations.j_schedule: expected a string");
            }
            c.generations.schedule_power = parse_schedule(g->at("j_schedule").get<std::string>());
        }
    }
    if (const json* s = child(root, "simulate", "simulate")) {
        reject_unknown(*s, "simulate", {"t", "replicas", "master_seed", "max_nodes", "heights"});
        c.simulate.t = get_positive(*s, "t", "simulate.t", c.simulate.t);
        c.simulate.replicas = get_count(*s, "replicas", "simulate.replicas", c.simulate.replicas);
        c.simulate.master_seed = get_count(*s, "master_seed", "simulate.master_seed", c.simulate.master_seed, true);
        c.simulate.max_nodes = get_count(*s, "max_nodes", "simulate.max_nodes", c.simulate.max_nodes);
        if (s->contains("heights")) {
            if (!s->at("heights").is_boolean()) throw Error(ErrorKind::validation, "simulate.heights: expected a boolean");
            c.simulate.heights = s->at("heights").get<bool>();
        }
    }
    if (const json* v = child(root, "verify", "verify")) {
        reject_unknown(*v, "verify", {"theorems", "t_checkpoints"});
        if (v->contains("theorems")) {
            const json& th = v->at("theorems");
            if (!th.is_array()) throw Error(ErrorKind::validation, "verify.theorems: expected an array");
            for (const auto& x : th) {
                if (!x.is_string()) throw Error(ErrorKind::validation, "verify.theorems: expected strings");
                PredictionLabel l;
                try {
                    l = parse_label(x.get<std::string>());
                } catch (const Error& e) {
                    throw Error(ErrorKind::validation, std::string("verify.theorems: ") + e.what());
                }
                if (l == PredictionLabel::third_order || l == PredictionLabel::ell_power) {
                    throw Error(ErrorKind::validation, "verify.theorems: '" + x.get<std::string>() +
                                                           "' does not predict V_j and cannot be verified from tables");
                }
                c.verify.theorems.push_back(l);
            }
        }
        if (v->contains("t_checkpoints")) {
            const json& tc = v->at("t_checkpoints");
            if (!tc.is_array()) throw Error(ErrorKind::validation, "verify.t_checkpoints: expected an array");
            c.verify.t_checkpoints.clear();
            for (const auto& x : tc) {
                if (!x.is_number()) throw Error(ErrorKind::validation, "verify.t_checkpoints: expected numbers");
                c.verify.t_checkpoints.push_back(x.get<double>());
            }
        }
    }
    if (root.contains("output_dir")) {
        if (!root.at("output_dir").is_string()) throw Error(ErrorKind::validation, "output_dir: expected a string");
        c.output_dir = root.at("output_dir").get<std::string>();
    }
    validate_config(c);
    return c;
}

std::string serialize_config(const ExperimentConfig& c) {
    json model;
    model["family"] = std::string(to_string(c.model.family()));
    json params = json::object();
    for (const auto& p : c.model.params()) params[p.name] = p.value;
    model["params"] = params;
    model["coupling"] = std::string(to_string(c.model.coupling()));
    json theorems = json::array();
    for (auto l : c.verify.theorems) theorems.push_back(std::string(to_string(l)));
    json root;
    root["model"] = model;
    root["grid"] = {{"h", c.grid.h}, {"T", c.grid.T}};
    root["generations"] = {{"jmax", c.generations.jmax}, {"j_schedule", c.generations.schedule_text()}};
    root["simulate"] = {{"t", c.simulate.t},
                        {"replicas", c.simulate.replicas},
                        {"master_seed", c.simulate.master_seed},
                        {"max_nodes", c.simulate.max_nodes},
                        {"heights", c.simulate.heights}};
    root["verify"] = {{"theorems", theorems}, {"t_checkpoints", c.verify.t_checkpoints}};
    root["output_dir"] = c.output_dir;
    return root.dump(2);
}

}  // namespace prwlab
