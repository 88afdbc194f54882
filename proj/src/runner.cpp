#include "prwlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "prwlab/asymp.hpp"
#include "prwlab/branching.hpp"
#include "prwlab/error.hpp"
#include "prwlab/growth_rate.hpp"
#include "prwlab/renewal.hpp"

namespace prwlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class ArtifactWriter {
public:
    explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error(ErrorKind::io, "cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    void write(const std::string& name, const std::string& content) {
        const fs::path p = dir_ / name;
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::io, "cannot open " + p.string() + " for writing");
        files_.push_back(name);
        out << content;
        if (!out) throw Error(ErrorKind::io, "write to " + p.string() + " failed");
    }

    void remove_all() noexcept {
        for (const auto& f : files_) {
            std::error_code ec;
            fs::remove(dir_ / f, ec);
        }
        files_.clear();
    }

    const std::vector<std::string>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

json optional_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

// Grid horizon rounded up to a node at or beyond `t`.
double horizon_for(double t, double h) { return std::ceil(t / h - 1e-9) * h; }

std::string tables_csv(const RenewalTables& t) {
    std::ostringstream os;
    os << "t,U,V";
    for (std::size_t j = 2; j <= t.Vj.size(); ++j) os << ",V_" << j;
    os << '\n';
    const std::size_t n = t.U.size();
    for (std::size_t k = 0; k < n; ++k) {
        os << format_double(t.U.node(k)) << ',' << format_double(t.U[k]) << ',' << format_double(t.V[k]);
        for (std::size_t j = 1; j < t.Vj.size(); ++j) os << ',' << format_double(t.Vj[j][k]);
        os << '\n';
    }
    return os.str();
}

std::string scalars_json(const RenewalTables& t) {
    json j;
    j["model"] = t.model_id;
    j["h"] = t.h;
    j["T"] = t.T;
    j["jmax"] = t.Vj.size();
    j["m"] = t.m;
    j["gamma0"] = optional_json(t.gamma0);
    j["c0"] = optional_json(t.c0);
    j["cL"] = optional_json(t.cL);
    j["tail_mass"] = {{"xi", t.xi_tail_mass}, {"eta", t.eta_tail_mass}};
    j["warnings"] = t.warnings;
    return j.dump(2) + "\n";
}

std::string grid_csv(const GridFunction& g) {
    std::ostringstream os;
    g.write_csv(os);
    return os.str();
}

int dump_generation(const std::string& name) {
    if (name.size() > 2 && name[0] == 'V' && name[1] == '_') {
        try {
            std::size_t pos = 0;
            const int j = std::stoi(name.substr(2), &pos);
            if (pos == name.size() - 2 && j >= 1) return j;
        } catch (const std::exception&) {
        }
    }
    return 0;
}

void write_dumps(ArtifactWriter& w, const ExperimentConfig& c, const RunOptions& o, const RenewalTables* tables) {
    if (o.dumps.empty()) return;
    int need_j = 1;
    for (const auto& d : o.dumps) {
        if (d == "F" || d == "G" || d == "U" || d == "V") continue;
        const int j = dump_generation(d);
        if (j == 0) {
            throw Error(ErrorKind::validation, "--dump: unknown grid function '" + d + "' (use F, G, U, V or V_<j>)");
        }
        need_j = std::max(need_j, j);
    }
    std::optional<RenewalTables> own;
    if (!tables || static_cast<int>(tables->Vj.size()) < need_j) {
        own = build_tables(c.model, c.grid.h, c.grid.T, need_j);
        tables = &*own;
    }
    const DiscretizedMarginals dm = discretize_cdf(c.model, tables->h, tables->T);
    for (const auto& d : o.dumps) {
        const GridFunction* g = nullptr;
        if (d == "F") g = &dm.xi_cdf;
        else if (d == "G") g = &dm.eta_cdf;
        else if (d == "U") g = &tables->U;
        else if (d == "V") g = &tables->V;
        else g = &tables->generation(dump_generation(d));
        w.write(d + ".csv", grid_csv(*g));
    }
}

void run_tables(ArtifactWriter& w, const ExperimentConfig& c, const RunOptions& o, RunReport& rep) {
    const RenewalTables t = build_tables(c.model, c.grid.h, c.grid.T, c.generations.jmax);
    w.write("tables.csv", tables_csv(t));
    w.write("scalars.json", scalars_json(t));
    rep.warnings.insert(rep.warnings.end(), t.warnings.begin(), t.warnings.end());
    write_dumps(w, c, o, &t);
}

void run_simulate(ArtifactWriter& w, const ExperimentConfig& c, const RunOptions& o, RunReport& rep) {
    SimConfig sc{c.model, c.simulate.t, c.generations.jmax, c.simulate.replicas, c.simulate.master_seed,
                 c.simulate.max_nodes, c.simulate.heights, false, o.threads};
    const SimResult r = simulate_ensemble(sc);
    std::ostringstream sim;
    sim << "replica,j,N_j\n";
    for (std::size_t i = 0; i < r.replicas(); ++i) {
        for (int j = 1; j <= r.jmax; ++j) sim << i << ',' << j << ',' << r.count(i, j) << '\n';
    }
    w.write("sim.csv", sim.str());
    if (c.simulate.heights) {
        std::ostringstream hs;
        hs << "replica,H\n";
        for (std::size_t i = 0; i < r.replicas(); ++i) {
            hs << i << ',';
            if (r.heights[i]) hs << *r.heights[i];
            hs << '\n';
        }
        w.write("heights.csv", hs.str());
    }
    const auto nt = static_cast<std::size_t>(std::count(r.truncated.begin(), r.truncated.end(), true));
    if (nt > 0) {
        rep.warnings.push_back(std::to_string(nt) + " replica(s) hit simulate.max_nodes; their counts are partial");
    }
    write_dumps(w, c, o, nullptr);
}

void run_gamma(ArtifactWriter& w, const ExperimentConfig& c, const RunOptions& o, RunReport& rep) {
    const GammaResult g = gamma_rate(c.model);
    json j;
    j["model"] = c.model.id();
    j["gamma"] = g.gamma;
    j["mu_at_gamma"] = g.mu_at_gamma;
    j["inner_minimizer_s"] = g.inner_minimizer_s;
    j["bracket"] = {g.bracket_lo, g.bracket_hi};
    j["iterations"] = g.iterations;
    j["unimodal"] = g.unimodal;
    const std::string text = j.dump(2) + "\n";
    w.write("gamma.json", text);
    rep.stdout_text = text;
    if (!g.unimodal) rep.warnings.push_back("mu: coarse scan saw more than one local minimum");
    write_dumps(w, c, o, nullptr);
}

void run_verify(ArtifactWriter& w, const ExperimentConfig& c, const RunOptions& o, RunReport& rep) {
    if (c.verify.theorems.empty()) {
        write_dumps(w, c, o, nullptr);
        return;
    }
    const bool blackwell = std::find(c.verify.theorems.begin(), c.verify.theorems.end(),
                                     PredictionLabel::blackwell) != c.verify.theorems.end();
    double tmax = 0.0;
    int jmax = 1;
    for (double t : c.verify.t_checkpoints) {
        tmax = std::max(tmax, t);
        jmax = std::max(jmax, c.generations.j_at(t));
    }
    const double need = tmax + (blackwell ? 1.0 : 0.0);
    if (need > c.grid.T + 1e-9) {
        throw Error(ErrorKind::validation, "grid.T: " + format_double(c.grid.T) + " does not cover the checkpoint " +
                                               format_double(need));
    }
    const RenewalTables tab = build_tables(c.model, c.grid.h, horizon_for(need, c.grid.h), jmax);
    rep.warnings.insert(rep.warnings.end(), tab.warnings.begin(), tab.warnings.end());

    // compact dRi surrogate: triangle on [0, 1] with peak 1 at 1/2
    const double h = c.grid.h;
    GridFunction tri = GridFunction::sample(h, 0, static_cast<std::size_t>(std::llround(1.0 / h)) + 1,
                                            [](double x) { return std::max(0.0, 1.0 - std::abs(2.0 * x - 1.0)); });
    const double tri_integral = 0.5;

    auto vprev = [&](int j, double t) { return j == 1 ? 1.0 : tab.generation(j - 1)[tab.U.index_of(t)]; };

    std::ostringstream os;
    os << "theorem,t,j,table_value_log,prediction_log,ratio\n";
    for (PredictionLabel label : c.verify.theorems) {
        for (double t : c.verify.t_checkpoints) {
            const int j = c.generations.j_at(t);
            const GridFunction& vj = tab.generation(j);
            const std::size_t k = vj.index_of(t);
            double value = vj[k];
            Prediction p{0.0, 1, label, {}};
            switch (label) {
                case PredictionLabel::elementary: p = predict_elementary(j, t, tab.m); break;
                case PredictionLabel::exp_correction:
                case PredictionLabel::second_order:
                    if (!tab.gamma0) throw Error(ErrorKind::missing_moment, "gamma0 needs finite E xi^2 and E eta");
                    p = label == PredictionLabel::exp_correction ? predict_exp_correction(j, t, tab.m, *tab.gamma0)
                                                                  : predict_second_order(j, t, tab.m, *tab.gamma0);
                    break;
                case PredictionLabel::key_renewal:
                    value = convolve_dri(tri, vj, t);
                    p = predict_key_renewal_log(j, t, tri_integral, tab.m, vprev(j, t));
                    break;
                case PredictionLabel::blackwell:
                    value = vj[vj.index_of(t + 1.0)] - vj[k];
                    p = predict_blackwell(j, t, 1.0, tab.m, vprev(j, t));
                    break;
                default:
                    throw Error(ErrorKind::validation, "verify.theorems: unsupported label");
            }
            const double vlog = value > 0.0 ? std::log(value) : -INFINITY;
            const double ratio = value > 0.0 && p.sign > 0 ? std::exp(vlog - p.log_value) : NAN;
            os << to_string(label) << ',' << format_double(t) << ',' << j << ',' << format_double(vlog) << ','
               << format_double(p.log_value) << ',' << format_double(ratio) << '\n';
        }
    }
    w.write("ratios.csv", os.str());
    write_dumps(w, c, o, &tab);
}

void run_clt(ArtifactWriter& w, const ExperimentConfig& c, const RunOptions& o, RunReport& rep) {
    const int j = c.generations.jmax;
    const double t = c.simulate.t;
    const MomentReport mr = moments(c.model);
    if (!mr.s2 || !(*mr.s2 > 0.0)) {
        throw Error(ErrorKind::missing_moment, "clt needs a finite positive Var xi");
    }
    if (t > c.grid.T + 1e-9) throw Error(ErrorKind::validation, "grid.T: must cover simulate.t");
    const RenewalTables tab = build_tables(c.model, c.grid.h, horizon_for(t, c.grid.h), j);
    SimConfig sc{c.model, t, j, c.simulate.replicas, c.simulate.master_seed, c.simulate.max_nodes, false, false,
                 o.threads};
    const SimResult r = simulate_ensemble(sc);
    if (r.any_truncated()) rep.warnings.push_back("some replicas hit simulate.max_nodes; statistics are biased");
    const std::vector<double> z = clt_statistic(r, tab, j, t, *mr.s2, mr.m);
    std::ostringstream os;
    os << "statistic\n";
    double mean = 0.0;
    for (double x : z) {
        os << format_double(x) << '\n';
        mean += x;
    }
    mean /= static_cast<double>(z.size());
    double var = 0.0;
    for (double x : z) var += (x - mean) * (x - mean);
    var /= static_cast<double>(z.size() > 1 ? z.size() - 1 : 1);
    w.write("clt.csv", os.str());
    json s = {{"j", j}, {"t", t}, {"replicas", z.size()}, {"mean", mean}, {"variance", var}};
    rep.stdout_text = s.dump() + "\n";
    write_dumps(w, c, o, &tab);
}

}  // namespace

std::string_view to_string(Subcommand cmd) noexcept {
    switch (cmd) {
        case Subcommand::tables: return "tables";
        case Subcommand::simulate: return "simulate";
        case Subcommand::gamma: return "gamma";
        case Subcommand::verify: return "verify";
        case Subcommand::clt: return "clt";
    }
    return "unknown";
}

Subcommand parse_subcommand(std::string_view name) {
    for (auto c : {Subcommand::tables, Subcommand::simulate, Subcommand::gamma, Subcommand::verify, Subcommand::clt}) {
        if (name == to_string(c)) return c;
    }
    throw Error(ErrorKind::validation, "unknown subcommand '" + std::string(name) + "'");
}

std::string error_json(std::string_view kind, std::string_view message) {
    json j;
    j["error"] = {{"kind", std::string(kind)}, {"message", std::string(message)}};
    return j.dump();
}

RunReport run(const ExperimentConfig& config_in, Subcommand cmd, const RunOptions& options) {
    ExperimentConfig config = config_in;
    if (options.out_dir) config.output_dir = *options.out_dir;
    if (options.seed) config.simulate.master_seed = *options.seed;
    validate_config(config);

    RunReport rep;
    rep.out_dir = config.output_dir;
    rep.warnings = config.warnings;
    ArtifactWriter w(config.output_dir);
    const auto start = std::chrono::steady_clock::now();
    try {
        switch (cmd) {
            case Subcommand::tables: run_tables(w, config, options, rep); break;
            case Subcommand::simulate: run_simulate(w, config, options, rep); break;
            case Subcommand::gamma: run_gamma(w, config, options, rep); break;
            case Subcommand::verify: run_verify(w, config, options, rep); break;
            case Subcommand::clt: run_clt(w, config, options, rep); break;
        }
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json m;
        m["subcommand"] = std::string(to_string(cmd));
        m["version"] = PRWLAB_VERSION;
        m["config"] = json::parse(serialize_config(config));
        m["master_seed"] = config.simulate.master_seed;
        m["grid"] = {{"h", config.grid.h}, {"T", config.grid.T}};
        m["files"] = w.files();
        m["warnings"] = rep.warnings;
        m["wall_time_seconds"] = wall;
        w.write("manifest.json", m.dump(2) + "\n");
    } catch (...) {
        w.remove_all();
        throw;
    }
    rep.files = w.files();
    return rep;
}

}  // namespace prwlab
