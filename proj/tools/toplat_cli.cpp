// Command-line front end: parse a JSON config, orchestrate the simulation
// modules, and emit CSV/JSON data files plus SVG heatmaps.
//
// Exit codes: 0 success, 1 validation/usage error, 2 numerical failure.

#include <chrono>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "toplat/analysis.hpp"
#include "toplat/dynamics.hpp"
#include "toplat/ensemble.hpp"
#include "toplat/io.hpp"
#include "toplat/lattice.hpp"
#include "toplat/spectral.hpp"
#include "toplat/topology.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace toplat;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string format = "csv";
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config_path, "JSON configuration file")->required();
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--seed", opt.seed, "base seed override")
        ->each([&](const std::string&) { opt.seed_given = true; });
    cmd->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    cmd->add_flag("--quiet", opt.quiet, "suppress progress output");
}

struct RunContext {
    CommonOptions opt;
    RunConfig cfg;
    RunManifest manifest;
    std::chrono::steady_clock::time_point start;

    explicit RunContext(const CommonOptions& o, const std::string& command) : opt(o) {
        cfg = load_config(o.config_path);
        if (o.seed_given) cfg.ensemble.base_seed = o.seed;
        fs::create_directories(o.out_dir);
        manifest.command = command;
        manifest.config_path = o.config_path;
        manifest.config_hash = hash_file(o.config_path);
        manifest.seed = cfg.ensemble.base_seed;
        start = std::chrono::steady_clock::now();
    }

    std::string path(const std::string& name) const {
        return (fs::path(opt.out_dir) / name).string();
    }

    void note(const std::string& message) const {
        if (!opt.quiet) std::cout << message << "\n";
    }

    void finish() {
        manifest.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const std::string mpath = path("manifest.json");
        write_manifest(manifest, mpath);
        note("wrote " + mpath);
    }
};

void write_json_file(RunContext& ctx, const std::string& name, const json& j) {
    const std::string p = ctx.path(name);
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p);
    out << j.dump(2) << "\n";
    ctx.manifest.add_output(p);
    ctx.note("wrote " + p);
}

void write_csv_file(RunContext& ctx, const std::string& name,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows) {
    const std::string p = ctx.path(name);
    write_csv(p, header, rows);
    ctx.manifest.add_output(p);
    ctx.note("wrote " + p);
}

void write_svg_file(RunContext& ctx, const std::string& name, const Eigen::MatrixXd& m,
                    const std::string& title) {
    const std::string p = ctx.path(name);
    write_svg_heatmap(p, m, title);
    ctx.manifest.add_output(p);
    ctx.note("wrote " + p);
}

json gap_report_json(const GapReport& rep) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["J"] = rep.J;
    j["conditional_closures"] = rep.conditional;
    j["gaps"] = json::array();
    for (const auto& g : rep.gaps)
        j["gaps"].push_back({{"numeric", g.numeric},
                             {"closed_form", g.has_closed_form ? json(g.closed_form) : json()},
                             {"closed", g.closed}});
    j["critical_couplings"] = json::array();
    for (const auto& c : rep.critical)
        j["critical_couplings"].push_back({{"label", c.label}, {"tau", c.tau}});
    j["decay_lengths"] = json::array();
    for (const auto& d : rep.decay)
        j["decay_lengths"].push_back(
            {{"label", d.label}, {"xi", d.infinite ? json() : json(d.xi)},
             {"infinite", d.infinite}});
    return j;
}

int cmd_bands(RunContext& ctx) {
    const UnitCellSpec& cell = ctx.cfg.lattice.cell;
    const BandStructure bs = band_structure(cell, ctx.cfg.band_samples);
    std::vector<std::string> header{"k"};
    for (int b = 1; b <= cell.J; ++b) header.push_back("band_" + std::to_string(b));
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < bs.k_grid.size(); ++i) {
        std::vector<double> row{bs.k_grid[i]};
        for (int b = 0; b < cell.J; ++b) row.push_back(bs.bands(i, b));
        rows.push_back(row);
    }
    write_csv_file(ctx, "bands.csv", header, rows);
    write_json_file(ctx, "gap_report.json", gap_report_json(closed_form_report(cell)));
    if (ctx.opt.format == "svg")
        write_svg_file(ctx, "bands.svg", bs.bands.transpose(), "band structure");
    return 0;
}

int cmd_topology(RunContext& ctx) {
    const UnitCellSpec& cell = ctx.cfg.lattice.cell;
    json inv;
    inv["schema_version"] = kSchemaVersion;
    bool at_transition = false;
    inv["nu_total"] = winding_circle(cell, &at_transition);
    inv["at_transition"] = at_transition;
    inv["nu_integral"] = winding_integral(cell);
    inv["zak"] = zak_trim(cell);
    inv["band_winding"] = band_winding_wilson(cell);
    write_json_file(ctx, "invariants.json", inv);

    const SweepSection& sw = ctx.cfg.sweep;
    const PhaseDiagram pd = phase_diagram(sw.J, sw.t_min, sw.t_max, sw.tau_min,
                                          sw.tau_max, sw.resolution);
    std::vector<std::string> header{"t", "tau", "nu_total", "at_transition"};
    for (int b = 1; b <= sw.J; ++b) header.push_back("nu_band_" + std::to_string(b));
    std::vector<std::vector<double>> rows;
    Eigen::MatrixXd grid(sw.resolution, sw.resolution);
    for (int i = 0; i < sw.resolution; ++i)
        for (int k = 0; k < sw.resolution; ++k) {
            const int idx = i * sw.resolution + k;
            std::vector<double> row{pd.t_values[i], pd.tau_values[k],
                                    static_cast<double>(pd.nu_total[idx]),
                                    pd.at_transition[idx] ? 1.0 : 0.0};
            for (int b = 0; b < sw.J; ++b)
                row.push_back(pd.band_winding[idx].empty()
                                  ? 0.0
                                  : static_cast<double>(pd.band_winding[idx][b]));
            rows.push_back(row);
            grid(i, k) = pd.nu_total[idx];
        }
    write_csv_file(ctx, "phase_diagram.csv", header, rows);
    if (ctx.opt.format == "svg")
        write_svg_file(ctx, "phase_diagram.svg", grid, "total winding");
    return 0;
}

// Shared propagation used by propagate/analyze/report.
struct PropagationResult {
    Eigen::MatrixXd H;
    EigenSystem sys;
    PumpTrajectory pump;
    BiphotonTrajectory biphoton;
};

PropagationResult run_propagation(RunContext& ctx) {
    PropagationResult res;
    const CouplingSequence seq = build_interface_sequence(ctx.cfg.lattice);
    res.H = build_hamiltonian(seq);
    res.sys = eigensystem(res.H, ctx.cfg.lattice.cell);
    const Eigen::VectorXcd pump_in = ctx.cfg.pump_vector();
    res.pump = propagate_pump(res.H, pump_in, ctx.cfg.propagation);
    res.biphoton = propagate_biphoton(res.H, res.H, res.H, pump_in, ctx.cfg.source,
                                      ctx.cfg.propagation);
    ctx.manifest.integrator_stats =
        "split_step_panels_per_interval=" + std::to_string(res.biphoton.quadrature_panels) +
        " certificate=" + std::to_string(res.biphoton.certificate);
    return res;
}

int cmd_propagate(RunContext& ctx) {
    const PropagationResult res = run_propagation(ctx);
    const int N = ctx.cfg.lattice.site_count();
    const int center = (N - 1) / 2;

    std::vector<std::string> pump_header{"z"};
    for (int n = 0; n < N; ++n)
        pump_header.push_back("P_" + std::to_string(n - center));
    std::vector<std::vector<double>> pump_rows;
    for (const auto& snap : res.pump.snapshots) {
        std::vector<double> row{snap.z};
        for (int n = 0; n < N; ++n) row.push_back(std::norm(snap.amplitudes(n)));
        pump_rows.push_back(row);
    }
    write_csv_file(ctx, "pump.csv", pump_header, pump_rows);

    std::vector<std::string> bi_header{"z", "site_s", "site_i", "intensity"};
    std::vector<std::vector<double>> bi_rows;
    for (const auto& snap : res.biphoton.snapshots)
        for (int m = 0; m < N; ++m)
            for (int n = 0; n < N; ++n)
                bi_rows.push_back({snap.z, static_cast<double>(m - center),
                                   static_cast<double>(n - center),
                                   std::norm(snap.psi(m, n))});
    write_csv_file(ctx, "biphoton.csv", bi_header, bi_rows);

    json meta;
    meta["schema_version"] = kSchemaVersion;
    meta["sites"] = N;
    meta["snapshots"] = json::array();
    for (const auto& snap : res.biphoton.snapshots) meta["snapshots"].push_back(snap.z);
    meta["quadrature_panels"] = res.biphoton.quadrature_panels;
    meta["certificate"] = res.biphoton.certificate;
    write_json_file(ctx, "trajectory.json", meta);
    if (ctx.opt.format == "svg") {
        const BiphotonState& out = res.biphoton.snapshots.back();
        write_svg_file(ctx, "correlation.svg",
                       correlation_map(out, -ctx.cfg.analysis_window,
                                       ctx.cfg.analysis_window, true)
                           .intensities,
                       "output correlation map");
    }
    return 0;
}

int cmd_analyze(RunContext& ctx) {
    const PropagationResult res = run_propagation(ctx);
    const BiphotonState& out = res.biphoton.snapshots.back();
    const int w = ctx.cfg.analysis_window;

    const CorrelationMap map = correlation_map(out, -w, w, false);
    std::vector<std::vector<double>> rows;
    for (int m = 0; m < map.intensities.rows(); ++m)
        for (int n = 0; n < map.intensities.cols(); ++n)
            rows.push_back({static_cast<double>(m + map.first_site),
                            static_cast<double>(n + map.first_site),
                            map.intensities(m, n)});
    write_csv_file(ctx, "correlation_map.csv", {"site_s", "site_i", "intensity"}, rows);

    const ModePopulationMatrix pops = mode_populations(out, res.sys, res.sys, {}, true);
    json metrics;
    metrics["schema_version"] = kSchemaVersion;
    metrics["K"] = schmidt_number(out.psi);
    // Mirror-symmetry check of the facet output power.
    const int N = ctx.cfg.lattice.site_count();
    Eigen::MatrixXd power(1, N);
    for (int n = 0; n < N; ++n) power(0, n) = out.psi.row(n).squaredNorm();
    metrics["mirror_similarity"] =
        intensity_similarity(power, power.rowwise().reverse());
    metrics["mode_populations"] = json::object();
    metrics["mode_populations"]["labels"] = pops.labels;
    metrics["mode_populations"]["indices"] = pops.mode_indices;
    json B = json::array();
    for (int a = 0; a < pops.populations.rows(); ++a) {
        json row = json::array();
        for (int b = 0; b < pops.populations.cols(); ++b) row.push_back(pops.populations(a, b));
        B.push_back(row);
    }
    metrics["mode_populations"]["B"] = B;

    std::vector<std::pair<int, int>> pairs;
    for (int a : pops.mode_indices)
        for (int b : pops.mode_indices) pairs.emplace_back(a, b);
    json mismatch = json::array();
    for (const auto& p : mismatch_predictions(res.sys, res.sys, pairs))
        mismatch.push_back({{"m", p.m},
                            {"n", p.n},
                            {"dbeta", p.dbeta},
                            {"L_zero", p.matched ? json() : json(p.L_zero)},
                            {"L_max", p.matched ? json() : json(p.L_max)},
                            {"matched", p.matched}});
    metrics["mismatch"] = mismatch;

    json parity = json::array();
    const Eigen::VectorXcd a2 =
        PumpEvolution(res.H, ctx.cfg.pump_vector(), true).squared_amplitudes(0.0);
    for (int a : pops.mode_indices)
        for (int b : pops.mode_indices) {
            try {
                const std::complex<double> eta = parity_coupling(
                    res.sys.vectors.col(a), res.sys.vectors.col(b), a2);
                parity.push_back({{"m", a},
                                  {"n", b},
                                  {"parity_m", res.sys.mode_tags[a].parity},
                                  {"parity_n", res.sys.mode_tags[b].parity},
                                  {"eta_abs", std::abs(eta)}});
            } catch (const std::invalid_argument&) {
                parity.push_back({{"m", a}, {"n", b}, {"eta_abs", json()}});
            }
        }
    metrics["parity_couplings"] = parity;
    write_json_file(ctx, "metrics.json", metrics);
    if (ctx.opt.format == "svg")
        write_svg_file(ctx, "correlation.svg",
                       correlation_map(out, -w, w, true).intensities,
                       "output correlation map");
    return 0;
}

int cmd_ensemble(RunContext& ctx) {
    EnsembleConfig ecfg;
    ecfg.lattice = ctx.cfg.lattice;
    ecfg.levels = ctx.cfg.ensemble.levels;
    ecfg.realizations = ctx.cfg.ensemble.realizations;
    ecfg.base_seed = ctx.cfg.ensemble.base_seed;
    ecfg.propagation = ctx.cfg.propagation;
    ecfg.source = ctx.cfg.source;
    ecfg.pump_input = ctx.cfg.pump_vector();
    const EnsembleStats stats = run_disorder_ensemble(ecfg);

    const std::string csv = ctx.path("ensemble.csv");
    write_ensemble_csv(csv, stats, ecfg.levels);
    ctx.manifest.add_output(csv);
    ctx.note("wrote " + csv);
    const std::string js = ctx.path("ensemble_summary.json");
    write_ensemble_json(js, stats);
    ctx.manifest.add_output(js);
    ctx.note("wrote " + js);
    return 0;
}

int cmd_report(RunContext& ctx) {
    ctx.opt.format = "svg";
    cmd_bands(ctx);
    cmd_analyze(ctx);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D topological photonic superlattice simulator"};
    app.require_subcommand(1);

    CommonOptions opt;
    struct Sub {
        const char* name;
        const char* help;
        int (*run)(RunContext&);
    };
    const Sub subs[] = {
        {"bands", "band structure and gap report", cmd_bands},
        {"topology", "invariants and phase diagrams", cmd_topology},
        {"propagate", "pump and biphoton trajectories", cmd_propagate},
        {"analyze", "correlation maps, populations, entanglement metrics", cmd_analyze},
        {"ensemble", "disorder ensemble statistics", cmd_ensemble},
        {"report", "bundled outputs with SVG heatmaps", cmd_report},
    };
    for (const Sub& s : subs) add_common(app.add_subcommand(s.name, s.help), opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    for (const Sub& s : subs) {
        if (!app.get_subcommand(s.name)->parsed()) continue;
        try {
            RunContext ctx(opt, s.name);
            const int rc = s.run(ctx);
            ctx.finish();
            return rc;
        } catch (const std::invalid_argument& e) {
            std::cerr << "validation error: " << e.what() << "\n";
            return 1;
        } catch (const std::runtime_error& e) {
            const std::string what = e.what();
            if (what.rfind("config", 0) == 0 || what.find("cannot open") != std::string::npos ||
                what.find("cannot write") != std::string::npos) {
                std::cerr << "validation error: " << what << "\n";
                return 1;
            }
            std::cerr << "numerical failure: " << what << "\n";
            return 2;
        }
    }
    return 1;
}
