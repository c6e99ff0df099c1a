#include "toplat/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace toplat {
namespace {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void require(bool cond, const std::string& message) {
    if (!cond) throw std::runtime_error("config: " + message);
}

}  // namespace

Eigen::VectorXcd RunConfig::pump_vector() const {
    const int N = lattice.site_count();
    const int idx = pump.site + (N - 1) / 2;
    if (idx < 0 || idx >= N)
        throw std::runtime_error("config: pump site outside lattice");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(N);
    v(idx) = pump.amplitude;
    return v;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config: invalid JSON in " + path + ": " + e.what());
    }
    require(j.contains("schema_version"), "missing schema_version");
    require(j["schema_version"].get<int>() == kSchemaVersion,
            "unsupported schema_version " + j["schema_version"].dump() +
                " (expected " + std::to_string(kSchemaVersion) + ")");

    RunConfig cfg;
    require(j.contains("lattice"), "missing lattice section");
    const json& lat = j["lattice"];
    UnitCellSpec cell;
    cell.J = lat.at("J").get<int>();
    cell.lattice_constant = lat.value("lattice_constant", 1.0);
    if (lat.contains("gaps_nm")) {
        PhysicalGeometry geom;
        geom.gaps_nm = lat["gaps_nm"].get<std::vector<double>>();
        require(static_cast<int>(geom.gaps_nm.size()) == cell.J,
                "gaps_nm must list J gaps (J-1 intracell then intercell)");
        geom.width_nm = lat.value("width_nm", 500.0);
        geom.height_nm = lat.value("height_nm", 220.0);
        geom.wavelength_nm = lat.value("wavelength_nm", 1550.0);
        CouplingMap map;
        if (lat.contains("coupling_map")) {
            map.kappa0 = lat["coupling_map"].value("kappa0_per_m", map.kappa0);
            map.g0_nm = lat["coupling_map"].value("g0_nm", map.g0_nm);
        }
        cell = couplings_from_gaps(geom, map, cell.lattice_constant);
        cell.J = static_cast<int>(geom.gaps_nm.size());
        cfg.geometry = geom;
    } else if (lat.contains("couplings")) {
        cell.intracell = lat["couplings"].at("intracell").get<std::vector<double>>();
        cell.intercell = lat["couplings"].at("intercell").get<double>();
    } else {
        require(false, "lattice needs either gaps_nm or couplings");
    }
    cfg.lattice.cell = cell;
    cfg.lattice.half_cells = lat.value("half_cells", 1);
    cfg.lattice.interface_offset = lat.value("interface_offset", 0);
    cfg.lattice.validate();

    if (j.contains("source")) {
        const json& s = j["source"];
        cfg.source.gamma = s.value("gamma", 0.0);
        cfg.source.psi0 = s.value("psi0", 1.0);
        cfg.source.n2 = s.value("n2", 0.0);
        cfg.source.A_eff = s.value("A_eff", 0.0);
        cfg.source.lambda0 = s.value("lambda0", 0.0);
        if (cfg.source.gamma == 0.0 && cfg.source.n2 > 0.0)
            cfg.source.gamma =
                nonlinear_gamma(cfg.source.n2, cfg.source.A_eff, cfg.source.lambda0);
    }
    if (j.contains("propagation")) {
        const json& p = j["propagation"];
        cfg.propagation.length = p.value("length_m", 0.0);
        cfg.propagation.snapshots = p.value("snapshots", 33);
        cfg.propagation.local_tol = p.value("local_tol", 1e-8);
        cfg.propagation.global_tol = p.value("global_tol", 1e-6);
        cfg.propagation.cn_steps = p.value("cn_steps", 0);
    }
    if (j.contains("pump")) {
        const json& p = j["pump"];
        cfg.pump.site = p.value("site", 0);
        cfg.pump.amplitude = p.value("amplitude", 1.0);
        cfg.pump.frozen = p.value("frozen", false);
        cfg.propagation.frozen_pump = cfg.pump.frozen;
    }
    if (j.contains("ensemble")) {
        const json& e = j["ensemble"];
        cfg.ensemble.levels = e.value("levels", std::vector<double>{0.0});
        cfg.ensemble.realizations = e.value("realizations", 1);
        cfg.ensemble.base_seed = e.value("base_seed", std::uint64_t{0});
    }
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        cfg.sweep.J = s.value("J", cell.J);
        cfg.sweep.t_min = s.value("t_min", 0.02);
        cfg.sweep.t_max = s.value("t_max", 1.0);
        cfg.sweep.tau_min = s.value("tau_min", 0.02);
        cfg.sweep.tau_max = s.value("tau_max", 1.0);
        cfg.sweep.resolution = s.value("resolution", 50);
    } else {
        cfg.sweep.J = cell.J;
    }
    cfg.band_samples = j.value("band_samples", 512);
    cfg.analysis_window = j.value("analysis_window", 3);
    cfg.comment = j.value("comment", std::string());
    return cfg;
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t hash = 0xCBF29CE484222325ull;
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 0x100000001B3ull;
    }
    return hash;
}

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("hash_file: cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string bytes = buffer.str();
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
    return out;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
    json j;
    j["tool_version"] = manifest.tool_version;
    j["schema_version"] = manifest.schema_version;
    j["command"] = manifest.command;
    j["config"] = manifest.config_path;
    j["config_hash"] = manifest.config_hash;
    j["seed"] = manifest.seed;
    j["wall_seconds"] = manifest.wall_seconds;
    j["integrator_stats"] = manifest.integrator_stats;
    j["outputs"] = json::array();
    for (const auto& [file, hash] : manifest.outputs)
        j["outputs"].push_back({{"path", file}, {"hash", hash}});
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_manifest: cannot write " + path);
    out << j.dump(2) << "\n";
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot write " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "");
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << format_double(row[i]) << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
}

void write_svg_heatmap(const std::string& path, const Eigen::MatrixXd& values,
                       const std::string& title) {
    const int rows = static_cast<int>(values.rows());
    const int cols = static_cast<int>(values.cols());
    if (rows == 0 || cols == 0)
        throw std::runtime_error("write_svg_heatmap: empty matrix");
    const double lo = values.minCoeff(), hi = values.maxCoeff();
    const double span = hi > lo ? hi - lo : 1.0;
    const int cell = std::max(4, 512 / std::max(rows, cols));
    const int w = cols * cell, h = rows * cell;

    // Compact perceptual ramp (dark blue -> teal -> yellow).
    auto color = [](double x) {
        const double stops[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140},
                                    {94, 201, 98}, {253, 231, 37}};
        x = std::clamp(x, 0.0, 1.0) * 4.0;
        const int i = std::min(3, static_cast<int>(x));
        const double f = x - i;
        char buf[8];
        std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                      static_cast<int>(stops[i][0] + f * (stops[i + 1][0] - stops[i][0])),
                      static_cast<int>(stops[i][1] + f * (stops[i + 1][1] - stops[i][1])),
                      static_cast<int>(stops[i][2] + f * (stops[i + 1][2] - stops[i][2])));
        return std::string(buf);
    };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_svg_heatmap: cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\""
        << h + 24 << "\">\n";
    out << "<text x=\"4\" y=\"16\" font-family=\"sans-serif\" font-size=\"13\">" << title
        << "</text>\n";
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            out << "<rect x=\"" << c * cell << "\" y=\"" << 24 + (rows - 1 - r) * cell
                << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
                << color((values(r, c) - lo) / span) << "\"/>\n";
    out << "</svg>\n";
}

void write_ensemble_csv(const std::string& path, const EnsembleStats& stats,
                        const std::vector<double>& levels) {
    std::vector<std::vector<double>> rows;
    rows.reserve(stats.records.size());
    for (const auto& r : stats.records)
        rows.push_back({levels[r.level_index], static_cast<double>(r.realization), r.K,
                        r.F, r.converged ? 1.0 : 0.0});
    write_csv(path, {"level", "realization", "K", "F", "converged"}, rows);
}

void write_ensemble_json(const std::string& path, const EnsembleStats& stats) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["clean_K"] = stats.clean_K;
    j["levels"] = json::array();
    for (const auto& l : stats.levels)
        j["levels"].push_back({{"level", l.level},
                               {"converged", l.converged},
                               {"failed", l.failed},
                               {"mean_K", l.mean_K},
                               {"std_K", l.std_K},
                               {"min_K", l.min_K},
                               {"max_K", l.max_K},
                               {"mean_F", l.mean_F},
                               {"std_F", l.std_F},
                               {"min_F", l.min_F},
                               {"max_F", l.max_F}});
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_ensemble_json: cannot write " + path);
    out << j.dump(2) << "\n";
}

}  // namespace toplat
