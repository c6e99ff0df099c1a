#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toplat/dynamics.hpp"
#include "toplat/ensemble.hpp"
#include "toplat/lattice.hpp"

// Config files, result writers, content hashing, and run manifests.
// File formats are documented in docs/formats.md.

namespace toplat {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

struct PumpSpec {
    int site = 0;          // centered site index
    double amplitude = 1.0;
    bool frozen = false;   // constant undepleted pump
};

struct EnsembleSection {
    std::vector<double> levels{0.0};
    int realizations = 1;
    std::uint64_t base_seed = 0;
};

struct SweepSection {
    int J = 3;
    double t_min = 0.02, t_max = 1.0;
    double tau_min = 0.02, tau_max = 1.0;
    int resolution = 50;
};

// Parsed configuration (schema_version 1). The lattice is specified either
// by physical gaps plus a coupling map, or by couplings directly.
struct RunConfig {
    InterfaceLatticeSpec lattice;
    std::optional<PhysicalGeometry> geometry;  // present when gaps were given
    NonlinearSource source;
    PropagationConfig propagation;
    PumpSpec pump;
    EnsembleSection ensemble;
    SweepSection sweep;
    int band_samples = 512;
    int analysis_window = 3;      // correlation window half-width (sites)
    std::string comment;

    Eigen::VectorXcd pump_vector() const;
};

RunConfig load_config(const std::string& path);

// FNV-1a 64-bit hash, reported as 16 hex digits.
std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string hash_file(const std::string& path);

struct RunManifest {
    std::string tool_version = kToolVersion;
    int schema_version = kSchemaVersion;
    std::string command;
    std::string config_path;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> outputs;  // (path, hash)
    double wall_seconds = 0.0;
    std::string integrator_stats;

    void add_output(const std::string& path) { outputs.emplace_back(path, hash_file(path)); }
};

void write_manifest(const RunManifest& manifest, const std::string& path);

// Generic CSV writer: header line then rows of numeric cells, full
// double-precision round-trip formatting.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Minimal SVG heatmap (rectangles + perceptual colormap); data CSVs are the
// authoritative output.
void write_svg_heatmap(const std::string& path, const Eigen::MatrixXd& values,
                       const std::string& title);

// Ensemble results: CSV (level, realization, K, F, converged) + JSON summary.
void write_ensemble_csv(const std::string& path, const EnsembleStats& stats,
                        const std::vector<double>& levels);
void write_ensemble_json(const std::string& path, const EnsembleStats& stats);

}  // namespace toplat
