#pragma once
#include <cstdint>
#include <vector>

#include "toplat/analysis.hpp"
#include "toplat/dynamics.hpp"
#include "toplat/lattice.hpp"

// Monte-Carlo disorder studies: sweep the disorder level D, propagate
// ensembles, aggregate Schmidt-number and fidelity statistics, and compare
// designs with paired disorder realizations.
//
// Realizations use per-(level, realization) RNG streams derived from the
// base seed with the splitmix64 mixer, so results are independent of
// execution order and parallel scheduling. The OpenMP path and the serial
// reference produce identical records.

namespace toplat {

struct EnsembleConfig {
    InterfaceLatticeSpec lattice;
    std::vector<double> levels;      // disorder levels D (>= 0)
    int realizations = 1;            // per level
    std::uint64_t base_seed = 0;
    PropagationConfig propagation;
    NonlinearSource source;
    Eigen::VectorXcd pump_input;     // empty: 1.0 into the center waveguide

    void validate() const;
};

struct RealizationRecord {
    int level_index = 0;
    int realization = 0;
    double K = 0.0;
    double F = 0.0;
    bool converged = true;
};

struct LevelStats {
    double level = 0.0;
    int converged = 0;  // realizations included in the statistics
    int failed = 0;
    double mean_K = 0.0, std_K = 0.0, min_K = 0.0, max_K = 0.0;
    double mean_F = 0.0, std_F = 0.0, min_F = 0.0, max_F = 0.0;
};

struct EnsembleStats {
    double clean_K = 0.0;                    // Schmidt number of the D=0 reference
    std::vector<LevelStats> levels;
    std::vector<RealizationRecord> records;  // level-major, realization order
};

// Worker-thread cap: min(TOPOLATTICE_THREADS if set, OpenMP default).
int thread_cap();

EnsembleStats run_disorder_ensemble(const EnsembleConfig& cfg);
EnsembleStats run_disorder_ensemble_serial(const EnsembleConfig& cfg);

struct PairedDelta {
    int level_index = 0;
    int realization = 0;
    double dK = 0.0;  // K_b - K_a
    double dF = 0.0;  // F_b - F_a
};

struct DesignComparison {
    EnsembleStats a;
    EnsembleStats b;
    std::vector<PairedDelta> deltas;            // per paired realization
    std::vector<double> mean_dK, mean_dF;       // per level
};

// Paired comparison: both configs must share disorder levels, realization
// count, and base seed, so the same delta streams drive both designs.
DesignComparison compare_designs(const EnsembleConfig& cfg_a, const EnsembleConfig& cfg_b);

}  // namespace toplat
