#include "toplat/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "toplat/rng.hpp"

#ifdef TOPLAT_HAVE_OPENMP
#include <omp.h>
#endif

namespace toplat {
namespace {

Eigen::VectorXcd default_pump(const EnsembleConfig& cfg) {
    if (cfg.pump_input.size() > 0) return cfg.pump_input;
    Eigen::VectorXcd pump = Eigen::VectorXcd::Zero(cfg.lattice.site_count());
    pump((cfg.lattice.site_count() - 1) / 2) = 1.0;
    return pump;
}

Eigen::MatrixXcd propagate_final(const CouplingSequence& seq, const Eigen::VectorXcd& pump,
                                 const EnsembleConfig& cfg) {
    const Eigen::MatrixXd H = build_hamiltonian(seq);
    // One lattice carries pump, signal, and idler alike.
    return propagate_biphoton(H, H, H, pump, cfg.source, cfg.propagation)
        .snapshots.back()
        .psi;
}

LevelStats summarize(double level, const std::vector<RealizationRecord>& recs,
                     std::size_t first, std::size_t count) {
    LevelStats s;
    s.level = level;
    s.min_K = s.min_F = std::numeric_limits<double>::infinity();
    s.max_K = s.max_F = -std::numeric_limits<double>::infinity();
    double sK = 0, sK2 = 0, sF = 0, sF2 = 0;
    for (std::size_t i = first; i < first + count; ++i) {
        const RealizationRecord& r = recs[i];
        if (!r.converged) { ++s.failed; continue; }
        ++s.converged;
        sK += r.K; sK2 += r.K * r.K;
        sF += r.F; sF2 += r.F * r.F;
        s.min_K = std::min(s.min_K, r.K); s.max_K = std::max(s.max_K, r.K);
        s.min_F = std::min(s.min_F, r.F); s.max_F = std::max(s.max_F, r.F);
    }
    if (s.converged > 0) {
        s.mean_K = sK / s.converged;
        s.mean_F = sF / s.converged;
        s.std_K = std::sqrt(std::max(0.0, sK2 / s.converged - s.mean_K * s.mean_K));
        s.std_F = std::sqrt(std::max(0.0, sF2 / s.converged - s.mean_F * s.mean_F));
    } else {
        s.min_K = s.max_K = s.min_F = s.max_F = 0.0;
    }
    return s;
}

EnsembleStats run_impl(const EnsembleConfig& cfg, bool parallel) {
    cfg.validate();
    const CouplingSequence base = build_interface_sequence(cfg.lattice);
    const Eigen::VectorXcd pump = default_pump(cfg);
    const Eigen::MatrixXcd clean = propagate_final(base, pump, cfg);

    EnsembleStats stats;
    stats.clean_K = schmidt_number(clean);

    const int n_levels = static_cast<int>(cfg.levels.size());
    const int total = n_levels * cfg.realizations;
    stats.records.resize(total);

    auto evaluate = [&](int idx) {
        const int li = idx / cfg.realizations;
        const int r = idx % cfg.realizations;
        RealizationRecord rec;
        rec.level_index = li;
        rec.realization = r;
        try {
            DisorderSpec d;
            d.level = cfg.levels[li];
            d.seed = derive_stream_seed(cfg.base_seed, static_cast<std::uint64_t>(li));
            d.realization_index = static_cast<std::uint64_t>(r);
            if (d.level == 0.0) {
                // Identical inputs and integrator: the reference itself.
                rec.K = stats.clean_K;
                rec.F = 1.0;
            } else {
                const Eigen::MatrixXcd psi =
                    propagate_final(disordered_sequence(base, d), pump, cfg);
                rec.K = schmidt_number(psi);
                rec.F = fidelity(psi, clean);
            }
        } catch (const std::exception&) {
            rec.converged = false;
        }
        stats.records[idx] = rec;
    };

    if (parallel) {
#ifdef TOPLAT_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(thread_cap())
#endif
        for (int idx = 0; idx < total; ++idx) evaluate(idx);
    } else {
        for (int idx = 0; idx < total; ++idx) evaluate(idx);
    }

    for (int li = 0; li < n_levels; ++li)
        stats.levels.push_back(summarize(cfg.levels[li], stats.records,
                                         static_cast<std::size_t>(li) * cfg.realizations,
                                         cfg.realizations));
    return stats;
}

}  // namespace

void EnsembleConfig::validate() const {
    lattice.validate();
    if (realizations < 1) throw std::invalid_argument("EnsembleConfig: realizations >= 1");
    if (levels.empty()) throw std::invalid_argument("EnsembleConfig: at least one disorder level");
    for (double d : levels)
        if (d < 0.0) throw std::invalid_argument("EnsembleConfig: disorder levels >= 0");
    propagation.validate();
    source.validate();
    if (pump_input.size() > 0 && pump_input.size() != lattice.site_count())
        throw std::invalid_argument("EnsembleConfig: pump size mismatch");
}

int thread_cap() {
    int cap = 1;
#ifdef TOPLAT_HAVE_OPENMP
    cap = omp_get_max_threads();
#endif
    if (const char* env = std::getenv("TOPOLATTICE_THREADS")) {
        const int requested = std::atoi(env);
        if (requested >= 1) cap = std::min(cap, requested);
    }
    return cap;
}

EnsembleStats run_disorder_ensemble(const EnsembleConfig& cfg) {
    return run_impl(cfg, true);
}

EnsembleStats run_disorder_ensemble_serial(const EnsembleConfig& cfg) {
    return run_impl(cfg, false);
}

DesignComparison compare_designs(const EnsembleConfig& cfg_a, const EnsembleConfig& cfg_b) {
    if (cfg_a.levels != cfg_b.levels || cfg_a.realizations != cfg_b.realizations ||
        cfg_a.base_seed != cfg_b.base_seed)
        throw std::invalid_argument(
            "compare_designs: configs must share levels, realizations, and seed");
    DesignComparison cmp;
    cmp.a = run_disorder_ensemble(cfg_a);
    cmp.b = run_disorder_ensemble(cfg_b);
    const int n_levels = static_cast<int>(cfg_a.levels.size());
    cmp.mean_dK.assign(n_levels, 0.0);
    cmp.mean_dF.assign(n_levels, 0.0);
    std::vector<int> counts(n_levels, 0);
    for (std::size_t i = 0; i < cmp.a.records.size(); ++i) {
        const RealizationRecord& ra = cmp.a.records[i];
        const RealizationRecord& rb = cmp.b.records[i];
        if (!ra.converged || !rb.converged) continue;
        PairedDelta d;
        d.level_index = ra.level_index;
        d.realization = ra.realization;
        d.dK = rb.K - ra.K;
        d.dF = rb.F - ra.F;
        cmp.deltas.push_back(d);
        cmp.mean_dK[d.level_index] += d.dK;
        cmp.mean_dF[d.level_index] += d.dF;
        ++counts[d.level_index];
    }
    for (int li = 0; li < n_levels; ++li)
        if (counts[li] > 0) {
            cmp.mean_dK[li] /= counts[li];
            cmp.mean_dF[li] /= counts[li];
        }
    return cmp;
}

}  // namespace toplat
