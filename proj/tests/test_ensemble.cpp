#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "toplat/ensemble.hpp"

using namespace toplat;

namespace {

EnsembleConfig small_config() {
    EnsembleConfig cfg;
    cfg.lattice.cell.J = 4;
    cfg.lattice.cell.intracell = {4.0e4, 2.0e4, 4.0e4};
    cfg.lattice.cell.intercell = 9.0e4;
    cfg.lattice.half_cells = 5;
    cfg.levels = {0.0, 0.05, 0.10};
    cfg.realizations = 6;
    cfg.base_seed = 42;
    cfg.propagation.length = 5e-4;
    cfg.propagation.snapshots = 2;
    cfg.source.gamma = 120.0;
    return cfg;
}

}  // namespace

TEST_CASE("clean level has F = 1 and zero spread") {
    const EnsembleConfig cfg = small_config();
    const EnsembleStats stats = run_disorder_ensemble(cfg);
    REQUIRE(stats.levels.size() == 3);
    const LevelStats& clean = stats.levels[0];
    CHECK(clean.level == 0.0);
    CHECK(clean.converged == cfg.realizations);
    CHECK(clean.failed == 0);
    CHECK(clean.mean_F == 1.0);
    CHECK(clean.std_F == 0.0);
    CHECK(clean.mean_K == stats.clean_K);
    CHECK(clean.std_K == 0.0);
    CHECK(stats.clean_K > 1.0);
}

TEST_CASE("records are deterministic across repeated runs") {
    const EnsembleConfig cfg = small_config();
    const EnsembleStats a = run_disorder_ensemble(cfg);
    const EnsembleStats b = run_disorder_ensemble(cfg);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].K == b.records[i].K);
        CHECK(a.records[i].F == b.records[i].F);
        CHECK(a.records[i].converged == b.records[i].converged);
    }
    CHECK(a.clean_K == b.clean_K);
}

TEST_CASE("parallel and serial ensembles are bitwise identical") {
    const EnsembleConfig cfg = small_config();
    const EnsembleStats par = run_disorder_ensemble(cfg);
    const EnsembleStats ser = run_disorder_ensemble_serial(cfg);
    REQUIRE(par.records.size() == ser.records.size());
    for (std::size_t i = 0; i < par.records.size(); ++i) {
        CHECK(par.records[i].level_index == ser.records[i].level_index);
        CHECK(par.records[i].realization == ser.records[i].realization);
        CHECK(par.records[i].K == ser.records[i].K);
        CHECK(par.records[i].F == ser.records[i].F);
    }
}

TEST_CASE("changing the base seed changes disordered records only") {
    EnsembleConfig cfg = small_config();
    const EnsembleStats a = run_disorder_ensemble(cfg);
    cfg.base_seed = 43;
    const EnsembleStats b = run_disorder_ensemble(cfg);
    CHECK(a.clean_K == b.clean_K);  // clean reference is seed independent
    bool any_different = false;
    for (std::size_t i = 0; i < a.records.size(); ++i)
        if (a.records[i].level_index > 0 && a.records[i].K != b.records[i].K)
            any_different = true;
    CHECK(any_different);
}

TEST_CASE("disorder degrades fidelity on average") {
    const EnsembleStats stats = run_disorder_ensemble(small_config());
    CHECK(stats.levels[2].mean_F < stats.levels[0].mean_F);
    CHECK(stats.levels[2].mean_F < 1.0);
    CHECK(stats.levels[2].std_F > 0.0);
    CHECK(stats.levels[2].min_F <= stats.levels[2].mean_F);
    CHECK(stats.levels[2].max_F >= stats.levels[2].mean_F);
}

TEST_CASE("records are level-major and realization ordered") {
    const EnsembleConfig cfg = small_config();
    const EnsembleStats stats = run_disorder_ensemble(cfg);
    REQUIRE(stats.records.size() ==
            cfg.levels.size() * static_cast<std::size_t>(cfg.realizations));
    for (std::size_t i = 0; i < stats.records.size(); ++i) {
        CHECK(stats.records[i].level_index == static_cast<int>(i) / cfg.realizations);
        CHECK(stats.records[i].realization == static_cast<int>(i) % cfg.realizations);
    }
}

TEST_CASE("paired design comparison: identical designs give zero deltas") {
    const EnsembleConfig cfg = small_config();
    const DesignComparison cmp = compare_designs(cfg, cfg);
    REQUIRE(cmp.deltas.size() == cfg.levels.size() * static_cast<std::size_t>(cfg.realizations));
    for (const PairedDelta& d : cmp.deltas) {
        CHECK(d.dK == 0.0);
        CHECK(d.dF == 0.0);
    }
    for (double m : cmp.mean_dK) CHECK(m == 0.0);
}

TEST_CASE("paired design comparison: swapping designs negates the deltas") {
    EnsembleConfig a = small_config();
    EnsembleConfig b = a;
    b.lattice.cell.intracell = {4.5e4, 2.5e4, 4.5e4};
    const DesignComparison ab = compare_designs(a, b);
    const DesignComparison ba = compare_designs(b, a);
    REQUIRE(ab.deltas.size() == ba.deltas.size());
    for (std::size_t i = 0; i < ab.deltas.size(); ++i) {
        CHECK(ab.deltas[i].dK == -ba.deltas[i].dK);
        CHECK(ab.deltas[i].dF == -ba.deltas[i].dF);
    }
}

TEST_CASE("paired design comparison rejects mismatched protocols") {
    EnsembleConfig a = small_config();
    EnsembleConfig b = a;
    b.base_seed = 7;
    CHECK_THROWS_AS(compare_designs(a, b), std::invalid_argument);
    b = a;
    b.realizations = 3;
    CHECK_THROWS_AS(compare_designs(a, b), std::invalid_argument);
    b = a;
    b.levels = {0.0, 0.05};
    CHECK_THROWS_AS(compare_designs(a, b), std::invalid_argument);
}

TEST_CASE("thread cap respects the TOPOLATTICE_THREADS environment variable") {
    setenv("TOPOLATTICE_THREADS", "1", 1);
    CHECK(thread_cap() == 1);
    unsetenv("TOPOLATTICE_THREADS");
    CHECK(thread_cap() >= 1);
}

TEST_CASE("configuration validation") {
    EnsembleConfig cfg = small_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.realizations = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config();
    cfg.levels = {-0.1};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_config();
    cfg.levels.clear();
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
