#pragma once

#include "elcoinv/config.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace elcoinv {

/// CLI exit statuses. Each toolkit failure class has its own code so scripted
/// callers can distinguish them; `internal` covers everything unexpected.
enum class RunStatus : int {
    ok = 0,
    internal = 1,
    config = 2,
    geometry = 3,
    morozov = 4,
    iteration = 5,
};

/// Outcome record of one experiment run; summary.json mirrors these fields.
struct RunReport {
    RunConfig config;
    RunStatus status = RunStatus::ok;
    std::string failure; ///< empty on success

    bool converged = false;
    int iterations = 0;
    double alpha = std::numeric_limits<double>::quiet_NaN(); ///< Morozov parameter
    bool alpha_at_floor = false;
    double boundary_error = std::numeric_limits<double>::quiet_NaN();
    double impedance_error = std::numeric_limits<double>::quiet_NaN();
    double final_error_metric = std::numeric_limits<double>::quiet_NaN();
    double final_residual = std::numeric_limits<double>::quiet_NaN();
    double runtime_seconds = 0.0;
};

/// Truth-weighted relative L2 error of the reconstructed radius over the
/// missing arc [gamma0_end, 2 pi).
double boundary_error_missing_arc(const RVec& coeffs, int degree, const AnalyticCurve& truth,
                                  double gamma0_end);

/// Truth-weighted relative L2 error of the reconstructed impedance over the
/// missing arc; pointwise models are compared at `node_thetas`, trig models on
/// a dense midpoint grid of their own interval.
double impedance_error_missing_arc(const ImpedanceModel& chi, const ScalarFn& truth_chi,
                                   const AnalyticCurve& truth,
                                   const std::vector<double>& node_thetas);

/// Executes synthesis -> data completion -> inversion and writes the full
/// artifact set into `outdir`: config.echo, history.csv, boundary.csv,
/// impedance.csv, summary.json, boundary_overlay.svg, impedance_overlay.svg,
/// convergence.svg. Never throws: failures land in the report (and in
/// summary.json's failure marker) and whatever artifacts exist are written.
RunReport run_experiment(const RunConfig& cfg, const std::filesystem::path& outdir);

/// One run per (delta, seed) pair, each in its own `delta<d>_seed<s>`
/// subdirectory, plus an aggregated sweep.csv. Individual run failures are
/// recorded per row and the sweep continues; empty input lists are
/// configuration errors. Rows execute in parallel, capped by the
/// ELASTO_COINV_THREADS environment variable when it is set.
std::vector<RunReport> sweep(const RunConfig& base, const std::vector<double>& deltas,
                             const std::vector<std::uint64_t>& seeds,
                             const std::filesystem::path& outdir);

} // namespace elcoinv
