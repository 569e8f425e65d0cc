#include "elcoinv/experiment.hpp"

#include "elcoinv/artifacts.hpp"
#include "elcoinv/errors.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <memory>
#include <optional>
#include <thread>

namespace elcoinv {

namespace fs = std::filesystem;

namespace {

constexpr int dense_samples = 400;

std::string iso_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

/// Everything run_experiment accumulates before emitting artifacts.
struct RunPieces {
    std::optional<SynthesizedData> sd;
    std::optional<InversionResult> result;
    std::vector<double> missing_thetas; ///< grid angles on the missing arc
};

void write_summary(const fs::path& file, const RunReport& rep) {
    nlohmann::json j;
    j["experiment"] = rep.config.spec.name;
    j["delta"] = rep.config.spec.delta;
    j["seed"] = rep.config.spec.seed;
    j["status"] = static_cast<int>(rep.status);
    j["failure"] = rep.failure;
    j["converged"] = rep.converged;
    j["iterations"] = rep.iterations;
    j["alpha"] = finite_or_null(rep.alpha);
    j["alpha_at_floor"] = rep.alpha_at_floor;
    j["boundary_error"] = finite_or_null(rep.boundary_error);
    j["impedance_error"] = finite_or_null(rep.impedance_error);
    j["final_error_metric"] = finite_or_null(rep.final_error_metric);
    j["final_residual"] = finite_or_null(rep.final_residual);
    j["runtime_seconds"] = rep.runtime_seconds;
    j["timestamp"] = iso_timestamp();
    std::ofstream out(file);
    if (!out) throw ConfigError("summary: cannot write '" + file.string() + "'");
    out << j.dump(2) << "\n";
}

void write_artifacts(const fs::path& outdir, const RunReport& rep, const RunPieces& pieces) {
    const RunConfig& cfg = rep.config;

    std::vector<std::vector<std::string>> hist_rows;
    if (pieces.result) {
        for (const IterationRecord& r : pieces.result->history) {
            // the Morozov parameter is chosen once before the loop and reused
            // by every round, so the reuse flag is identically 1
            hist_rows.push_back({std::to_string(r.n), csv_double(r.error_metric),
                                 csv_double(r.residual_norm), "1"});
        }
    }
    write_csv(outdir / "history.csv", {"n", "error_metric", "residual_norm", "alpha_reused"},
              hist_rows);

    if (pieces.result && !pieces.result->history.empty()) {
        PlotSeries decay;
        decay.label = "E_n";
        decay.color = "#1f6fb2";
        for (const IterationRecord& r : pieces.result->history) {
            decay.x.push_back(r.n);
            decay.y.push_back(r.error_metric);
        }
        write_line_plot_svg(outdir / "convergence.svg",
                            cfg.spec.name + ": stopping metric decay", "iteration n", "E_n",
                            {decay}, /*log_y=*/true);
    }

    if (!pieces.sd) return; // synthesis failed: nothing geometric to report

    const AnalyticCurve& truth = pieces.sd->truth.curve;
    // a failed run reports the initial guess as its current boundary iterate
    const RVec* rec_coeffs = pieces.result ? &pieces.result->state.boundary : nullptr;
    const std::optional<FourierCurve> rec =
        rec_coeffs ? std::optional<FourierCurve>(FourierCurve(*rec_coeffs,
                                                              cfg.inversion.fourier_degree))
                   : std::nullopt;

    std::vector<std::vector<std::string>> brows;
    PlotSeries strue{"true boundary", "#1f6fb2", 2.0, false, {}, {}};
    PlotSeries sinit{"initial guess", "#888888", 1.4, true, {}, {}};
    PlotSeries srec{"reconstruction", "#c23b22", 2.0, false, {}, {}};
    for (int k = 0; k <= 512; ++k) {
        const double th = 2.0 * pi * k / 512.0;
        const double rt = truth.radius(th);
        const double ri = cfg.inversion.init_radius;
        const double rr = rec ? rec->radius(th) : ri;
        if (k < 512)
            brows.push_back({csv_double(th), csv_double(rt), csv_double(ri), csv_double(rr)});
        strue.x.push_back(rt * std::cos(th));
        strue.y.push_back(rt * std::sin(th));
        sinit.x.push_back(ri * std::cos(th));
        sinit.y.push_back(ri * std::sin(th));
        srec.x.push_back(rr * std::cos(th));
        srec.y.push_back(rr * std::sin(th));
    }
    write_csv(outdir / "boundary.csv", {"theta", "r_true", "r_init", "r_reconstructed"}, brows);
    write_plane_plot_svg(outdir / "boundary_overlay.svg", cfg.spec.name + ": boundary overlay",
                         {strue, sinit, srec});

    const ImpedanceModel* chi = pieces.result ? &pieces.result->state.chi : nullptr;
    std::vector<std::vector<std::string>> irows;
    PlotSeries ctrue{"true impedance", "#1f6fb2", 2.0, false, {}, {}};
    PlotSeries crec{"reconstruction", "#c23b22", 2.0, false, {}, {}};
    if (chi && chi->pointwise) {
        for (size_t k = 0; k < pieces.missing_thetas.size(); ++k) {
            const double th = pieces.missing_thetas[k];
            const double ct = pieces.sd->truth.chi(th);
            const double cr = chi->value_at(static_cast<Eigen::Index>(k));
            irows.push_back({csv_double(th), csv_double(ct), csv_double(cr)});
            ctrue.x.push_back(th), ctrue.y.push_back(ct);
            crec.x.push_back(th), crec.y.push_back(cr);
        }
    } else {
        const double start = cfg.inversion.gamma0_end;
        const double length = 2.0 * pi - start;
        for (int k = 0; k < dense_samples; ++k) {
            const double th = start + length * (k + 0.5) / dense_samples;
            const double ct = pieces.sd->truth.chi(th);
            const double cr = chi ? chi->value(th) : cfg.inversion.chi0;
            irows.push_back({csv_double(th), csv_double(ct), csv_double(cr)});
            ctrue.x.push_back(th), ctrue.y.push_back(ct);
            crec.x.push_back(th), crec.y.push_back(cr);
        }
    }
    write_csv(outdir / "impedance.csv", {"theta", "chi_true", "chi_reconstructed"}, irows);
    write_line_plot_svg(outdir / "impedance_overlay.svg",
                        cfg.spec.name + ": impedance on the missing arc", "theta", "chi",
                        {ctrue, crec});
}

int thread_cap(size_t rows) {
    unsigned cap = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("ELASTO_COINV_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) cap = static_cast<unsigned>(v);
    }
    return static_cast<int>(std::min<size_t>(cap, rows));
}

} // namespace

double boundary_error_missing_arc(const RVec& coeffs, int degree, const AnalyticCurve& truth,
                                  double gamma0_end) {
    const FourierCurve rec(coeffs, degree);
    const double length = 2.0 * pi - gamma0_end;
    double num = 0.0, den = 0.0;
    for (int k = 0; k < dense_samples; ++k) {
        const double th = gamma0_end + length * (k + 0.5) / dense_samples;
        const double w = truth.sample(th).speed;
        const double d = rec.radius(th) - truth.radius(th);
        num += w * d * d;
        den += w * truth.radius(th) * truth.radius(th);
    }
    return std::sqrt(num / den);
}

double impedance_error_missing_arc(const ImpedanceModel& chi, const ScalarFn& truth_chi,
                                   const AnalyticCurve& truth,
                                   const std::vector<double>& node_thetas) {
    double num = 0.0, den = 0.0;
    if (chi.pointwise) {
        if (node_thetas.size() != static_cast<size_t>(chi.coeffs.size()))
            throw ConfigError("impedance error: node grid does not match the pointwise model");
        for (size_t k = 0; k < node_thetas.size(); ++k) {
            const double w = truth.sample(node_thetas[k]).speed;
            const double want = truth_chi(node_thetas[k]);
            const double d = chi.value_at(static_cast<Eigen::Index>(k)) - want;
            num += w * d * d;
            den += w * want * want;
        }
    } else {
        for (int k = 0; k < dense_samples; ++k) {
            const double th =
                chi.interval_start + chi.interval_length * (k + 0.5) / dense_samples;
            const double w = truth.sample(th).speed;
            const double want = truth_chi(th);
            const double d = chi.value(th) - want;
            num += w * d * d;
            den += w * want * want;
        }
    }
    return std::sqrt(num / den);
}

RunReport run_experiment(const RunConfig& cfg, const std::filesystem::path& outdir) {
    const auto t0 = std::chrono::steady_clock::now();
    RunReport rep;
    rep.config = cfg;

    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) {
        rep.status = RunStatus::config;
        rep.failure = "cannot create output directory '" + outdir.string() + "'";
        return rep;
    }

    RunPieces pieces;
    std::unique_ptr<CompletionResult> comp;
    std::optional<Inverter> inv;
    try {
        {
            std::ofstream echo(outdir / "config.echo");
            if (!echo) throw ConfigError("cannot write '" + (outdir / "config.echo").string() + "'");
            echo << render_config(cfg);
        }
        cfg.validate();
        pieces.sd.emplace(make_data(cfg.spec));
        CauchyData data = pieces.sd->data;
        if (cfg.spec.delta > 0.0) data = add_noise(data, cfg.spec.delta, cfg.spec.seed);

        const FourierCurve aux = FourierCurve::circle(cfg.spec.boundary_radius, 1);
        const auto aux_nodes =
            sample_grid(aux, collocation_grid(cfg.spec.source_count, 0.0, 2.0 * pi));
        const RVec aux_weights = arc_weights(aux_nodes, 2.0 * pi);
        comp = std::make_unique<CompletionResult>(
            complete_cauchy(data, cfg.spec.material, aux_nodes, aux_weights));
        rep.alpha = comp->reg.alpha;
        rep.alpha_at_floor = comp->reg.at_floor;

        const AnalyticCurve truth = pieces.sd->truth.curve;
        inv.emplace(cfg.inversion, comp->field, pieces.sd->truth.g,
                    [truth](double th) { return truth.sample(th); });
        for (Eigen::Index j : inv->missing_nodes())
            pieces.missing_thetas.push_back(inv->grid()[static_cast<size_t>(j)]);

        pieces.result.emplace(inv->run());
        rep.converged = pieces.result->converged;
        rep.iterations = pieces.result->iterations;
        if (!pieces.result->history.empty()) {
            rep.final_error_metric = pieces.result->history.back().error_metric;
            rep.final_residual = pieces.result->history.back().residual_norm;
        }
        rep.boundary_error = boundary_error_missing_arc(
            pieces.result->state.boundary, cfg.inversion.fourier_degree, truth,
            cfg.inversion.gamma0_end);
        rep.impedance_error = impedance_error_missing_arc(
            pieces.result->state.chi, pieces.sd->truth.chi, truth, pieces.missing_thetas);
        if (!rep.converged) {
            rep.status = RunStatus::iteration;
            rep.failure = "iteration did not reach the stopping tolerance within " +
                          std::to_string(cfg.inversion.max_iter) + " rounds";
        }
    } catch (const ConfigError& e) {
        rep.status = RunStatus::config;
        rep.failure = e.what();
    } catch (const GeometryError& e) {
        rep.status = RunStatus::geometry;
        rep.failure = e.what();
    } catch (const MorozovError& e) {
        rep.status = RunStatus::morozov;
        rep.failure = e.what();
    } catch (const IterationError& e) {
        rep.status = RunStatus::iteration;
        rep.failure = e.what();
    } catch (const std::exception& e) {
        rep.status = RunStatus::internal;
        rep.failure = e.what();
    }

    rep.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    try {
        write_artifacts(outdir, rep, pieces);
        write_summary(outdir / "summary.json", rep);
    } catch (const std::exception& e) {
        if (rep.status == RunStatus::ok) rep.status = RunStatus::internal;
        if (rep.failure.empty()) rep.failure = e.what();
    }
    return rep;
}

std::vector<RunReport> sweep(const RunConfig& base, const std::vector<double>& deltas,
                             const std::vector<std::uint64_t>& seeds,
                             const std::filesystem::path& outdir) {
    if (deltas.empty()) throw ConfigError("sweep: the noise level list is empty");
    if (seeds.empty()) throw ConfigError("sweep: the seed list is empty");
    base.validate();

    std::error_code ec;
    fs::create_directories(outdir, ec);
    if (ec) throw ConfigError("sweep: cannot create output directory '" + outdir.string() + "'");

    struct Row {
        RunConfig cfg;
        fs::path dir;
    };
    std::vector<Row> rows;
    for (double delta : deltas) {
        for (std::uint64_t seed : seeds) {
            RunConfig c = base;
            c.spec.delta = delta;
            c.spec.seed = seed;
            char dname[64];
            std::snprintf(dname, sizeof dname, "delta%g_seed%llu", delta,
                          static_cast<unsigned long long>(seed));
            rows.push_back({std::move(c), outdir / dname});
        }
    }

    std::vector<RunReport> reports(rows.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1))
            reports[i] = run_experiment(rows[i].cfg, rows[i].dir);
    };
    std::vector<std::thread> pool;
    const int nthreads = thread_cap(rows.size());
    pool.reserve(static_cast<size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    std::vector<std::vector<std::string>> table;
    for (const RunReport& r : reports) {
        table.push_back({csv_double(r.config.spec.delta), std::to_string(r.config.spec.seed),
                         std::to_string(static_cast<int>(r.status)),
                         r.converged ? "1" : "0", std::to_string(r.iterations),
                         csv_double(r.alpha), csv_double(r.boundary_error),
                         csv_double(r.impedance_error), csv_double(r.final_residual),
                         csv_double(r.final_error_metric)});
    }
    write_csv(outdir / "sweep.csv",
              {"delta", "seed", "status", "converged", "iterations", "alpha", "boundary_error",
               "impedance_error", "final_residual", "final_error_metric"},
              table);
    return reports;
}

} // namespace elcoinv
