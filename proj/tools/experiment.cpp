#include "tether/cli/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "tether/asymptotics/suite.hpp"
#include "tether/core/csv.hpp"
#include "tether/core/error.hpp"
#include "tether/core/rng.hpp"
#include "tether/ibm/run.hpp"
#include "tether/ibm/statistics.hpp"
#include "tether/macro1d/diagnostics.hpp"
#include "tether/reconstruct.hpp"
#include "tether/stability.hpp"

namespace tether::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

void note(std::ostream* log, const std::string& line) {
    if (log) *log << line << '\n';
}

void write_json(const fs::path& path, const json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_field_rows(CsvWriter& csv, double t, const DensityField& a, const DensityField& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        csv.cell(t).cell(a.grid().x(i)).cell(a[i]).cell(b[i]).end_row();
}

// Peaks of an estimated density use the same detector as the macro solver.
int density_peaks(const DensityField& f) { return peak_count(f.values()); }

RunSummary run_macro_mode(const ExperimentConfig& c, const fs::path& dir, std::ostream* log) {
    const auto params = to_macro_params(c);
    params.validate();
    const auto numerics = to_macro_numerics(c);
    numerics.validate();
    const Grid1D grid(numerics.n_cells, c.domain.length);
    MacroState initial{make_initial_density(to_initial_condition(c), grid, params.rho0), 0.0,
                       std::nullopt, 0.0, 0, numerics.comoving ? params.c1 : 0.0, 0.0};

    std::optional<CsvWriter> snapshots;
    if (c.numerics.snapshots) 
        snapshots.emplace(dir / "snapshots.csv",
                          std::initializer_list<std::string_view>{"t", "x", "rho_g", "rho_f"});
    std::deque<DensityField> tail;  // lab-frame densities over the last unit of time
    std::optional<DensityField> last_g, last_f;
    double last_t = 0.0;

    MacroRunOptions options;
    options.store_snapshots = false;
    options.on_output = [&](const MacroOutput& o) {
        if (snapshots) write_field_rows(*snapshots, o.t, *o.rho_g, *o.rho_f);
        if (o.t >= numerics.t_end - 1.0 - 1e-9) tail.push_back(*o.rho_g);
        last_g = *o.rho_g;
        last_f = *o.rho_f;
        last_t = o.t;
    };
    note(log, "macro1d: " + std::to_string(grid.size()) + " cells to t=" + format_double(numerics.t_end));
    const auto result = run_macro(params, numerics, std::move(initial), options);
    if (snapshots) snapshots->close();
    if (!c.numerics.snapshots && last_g) {
        CsvWriter csv(dir / "snapshots.csv", {"t", "x", "rho_g", "rho_f"});
        write_field_rows(csv, last_t, *last_g, *last_f);
        csv.close();
    }

    CsvWriter summary(dir / "summary.csv", {"t", "mass", "min_rho_f", "peaks"});
    double drift = 0.0;
    for (std::size_t j = 0; j < result.times.size(); ++j) {
        summary.cell(result.times[j]).cell(result.mass[j]).cell(result.min_rho_f_at_output[j])
            .cell(result.peaks[j]).end_row();
        drift = std::max(drift, std::abs(result.mass[j] - result.mass.front()));
    }
    summary.close();

    // Speeds need snapshots closer than half the pattern spacing.
    double speed = std::numeric_limits<double>::quiet_NaN();
    if (tail.size() >= 2 && numerics.output_interval <= 0.1 + 1e-12) {
        const std::vector<DensityField> traj(tail.begin(), tail.end());
        try {
            speed = wave_speed(traj, numerics.output_interval);
        } catch (const Error&) {
        }
    }

    RunSummary s;
    s.predicted_peaks = predicted_peak_count(params);
    s.macro_peaks = result.peaks.empty() ? 0 : result.peaks.back();
    s.min_rho_f = result.min_rho_f;
    s.valid = result.valid();

    json j;
    j["mode"] = "macro1d";
    j["t_end"] = result.final_state.t;
    j["steps"] = result.final_state.step;
    j["peaks"] = s.macro_peaks;
    j["predicted_peaks"] = s.predicted_peaks;
    j["min_rho_f"] = result.min_rho_f;
    j["negative_steps"] = result.negative_steps;
    j["valid"] = s.valid;
    j["mass"] = result.mass.empty() ? 0.0 : result.mass.back();
    j["max_mass_drift"] = drift;
    j["wave_speed"] = nullable(speed);
    write_json(dir / "report.json", j);
    note(log, "macro1d: " + std::to_string(s.macro_peaks) + " peaks, predicted " +
                  std::to_string(s.predicted_peaks) + (s.valid ? "" : ", negative obstacle density"));
    return s;
}

struct Ibm1dRun {
    IbmRunResult result;
    DensityField rho_spp;
    DensityField rho_obstacle;
};

Ibm1dRun run_ibm1d_core(const ExperimentConfig& c, const fs::path& dir, std::ostream* log) {
    const auto params = to_ibm_params(c, 1);
    params.validate(1);
    const auto numerics = to_ibm_numerics(c);
    const Grid1D grid(c.numerics.n_cells, c.domain.length);
    const double var = c.numerics.density_variance;

    CsvWriter density(dir / "density.csv", {"t", "x", "rho_spp", "rho_obstacle"});
    IbmRunOptions options;
    options.statistics = false;
    if (c.numerics.snapshots)
        options.on_output = [&](const IbmState& cur, const IbmState&) {
            write_field_rows(density, cur.t, estimate_density_1d(spp_x(cur), var, grid),
                             estimate_density_1d(obstacle_x(cur), var, grid));
        };
    note(log, "ibm1d: " + std::to_string(params.M) + " SPPs, " + std::to_string(params.N) +
                  " obstacles to t=" + format_double(numerics.t_end));
    auto result = run_ibm(params, numerics, make_initial_state_1d(params, c.domain.length, c.seed),
                          options);
    auto rho_spp = estimate_density_1d(spp_x(result.final_state), var, grid);
    auto rho_obs = estimate_density_1d(obstacle_x(result.final_state), var, grid);
    if (!c.numerics.snapshots) write_field_rows(density, result.final_state.t, rho_spp, rho_obs);
    density.close();
    write_spp_csv(result.final_state, dir / "spp.csv");
    write_obstacle_csv(result.final_state, dir / "obstacles.csv");
    return {std::move(result), std::move(rho_spp), std::move(rho_obs)};
}

json ibm1d_report(const Ibm1dRun& run) {
    json j;
    j["t_end"] = run.result.final_state.t;
    j["steps"] = run.result.final_state.step;
    j["spp"] = run.result.final_state.n_spp();
    j["obstacles"] = run.result.final_state.n_obstacles();
    j["spp_peaks"] = density_peaks(run.rho_spp);
    return j;
}

RunSummary run_ibm1d_mode(const ExperimentConfig& c, const fs::path& dir, std::ostream* log) {
    const auto run = run_ibm1d_core(c, dir, log);
    json j{{"mode", "ibm1d"}};
    j.update(ibm1d_report(run));
    write_json(dir / "report.json", j);
    RunSummary s;
    s.ibm_peaks = density_peaks(run.rho_spp);
    note(log, "ibm1d: " + std::to_string(s.ibm_peaks) + " SPP density peaks");
    return s;
}

json offsets_json(const MinimumOffsets& o) {
    return json{{"offsets", o.offsets}, {"mean", o.mean}, {"max_abs", o.max_abs}};
}

RunSummary run_reconstruct_mode(const ExperimentConfig& c, const fs::path& dir, std::ostream* log) {
    const auto closure = to_macro_params(c);
    closure.validate();
    const auto run = run_ibm1d_core(c, dir, log);
    const Grid1D grid(c.numerics.n_cells, c.domain.length);
    const auto rec = reconstruct_obstacles(run.result.final_state, run.result.previous_state, closure,
                                           grid, c.numerics.density_variance);

    CsvWriter csv(dir / "reconstruction.csv",
                  {"x", "rho_g", "drho_g_dt", "rho_f_measured", "rho_f_gamma1", "rho_f_gamma2"});
    for (std::size_t i = 0; i < grid.size(); ++i)
        csv.cell(grid.x(i)).cell(rec.rho_g[i]).cell(rec.drho_g_dt[i]).cell(rec.rho_f_measured[i])
            .cell(rec.rho_f_gamma1[i]).cell(rec.rho_f_gamma2[i]).end_row();
    csv.close();

    const double L = c.domain.length;
    json j{{"mode", "reconstruct"}};
    j.update(ibm1d_report(run));
    j["kernel_radius"] = c.kernel.radius;
    j["spp_maxima"] = rec.spp_maxima;
    j["minima"] = json{{"measured", rec.measured_minima},
                       {"gamma1", rec.gamma1_minima},
                       {"gamma2", rec.gamma2_minima}};
    j["offsets"] = json{{"measured", offsets_json(minimum_offsets(rec.spp_maxima, rec.measured_minima, L))},
                        {"gamma1", offsets_json(minimum_offsets(rec.spp_maxima, rec.gamma1_minima, L))},
                        {"gamma2", offsets_json(minimum_offsets(rec.spp_maxima, rec.gamma2_minima, L))}};
    write_json(dir / "report.json", j);

    RunSummary s;
    s.ibm_peaks = density_peaks(run.rho_spp);
    s.min_rho_f = std::min(rec.rho_f_gamma1.min(), rec.rho_f_gamma2.min());
    s.valid = s.min_rho_f >= 0.0;
    note(log, "reconstruct: " + std::to_string(rec.spp_maxima.size()) + " SPP maxima");
    return s;
}

std::string numbered(const char* stem, std::size_t index) {
    std::ostringstream name;
    name << stem << '_';
    name.width(4);
    name.fill('0');
    name << index << ".csv";
    return name.str();
}

RunSummary run_ibm2d_mode(const ExperimentConfig& c, const fs::path& dir, std::ostream* log) {
    const auto params = to_ibm_params(c, 2);
    params.validate(2);
    const auto numerics = to_ibm_numerics(c);
    const PeriodicDomain domain(2, c.domain.length);

    IbmRunOptions options;
    std::size_t frame = 0;
    if (c.numerics.snapshots) {
        fs::create_directories(dir / "snapshots");
        options.on_output = [&](const IbmState& cur, const IbmState&) {
            write_spp_csv(cur, dir / "snapshots" / numbered("spp", frame));
            write_obstacle_csv(cur, dir / "snapshots" / numbered("obstacles", frame));
            ++frame;
        };
    }
    note(log, "ibm2d: " + std::to_string(params.M) + " SPPs, " + std::to_string(params.N) +
                  " obstacles to t=" + format_double(numerics.t_end));
    const auto result = run_ibm(params, numerics, make_initial_state_2d(params, domain, c.seed), options);
    write_statistics_csv(result.statistics, dir / "statistics.csv");
    write_spp_csv(result.final_state, dir / "spp.csv");
    write_obstacle_csv(result.final_state, dir / "obstacles.csv");

    json j{{"mode", "ibm2d"}};
    j["t_end"] = result.final_state.t;
    j["steps"] = result.final_state.step;
    j["spp"] = result.final_state.n_spp();
    j["obstacles"] = result.final_state.n_obstacles();
    j["degenerate_alignments"] = result.final_state.degenerate_alignments;
    if (!result.statistics.empty()) {
        const auto& last = result.statistics.back();
        j["direction_variance"] = last.direction_variance;
        j["mean_neighborhood_density"] = last.mean_neighborhood_density;
        j["std_neighborhood_density"] = last.std_neighborhood_density;
        note(log, "ibm2d: direction variance " + format_double(last.direction_variance));
    }
    write_json(dir / "report.json", j);
    return {};
}

RunSummary run_stability_mode(const ExperimentConfig& c, const fs::path& dir, std::ostream* log) {
    const auto params = to_macro_params(c);
    params.validate();
    const auto report = is_linearly_stable(params, to_mode_set(c), to_dispersion_options(c));
    write_dispersion_csv(report, dir / "dispersion.csv");
    json j{{"mode", "stability"}, {"verdict", report.stable ? "stable" : "unstable"}};
    j.update(json::parse(report_json(report)));
    write_json(dir / "report.json", j);
    note(log, std::string("stability: ") + (report.stable ? "stable" : "unstable") +
                  ", r_I threshold " + format_double(report.threshold_r_I));
    RunSummary s;
    s.predicted_peaks = report.predicted_peaks;
    return s;
}

RunSummary run_verify_mode(const ExperimentConfig& c, const fs::path& dir, std::ostream* log) {
    const auto checks = run_asymptotics_suite(to_verification_options(c));
    write_check_csv(checks, dir / "checks.csv");
    json failed = json::array();
    for (const auto& check : checks) {
        if (!check.passed()) failed.push_back(check.name);
        note(log, (check.passed() ? "pass  " : "FAIL  ") + check.name + "  " +
                      format_double(check.residual) + " <= " + format_double(check.tolerance));
    }
    json j{{"mode", "verify-asymptotics"}, {"checks", checks.size()}, {"failed", failed}};
    write_json(dir / "report.json", j);
    if (!failed.empty())
        throw NumericalError(std::to_string(failed.size()) + " of " + std::to_string(checks.size()) +
                             " verification checks failed");
    return {};
}

RunSummary dispatch(const ExperimentConfig& c, const fs::path& dir, std::ostream* log) {
    switch (c.mode) {
        case Mode::Macro1d: return run_macro_mode(c, dir, log);
        case Mode::Ibm1d: return run_ibm1d_mode(c, dir, log);
        case Mode::Ibm2d: return run_ibm2d_mode(c, dir, log);
        case Mode::Reconstruct: return run_reconstruct_mode(c, dir, log);
        case Mode::Stability: return run_stability_mode(c, dir, log);
        case Mode::VerifyAsymptotics: return run_verify_mode(c, dir, log);
        case Mode::Sweep: {
            const auto rows = run_sweep(c, dir, log);
            const auto failed = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.ok; });
            if (failed > 0)
                throw NumericalError(std::to_string(failed) + " of " + std::to_string(rows.size()) +
                                     " sweep cells failed (see sweep_summary.csv)");
            return {};
        }
    }
    throw Error("unhandled mode");
}

std::string one_line(std::string s) {
    std::replace_if(s.begin(), s.end(), [](char ch) { return ch == '\n' || ch == '\r'; }, ' ');
    return s;
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config, const fs::path& out_dir, std::ostream* log) {
    validate(config);
    fs::create_directories(out_dir);
    ExperimentConfig resolved = config;
    resolved.output = out_dir.generic_string();
    write_text_atomic(out_dir / "config.yaml", serialize_config(resolved));
    return dispatch(config, out_dir, log);
}

std::string sweep_cell_name(std::size_t cell) {
    std::ostringstream name;
    name << "cell_";
    name.width(3);
    name.fill('0');
    name << cell;
    return name.str();
}

ExperimentConfig sweep_cell_config(const ExperimentConfig& config, std::size_t value_index,
                                   std::size_t replicate) {
    if (value_index >= config.sweep.values.size() || replicate >= config.sweep.replicates)
        throw Error("sweep cell out of range");
    const std::size_t cell = value_index * config.sweep.replicates + replicate;
    ExperimentConfig out = config;
    out.mode = config.sweep.base;
    out.seed = derive_seed(config.seed, cell);
    set_parameter(out, config.sweep.parameter, config.sweep.values[value_index]);
    return out;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& config, const fs::path& out_dir,
                                std::ostream* log) {
    validate(config);
    fs::create_directories(out_dir);
    const auto& sw = config.sweep;
    const std::size_t cells = sw.values.size() * sw.replicates;
    std::vector<SweepRow> rows(cells);
    std::size_t workers = sw.workers > 0 ? sw.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, cells);

    std::mutex log_mutex;
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < cells; i = next++) {
            SweepRow& row = rows[i];
            row.cell = i;
            row.replicate = i % sw.replicates;
            row.value = sw.values[i / sw.replicates];
            std::ostringstream cell_log;
            try {
                const auto cfg = sweep_cell_config(config, i / sw.replicates, row.replicate);
                row.seed = cfg.seed;
                const auto dir = out_dir / sweep_cell_name(i);
                row.summary = run_experiment(cfg, dir, &cell_log);
                if (sw.ibm && cfg.mode == Mode::Macro1d) {
                    auto ibm_cfg = cfg;
                    ibm_cfg.mode = Mode::Ibm1d;
                    row.summary.ibm_peaks = run_experiment(ibm_cfg, dir / "ibm", &cell_log).ibm_peaks;
                }
            } catch (const std::exception& e) {
                row.ok = false;
                row.message = one_line(e.what());
                cell_log << "failed: " << row.message << '\n';
            }
            if (log) {
                std::lock_guard lock(log_mutex);
                std::istringstream lines(cell_log.str());
                for (std::string line; std::getline(lines, line);)
                    *log << sweep_cell_name(i) << ": " << line << '\n';
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    CsvWriter csv(out_dir / "sweep_summary.csv",
                  {"cell", "parameter", "value", "replicate", "seed", "predicted_peaks", "macro_peaks",
                   "ibm_peaks", "min_rho_f", "valid", "status", "message"});
    auto count = [&](int v) -> CsvWriter& { return v >= 0 ? csv.cell(v) : csv.cell(""); };
    for (const auto& r : rows) {
        csv.cell(r.cell).cell(sw.parameter).cell(r.value).cell(r.replicate).cell(std::to_string(r.seed));
        count(r.summary.predicted_peaks);
        count(r.summary.macro_peaks);
        count(r.summary.ibm_peaks);
        if (std::isfinite(r.summary.min_rho_f)) csv.cell(r.summary.min_rho_f);
        else csv.cell("");
        csv.cell(r.ok && r.summary.valid).cell(r.ok ? "ok" : "failed").cell(r.message).end_row();
    }
    csv.close();
    return rows;
}

}  // namespace tether::cli
