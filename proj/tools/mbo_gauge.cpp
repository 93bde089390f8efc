// mbo-gauge: simulation runs, verification campaigns, and norm evaluation
// for the periodic modified Benjamin-Ono workbench.
//
// Exit codes: 0 success (and all checks passed for `verify`),
//             1 verification failure, 2 configuration or I/O error,
//             3 blow-up (partial trajectory flushed with a marker).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mbo/config.hpp"
#include "mbo/io.hpp"
#include "mbo/norms.hpp"
#include "mbo/verify.hpp"

namespace {

using namespace mbo;

void write_text_and_json(const std::string& path, const report::DiagnosticsReport& rep) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << report::to_text(rep);
    std::ofstream json(path + ".json");
    if (!json) throw std::runtime_error("cannot open for writing: " + path + ".json");
    json << report::to_json(rep);
}

int cmd_simulate(const config::RunConfig& cfg, const std::string& out_path,
                 const std::optional<std::string>& final_csv) {
    const auto spec = cfg.equation();
    const auto u0 = cfg.initial_datum();
    const integrator::IntegratorConfig icfg{cfg.dt, cfg.t_end, integrator::Scheme::ifrk4,
                                            cfg.blowup_threshold, cfg.stride};

    report::DiagnosticsReport summary;
    summary.test_id = "simulate";
    summary.provenance = config::provenance_hash(cfg);
    summary.input("out", out_path);

    equations::Trajectory traj{Grid(cfg.grid_n), 0.0, cfg.dt * cfg.stride, {}};
    bool blew_up = false;
    double blowup_time = 0.0;
    try {
        traj = integrator::simulate(spec, u0, icfg);
    } catch (const integrator::BlowUpError& e) {
        blew_up = true;
        blowup_time = e.time;
        traj = e.partial;
    }
    io::write_trajectory(out_path, traj, blew_up);
    if (final_csv && !traj.snapshots.empty())
        io::write_field_csv(*final_csv, traj.snapshots.back());

    summary.metric("snapshots", static_cast<double>(traj.size()));
    summary.metric("truncated", blew_up ? 1.0 : 0.0);
    if (blew_up) summary.metric("blowup_time", blowup_time);
    if (!traj.snapshots.empty()) {
        const auto& last = traj.snapshots.back();
        summary.metric("final_h_half", norms::sobolev_norm(last, 0.5));
        summary.metric("final_l2", norms::lq_norm(last, 2.0));
        if (last.is_real()) {
            const auto sign = cfg.kind == equations::EquationKind::mbo
                                  ? cfg.sign
                                  : equations::Sign::defocusing;
            const auto q0 = equations::mean_momentum_energy(traj.snapshots.front(), sign);
            const auto q1 = equations::mean_momentum_energy(last, sign);
            summary.metric("mean_drift", std::abs(q1.mean - q0.mean));
            summary.metric("momentum_drift", std::abs(q1.momentum - q0.momentum));
            if (cfg.kind == equations::EquationKind::mbo)
                summary.metric("energy_drift", std::abs(q1.energy - q0.energy));
        }
    }
    summary.pass = !blew_up;
    write_text_and_json(out_path + ".summary.txt", summary);
    std::cout << report::to_text(summary);
    return blew_up ? 3 : 0;
}

report::DiagnosticsReport merge_reports(const std::string& id,
                                        const std::vector<report::DiagnosticsReport>& parts) {
    report::DiagnosticsReport merged;
    merged.test_id = id;
    merged.pass = true;
    for (const auto& part : parts) {
        for (const auto& [k, v] : part.metrics) merged.metric(part.test_id + "." + k, v);
        merged.metric(part.test_id + ".pass", part.pass ? 1.0 : 0.0);
        merged.pass = merged.pass && part.pass;
    }
    return merged;
}

int cmd_verify(const config::RunConfig& cfg, const std::string& suite,
               const std::string& out_path) {
    using namespace verify;
    const auto u0 = cfg.initial_datum();

    const auto run_identities = [&] {
        IdentityParams p;
        p.grid_n = 64;
        p.seed = cfg.verify_seed;
        p.n_trials = cfg.verify_trials;
        p.bandwidth = cfg.ident_bandwidth;
        p.amplitude = cfg.ident_amplitude;
        p.tol = cfg.identity_tol;
        return identity_suite(p);
    };
    const auto run_conservation = [&] {
        ConservationParams p;
        p.sign = cfg.sign;
        p.t_end = cfg.t_end;
        p.dt_levels = {4.0 * cfg.dt, 2.0 * cfg.dt, cfg.dt};
        p.stride = cfg.stride;
        p.mean_tol = cfg.mean_drift_tol;
        p.factor_lo = cfg.drift_factor_lo;
        p.factor_hi = cfg.drift_factor_hi;
        return check_conservation(u0, p);
    };
    const auto run_gauge = [&] {
        ResidualStudyParams p;
        p.t_end = cfg.t_end / 2.0;
        p.dt = cfg.dt / 2.0;
        p.stride = cfg.stride;
        p.n_fine = 2 * cfg.grid_n;
        p.order_lo = cfg.order2_lo;
        p.order_hi = cfg.order2_hi;
        return gauge_residual_study(0.5 * u0, p);
    };
    const auto run_ft = [&] {
        ResidualStudyParams p;
        p.t_end = cfg.t_end / 2.0;
        p.dt = cfg.dt / 2.0;
        p.stride = cfg.stride;
        p.order_lo = cfg.order2_lo;
        p.order_hi = cfg.order2_hi;
        return ft_residual_study(0.5 * u0, p);
    };
    const auto run_wicked = [&] {
        ReductionParams p;
        p.t_end = cfg.t_end / 4.0;
        p.dt = cfg.dt;
        p.stride = cfg.stride;
        return verify_wicked_reduction(u0, p);
    };
    const auto run_probes = [&] {
        ProbeParams p;
        p.seed = cfg.verify_seed;
        p.n_trials = cfg.probe_trials;
        p.ratio_max = cfg.probe_ratio_max;
        p.slope_max = cfg.probe_slope_max;
        std::vector<report::DiagnosticsReport> parts;
        for (const Probe probe :
             {Probe::bourgain_l4, Probe::strichartz, Probe::r_smoothing, Probe::exp_h1})
            parts.push_back(estimate_probe(probe, p));
        return merge_reports("probes", parts);
    };
    const auto run_continuity = [&] {
        ContinuityParams p;
        p.sign = cfg.sign;
        p.t_end = cfg.t_end;
        p.dt = cfg.dt;
        p.stride = cfg.stride;
        p.spread_max = cfg.continuity_spread;
        return data_continuity(u0, p);
    };

    report::DiagnosticsReport rep;
    if (suite == "identities") rep = run_identities();
    else if (suite == "conservation") rep = run_conservation();
    else if (suite == "gauge") rep = run_gauge();
    else if (suite == "wicked") rep = run_wicked();
    else if (suite == "probes") rep = run_probes();
    else if (suite == "continuity") rep = run_continuity();
    else if (suite == "all") {
        const auto t0 = std::chrono::steady_clock::now();
        rep = merge_reports("all",
                            {run_identities(), run_conservation(), run_gauge(), run_ft(),
                             run_wicked(), run_probes(), run_continuity()});
        rep.metric("runtime_s",
                   std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    } else {
        throw CLI::ValidationError("--suite",
                                   "unknown suite `" + suite +
                                       "` (expected identities|conservation|gauge|wicked|"
                                       "probes|continuity|all)");
    }

    rep.provenance = config::provenance_hash(cfg);
    write_text_and_json(out_path, rep);
    std::cout << report::to_text(rep);
    return rep.pass ? 0 : 1;
}

struct NormEntry {
    std::string name;
    bool per_snapshot = true;
    std::function<double(const PeriodicField&)> snapshot_fn;
    std::function<double(const equations::Trajectory&, const norms::SpaceTimeBlock*)> window_fn;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

NormEntry parse_norm_entry(const std::string& entry) {
    const auto parts = split(entry, ':');
    const auto arg = [&](std::size_t i) {
        if (i >= parts.size())
            throw std::invalid_argument("norms.spec entry `" + entry + "`: missing argument");
        return std::stod(parts[i]);
    };
    NormEntry e;
    e.name = entry;
    if (parts[0] == "hs") {
        const double s = arg(1);
        e.snapshot_fn = [s](const PeriodicField& f) { return norms::sobolev_norm(f, s); };
    } else if (parts[0] == "hsq") {
        const double s = arg(1), q = arg(2);
        e.snapshot_fn = [s, q](const PeriodicField& f) { return norms::sobolev_q_norm(f, s, q); };
    } else if (parts[0] == "lq") {
        const double q = arg(1);
        e.snapshot_fn = [q](const PeriodicField& f) { return norms::lq_norm(f, q); };
    } else if (parts[0] == "xsb" || parts[0] == "zsb") {
        const double s = arg(1), b = arg(2);
        const auto variant =
            parts[0] == "xsb" ? norms::ModulationVariant::X : norms::ModulationVariant::Z;
        e.per_snapshot = false;
        e.window_fn = [s, b, variant](const equations::Trajectory&,
                                      const norms::SpaceTimeBlock* block) {
            if (!block) throw std::runtime_error("norms: window norms need at least 8 snapshots");
            return norms::xsb_norm(*block, s, b, variant);
        };
    } else if (parts[0] == "y") {
        const double s = arg(1);
        e.per_snapshot = false;
        e.window_fn = [s](const equations::Trajectory&, const norms::SpaceTimeBlock* block) {
            if (!block) throw std::runtime_error("norms: window norms need at least 8 snapshots");
            return norms::y_norm(*block, s);
        };
    } else if (parts[0] == "l4tx") {
        e.per_snapshot = false;
        e.window_fn = [](const equations::Trajectory&, const norms::SpaceTimeBlock* block) {
            if (!block) throw std::runtime_error("norms: window norms need at least 8 snapshots");
            return norms::windowed_l4(*block);
        };
    } else if (parts[0] == "lplq") {
        const double p = arg(1), q = arg(2);
        e.per_snapshot = false;
        e.window_fn = [p, q](const equations::Trajectory& traj, const norms::SpaceTimeBlock*) {
            return norms::lp_lq_norm(traj, p, q);
        };
    } else {
        throw std::invalid_argument("norms.spec: unknown entry `" + entry + "`");
    }
    return e;
}

int cmd_norms(const config::RunConfig& cfg, const std::string& traj_path) {
    const auto file = io::read_trajectory(traj_path);
    const auto& traj = file.trajectory;
    if (traj.snapshots.empty()) throw std::runtime_error("norms: empty trajectory");

    std::vector<NormEntry> entries;
    for (const auto& item : split(cfg.norms_spec, ','))
        if (!item.empty()) entries.push_back(parse_norm_entry(item));

    // per-snapshot table
    std::string header = "t";
    bool any_snapshot = false;
    for (const auto& e : entries)
        if (e.per_snapshot) {
            header += "," + e.name;
            any_snapshot = true;
        }
    if (any_snapshot) {
        std::cout << header << "\n";
        for (std::size_t m = 0; m < traj.size(); ++m) {
            std::string row = report::format_double(traj.time_at(m));
            for (const auto& e : entries)
                if (e.per_snapshot) row += "," + report::format_double(e.snapshot_fn(traj[m]));
            std::cout << row << "\n";
        }
    }

    // whole-window table
    std::vector<const NormEntry*> window_entries;
    for (const auto& e : entries)
        if (!e.per_snapshot) window_entries.push_back(&e);
    if (!window_entries.empty()) {
        if (any_snapshot) std::cout << "\n";
        std::cout << "window_norm,value\n";
        std::optional<norms::SpaceTimeBlock> block;
        if (traj.size() >= 8) block = norms::SpaceTimeBlock::whole(traj);
        for (const auto* e : window_entries)
            std::cout << e->name << ","
                      << report::format_double(e->window_fn(traj, block ? &*block : nullptr))
                      << "\n";
    }
    if (file.truncated)
        std::cerr << "note: trajectory file carries a blow-up truncation marker\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudospectral workbench for the periodic modified Benjamin-Ono equation"};
    app.require_subcommand(1);

    std::string config_path, out_path, suite = "all", traj_path;
    std::optional<std::string> final_csv;

    auto* sim = app.add_subcommand("simulate", "integrate and persist a trajectory");
    sim->add_option("--config", config_path, "run configuration file")->required();
    sim->add_option("--out", out_path, "trajectory output path")->default_val("trajectory.mbot");
    std::string csv_path;
    auto* csv_opt = sim->add_option("--final-csv", csv_path, "also dump the last snapshot as CSV");

    auto* ver = app.add_subcommand("verify", "run a verification campaign");
    ver->add_option("--config", config_path, "run configuration file")->required();
    ver->add_option("--suite", suite,
                    "identities|conservation|gauge|wicked|probes|continuity|all");
    std::string report_path;
    ver->add_option("--out", report_path, "report output path");
    std::uint64_t seed_val = 0;
    auto* seed_opt = ver->add_option("--seed", seed_val, "override verify.seed");

    auto* nrm = app.add_subcommand("norms", "evaluate norms of a stored trajectory");
    nrm->add_option("--config", config_path, "run configuration file")->required();
    nrm->add_option("trajectory", traj_path, "trajectory file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        config::RunConfig cfg = config::load(config_path);
        if (sim->parsed()) {
            if (csv_opt->count()) final_csv = csv_path;
            return cmd_simulate(cfg, out_path, final_csv);
        }
        if (ver->parsed()) {
            if (seed_opt->count()) cfg.verify_seed = seed_val;
            if (report_path.empty()) report_path = suite + "_report.txt";
            return cmd_verify(cfg, suite, report_path);
        }
        if (nrm->parsed()) return cmd_norms(cfg, traj_path);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
