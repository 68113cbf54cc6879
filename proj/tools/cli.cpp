#include "cli.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "sphkura/experiments.hpp"
#include "sphkura/output.hpp"

namespace sphkura::cli {

namespace {

struct Overrides {
    std::string config;
    std::map<std::string, std::string> values;
};

void add_common_flags(CLI::App* sub, Overrides& o, bool simulation)
{
    sub->add_option("--config", o.config, "flat key = value config file");
    sub->add_option("--kernel", o.values["kernel"], "indicator | smooth | custom:v0,v1,...");
    if (!simulation) {
        return;
    }
    sub->add_option("--seed", o.values["seed"], "master seed (u64)");
    sub->add_option("--out", o.values["out"], "output directory");
    sub->add_option("--threads", o.values["threads"], "worker threads (0 = all cores)");
    sub->add_option("--n", o.values["n"], "node counts, comma separated");
    sub->add_option("--eps", o.values["eps"], "eps list, or auto[:c] for c * n^(-1/3)");
    sub->add_option("--T", o.values["T"], "final time");
    sub->add_option("--dt", o.values["dt"], "time step, or auto");
    sub->add_option("--ic", o.values["ic"], "constant:c | z:a | harmonic:l,m,c;... | solar_time | iid_uniform");
    sub->add_option("--replicates", o.values["replicates"], "seeds per (n, eps)");
    sub->add_option("--L", o.values["L"], "spectral truncation degree");
}

ExperimentConfig build_config(ExperimentKind kind, const Overrides& o)
{
    ExperimentConfig cfg = ExperimentConfig::defaults(kind);
    if (!o.config.empty()) {
        cfg = load_config(o.config, cfg);
        cfg.kind = kind;
    }
    for (const auto& [key, value] : o.values) {
        if (!value.empty()) {
            apply_setting(cfg, key, value);
        }
    }
    if (cfg.out_dir.empty()) {
        cfg.out_dir = "results/" + to_string(kind);
    }
    cfg.validate();
    return cfg;
}

template <class Records>
std::vector<std::pair<std::string, double>> timings(const Records& records)
{
    std::vector<std::pair<std::string, double>> out;
    for (const auto& r : records) {
        out.emplace_back(r.key.id, r.wall_seconds);
    }
    return out;
}

int dispatch(const ExperimentConfig& cfg, std::ostream& out)
{
    const std::filesystem::path dir = cfg.out_dir;
    switch (cfg.kind) {
    case ExperimentKind::Constants: {
        const auto json = constants_json(diffusion_constant(cfg.kernel));
        out << json << "\n";
        break;
    }
    case ExperimentKind::Generate: {
        const auto graphs = run_generate(cfg);
        write_generate(dir, cfg, graphs);
        write_meta(dir, cfg, {});
        out << "wrote " << graphs.size() << " graph(s) to " << dir.string() << "\n";
        break;
    }
    case ExperimentKind::Simulate:
    case ExperimentKind::Solar: {
        const auto rec = cfg.kind == ExperimentKind::Solar ? run_solar_time(cfg) : run_simulation(cfg);
        write_simulation(dir, cfg, rec);
        write_meta(dir, cfg, {{rec.key.id, rec.wall_seconds}});
        out << rec.key.id << ": connected=" << rec.report.connected
            << " final_diameter=" << format_real(rec.report.final_diameter)
            << " synchronized=" << rec.report.synchronized << "\n";
        break;
    }
    case ExperimentKind::Heat: {
        const auto result = run_heat(cfg);
        write_heat(dir, cfg, result);
        std::vector<std::pair<std::string, double>> t;
        for (const auto& row : result.rows) {
            t.emplace_back("eps=" + format_real(row.eps), row.wall_seconds);
            out << "eps=" << format_real(row.eps) << " sup_gap_sine=" << format_real(row.sup_gap_sine)
                << " sup_gap_identity=" << format_real(row.sup_gap_identity) << "\n";
        }
        write_meta(dir, cfg, t);
        break;
    }
    case ExperimentKind::OperatorTest: {
        const auto report = run_operator_test(cfg);
        write_operator_test(dir, cfg, report);
        write_meta(dir, cfg, {});
        for (std::size_t i = 0; i < report.eps.size(); ++i) {
            out << "eps=" << format_real(report.eps[i]) << " sup_error=" << format_real(report.sup_errors[i]) << "\n";
        }
        out << "slope=" << format_real(report.slope) << " monotone=" << report.monotone_decreasing << "\n";
        break;
    }
    case ExperimentKind::Scaling: {
        const auto result = run_scaling_limit(cfg);
        write_scaling(dir, cfg, result);
        write_meta(dir, cfg, timings(result.runs));
        for (const auto& [n, med] : result.medians) {
            out << "n=" << n << " median_sup_error=" << format_real(med) << "\n";
        }
        break;
    }
    case ExperimentKind::Sync: {
        const auto result = run_sync_probability(cfg);
        write_sync(dir, cfg, result);
        write_meta(dir, cfg, timings(result.runs));
        for (const auto& s : result.summary) {
            out << "n=" << s.n << " eps=" << format_real(s.eps) << " sync_fraction=" << format_real(s.fraction())
                << " (" << s.synchronized << "/" << s.runs << ")\n";
        }
        break;
    }
    case ExperimentKind::Degrees: {
        const auto records = run_degree_connectivity(cfg);
        write_degrees(dir, cfg, records);
        write_meta(dir, cfg, timings(records));
        std::size_t connected = 0;
        for (const auto& r : records) {
            connected += r.connected ? 1 : 0;
        }
        out << records.size() << " run(s), " << connected << " connected\n";
        break;
    }
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Kuramoto oscillators on random geometric graphs over the sphere"};
    app.name("sphkura");
    app.require_subcommand(1);

    const std::vector<std::pair<ExperimentKind, std::string>> commands{
        {ExperimentKind::Generate, "sample points and build graphs"},
        {ExperimentKind::Simulate, "integrate one Kuramoto run"},
        {ExperimentKind::Heat, "heat oracle and integral-equation gap"},
        {ExperimentKind::OperatorTest, "nonlocal operator convergence sweep"},
        {ExperimentKind::Scaling, "scaling-limit error sweep"},
        {ExperimentKind::Sync, "synchronization probability sweep"},
        {ExperimentKind::Degrees, "degree concentration and connectivity"},
        {ExperimentKind::Solar, "solar-time initial condition"},
        {ExperimentKind::Constants, "diffusion constants of a kernel (JSON)"},
    };
    std::vector<Overrides> overrides(commands.size());
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        auto* sub = app.add_subcommand(to_string(commands[i].first), commands[i].second);
        add_common_flags(sub, overrides[i], commands[i].first != ExperimentKind::Constants);
        subs.push_back(sub);
    }

    if (args.empty()) {
        err << app.help();
        return kExitConfig;
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitConfig;
    }

    try {
        for (std::size_t i = 0; i < commands.size(); ++i) {
            if (subs[i]->parsed()) {
                return dispatch(build_config(commands[i].first, overrides[i]), out);
            }
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    err << app.help();
    return kExitConfig;
}

int cli_main(int argc, char** argv)
{
    std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace sphkura::cli
