#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "atfrac/analysis.hpp"
#include "atfrac/config.hpp"
#include "atfrac/run_io.hpp"

namespace atfrac {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string directory;
    long seed = 0;  // nothing in the pipeline is random; accepted for test drivers
};

RunConfig load(const Options& opt) {
    RunConfig c = parse_config(opt.config);
    if (!opt.out.empty()) c.out_dir = opt.out;
    return c;
}

int report_audit(const std::string& dir, std::ostream& out, std::ostream& err) {
    const AuditReport report = audit_run_directory(dir);
    for (const auto& w : report.warnings) out << "warning: " << w << '\n';
    for (const auto& v : report.violations) {
        if (v.step >= 0) err << "step " << v.step << ": " << v.message << '\n';
        else err << v.message << '\n';
    }
    if (!report.ok()) return kInvariantViolation;
    out << dir << ": " << report.steps << " steps, all invariants hold\n";
    return kOk;
}

int do_run(const Options& opt, std::ostream& out, std::ostream& err) {
    RunConfig c = load(opt);
    if (c.eps.size() != 1) throw InvalidArgument("run: config lists several eps values; use sweep");
    const std::string dir = c.out_dir;
    c = expand_sweep(c).front();
    c.out_dir = dir;
    for (const auto& w : c.warnings) out << w << '\n';
    const GridPtr grid = make_grid(c);
    const Trajectory traj = run(grid, make_schedule(c, grid), make_params(c), make_strategy(c));
    write_run_directory(dir, c, traj);
    const auto ct = crack_time(traj, c.threshold);
    out << "wrote " << traj.records.size() << " steps to " << dir;
    if (ct) out << ", crack at t = " << *ct;
    out << '\n';
    return report_audit(dir, out, err);
}

int do_sweep(const Options& opt, std::ostream& out, std::ostream& err) {
    const RunConfig c = load(opt);
    int status = kOk;
    const auto rows = eps_sweep(c, c.eps, [&](const RunConfig& member, const Trajectory& traj) {
        write_run_directory(member.out_dir, member, traj);
        if (audit_run_directory(member.out_dir).ok()) return;
        status = report_audit(member.out_dir, out, err);
    });
    fs::create_directories(c.out_dir);
    const fs::path table = fs::path(c.out_dir) / "sweep.csv";
    std::ofstream file(table);
    if (!file) throw InvalidArgument("cannot write '" + table.string() + "'");
    write_sweep_csv(file, rows);
    write_sweep_csv(out, rows);
    return status;
}

int do_oracle(const Options& opt, std::ostream& out) {
    RunConfig c = load(opt);
    c.eps.resize(1);
    const ATParams params = make_params(expand_sweep(c).front());
    std::vector<double> times;
    for (int k = 0; k <= step_count(params.delta); ++k) times.push_back(k * params.delta);
    const OraclePath path = oracle_for(c, times);

    fs::create_directories(c.out_dir);
    const fs::path csv = fs::path(c.out_dir) / "oracle.csv";
    std::ofstream file(csv);
    if (!file) throw InvalidArgument("cannot write '" + csv.string() + "'");
    file << "t,energy,cracked\n" << std::setprecision(17);
    for (size_t k = 0; k < path.t.size(); ++k) {
        const bool cracked = path.crack_time && path.t[k] >= *path.crack_time;
        file << path.t[k] << ',' << path.energy[k] << ',' << (cracked ? 1 : 0) << '\n';
    }
    out << "wrote " << csv.string() << "; crack time ";
    if (path.crack_time) out << *path.crack_time;
    else out << "none";
    out << ", balance residual " << path.balance_residual << '\n';
    return kOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Time-discretized Ambrosio-Tortorelli fracture evolution"};
    app.require_subcommand(1);
    Options opt;

    auto* run_cmd = app.add_subcommand("run", "run one evolution and write its log directory");
    auto* sweep_cmd = app.add_subcommand("sweep", "run an eps sweep and write the convergence table");
    auto* oracle_cmd = app.add_subcommand("oracle", "write the sharp-interface energy path");
    auto* check_cmd = app.add_subcommand("check", "audit a completed run directory");
    for (auto* cmd : {run_cmd, sweep_cmd, oracle_cmd}) {
        cmd->add_option("--config", opt.config, "configuration file")->required()->check(CLI::ExistingFile);
        cmd->add_option("--out", opt.out, "output directory (overrides [output] dir)");
        cmd->add_option("--seed", opt.seed, "seed for randomized drivers");
    }
    check_cmd->add_option("dir", opt.directory, "run directory");
    check_cmd->add_option("--out", opt.out, "run directory");
    check_cmd->add_option("--seed", opt.seed, "seed for randomized drivers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*run_cmd) return do_run(opt, out, err);
        if (*sweep_cmd) return do_sweep(opt, out, err);
        if (*oracle_cmd) return do_oracle(opt, out);
        const std::string dir = !opt.directory.empty() ? opt.directory : opt.out;
        if (dir.empty()) {
            err << "usage error: check needs a run directory\n";
            return kUsage;
        }
        return report_audit(dir, out, err);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kSolverFailure;
    }
}

}  // namespace atfrac
