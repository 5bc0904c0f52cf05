#include "atfrac/run_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace atfrac {

namespace fs = std::filesystem;

void write_energy_csv(std::ostream& out, const std::vector<EnergyRecord>& records) {
    out << kEnergyHeader << '\n' << std::setprecision(17);
    for (const auto& r : records) {
        out << r.step << ',' << r.t << ',' << r.elliptic << ',' << r.surface << ',' << r.total << ','
            << r.work_increment << ',' << r.work_cumulative << ',' << r.upper_bound << ',' << r.lower_bound << ','
            << r.am_sweeps << ',' << (r.competitor_accepted ? 1 : 0) << '\n';
    }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    return cells;
}

std::string padded(int step) {
    std::ostringstream s;
    s << std::setw(4) << std::setfill('0') << step;
    return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace

std::vector<EnergyRecord> read_energy_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kEnergyHeader) throw InvalidArgument("energy.csv: unexpected header");
    std::vector<EnergyRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c = split_csv(line);
        if (c.size() != 11) throw InvalidArgument("energy.csv: malformed row '" + line + "'");
        EnergyRecord r;
        r.step = std::stoi(c[0]);
        r.t = std::stod(c[1]);
        r.elliptic = std::stod(c[2]);
        r.surface = std::stod(c[3]);
        r.total = std::stod(c[4]);
        r.work_increment = std::stod(c[5]);
        r.work_cumulative = std::stod(c[6]);
        r.upper_bound = std::stod(c[7]);
        r.lower_bound = std::stod(c[8]);
        r.am_sweeps = std::stoi(c[9]);
        r.competitor_accepted = c[10] == "1";
        out.push_back(r);
    }
    return out;
}

void write_run_directory(const std::string& dir, const RunConfig& config, const Trajectory& traj) {
    const fs::path root(dir);
    fs::create_directories(root);
    RunConfig stored = config;
    stored.out_dir = dir;
    write_file(root / "config.cfg", write_config(stored));

    {
        std::ofstream out(root / "energy.csv");
        write_energy_csv(out, traj.records);
    }
    {
        std::ofstream out(root / "diagnostics.csv");
        out << "step,warm_start_energy,u_residual,v_kkt,lower_work_inc\n" << std::setprecision(17);
        for (size_t i = 0; i < traj.diagnostics.size(); ++i) {
            const auto& d = traj.diagnostics[i];
            out << i << ',' << d.warm_start_energy << ',' << d.u_residual << ',' << d.v_kkt << ','
                << d.lower_work_increment << '\n';
        }
    }
    {
        std::ofstream out(root / "v_history.txt");
        out << std::setprecision(17);
        for (size_t i = 0; i < traj.v.size(); ++i) {
            out << i;
            for (int n = 0; n < traj.v[i].size(); ++n) out << ' ' << traj.v[i][n];
            out << '\n';
        }
    }
    if (config.snapshot_every > 0) {
        for (size_t i = 0; i < traj.v.size(); ++i) {
            if (i % config.snapshot_every != 0 && i + 1 != traj.v.size()) continue;
            std::ofstream u_out(root / ("u_" + padded(static_cast<int>(i)) + ".txt"));
            write_field(u_out, traj.u[i]);
            std::ofstream v_out(root / ("v_" + padded(static_cast<int>(i)) + ".txt"));
            write_field(v_out, traj.v[i]);
        }
    }
}

AuditReport audit_run_directory(const std::string& dir) {
    const fs::path root(dir);
    AuditReport report;
    auto fail = [&](int step, const std::string& msg) { report.violations.push_back({step, msg}); };

    const RunConfig config = parse_config((root / "config.cfg").string());
    const GridPtr grid = make_grid(config);
    const ATParams params = make_params(config);

    std::ifstream energy_in(root / "energy.csv");
    if (!energy_in) throw InvalidArgument("audit: missing energy.csv in '" + dir + "'");
    const auto records = read_energy_csv(energy_in);
    report.steps = static_cast<int>(records.size());
    const int expected = step_count(params.delta) + 1;
    if (report.steps != expected) {
        std::ostringstream msg;
        msg << "energy.csv has " << report.steps << " rows, expected " << expected;
        fail(-1, msg.str());
    }

    for (size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const int step = r.step;
        const double scale = std::max(1.0, std::abs(r.total));
        if (std::abs(r.total - (r.elliptic + r.surface)) > 1e-12 * scale)
            fail(step, "total energy differs from elliptic + surface");
        if (r.elliptic < 0.0 || r.surface < 0.0) fail(step, "negative energy component");
        if (r.total > r.upper_bound + 1e-12 * std::max(1.0, std::abs(r.upper_bound)))
            fail(step, "energy exceeds the iterated upper bound");
        if (r.total < r.lower_bound - 1e-12 * std::max(1.0, std::abs(r.lower_bound))) {
            std::ostringstream msg;
            msg << "step " << step << ": energy below the balance lower bound (surrogate; alternating minimization "
                << "is not a global minimizer)";
            report.warnings.push_back(msg.str());
        }
        if (i > 0 && r.surface < records[i - 1].surface - 1e-8) fail(step, "surface energy decreased");
    }

    std::ifstream diag_in(root / "diagnostics.csv");
    if (!diag_in) throw InvalidArgument("audit: missing diagnostics.csv in '" + dir + "'");
    std::string line;
    std::getline(diag_in, line);
    for (int row = 0; std::getline(diag_in, line); ++row) {
        if (line.empty()) continue;
        const auto c = split_csv(line);
        if (c.size() != 5) throw InvalidArgument("diagnostics.csv: malformed row '" + line + "'");
        const int step = std::stoi(c[0]);
        const double warm = std::stod(c[1]);
        const double u_res = std::stod(c[2]);
        const double v_kkt = std::stod(c[3]);
        if (step >= static_cast<int>(records.size())) {
            fail(step, "diagnostics row without energy record");
            continue;
        }
        if (step > 0 && records[step].total > warm + 1e-12)
            fail(step, "energy exceeds the warm-start energy F(u_i + dg, v_i)");
        if (!(u_res <= kResidualSlack * params.tol_lin)) {
            std::ostringstream msg;
            msg << "displacement residual " << u_res << " above tolerance";
            fail(step, msg.str());
        }
        if (!(v_kkt <= kKktSlack * std::sqrt(params.tol_am))) {
            std::ostringstream msg;
            msg << "phase projected gradient " << v_kkt << " above tolerance";
            fail(step, msg.str());
        }
    }

    std::ifstream hist(root / "v_history.txt");
    if (!hist) throw InvalidArgument("audit: missing v_history.txt in '" + dir + "'");
    Vector prev;
    int rows = 0;
    while (std::getline(hist, line)) {
        if (line.empty()) continue;
        std::istringstream in(line);
        int step = 0;
        in >> step;
        Vector v(grid->node_count());
        for (int n = 0; n < grid->node_count(); ++n) {
            if (!(in >> v[n])) {
                fail(step, "v_history row is truncated");
                return report;
            }
        }
        for (int n = 0; n < grid->node_count(); ++n) {
            if (!(v[n] >= 0.0 && v[n] <= 1.0)) {
                std::ostringstream msg;
                msg << "phase field " << v[n] << " outside [0, 1] at node " << n;
                fail(step, msg.str());
                break;
            }
            if (grid->is_dirichlet(n) && v[n] != 1.0) {
                fail(step, "phase field differs from 1 on the Dirichlet boundary");
                break;
            }
        }
        if (prev.size() == v.size()) {
            for (int n = 0; n < v.size(); ++n) {
                if (v[n] > prev[n]) {
                    std::ostringstream msg;
                    msg << "irreversibility violated: v increased at node " << n << " (" << prev[n] << " -> " << v[n]
                        << ")";
                    fail(step, msg.str());
                    break;
                }
            }
        }
        prev = std::move(v);
        ++rows;
    }
    if (rows != report.steps) fail(-1, "v_history.txt and energy.csv disagree on the step count");
    return report;
}

}  // namespace atfrac
