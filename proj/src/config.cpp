#include "atfrac/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace atfrac {

namespace pt = boost::property_tree;

bool RunConfig::operator==(const RunConfig& o) const {
    auto same_notch = [](const std::optional<Notch>& a, const std::optional<Notch>& b) {
        if (a.has_value() != b.has_value()) return false;
        return !a || (a->site == b->site && a->value == b->value && a->half_width == b->half_width);
    };
    return dim == o.dim && extent == o.extent && cells == o.cells && dirichlet == o.dirichlet &&
           schedule_kind == o.schedule_kind && rate == o.rate && table == o.table && profile == o.profile &&
           eps == o.eps && eta == o.eta && delta == o.delta && tol_am == o.tol_am && tol_lin == o.tol_lin &&
           tol_qp == o.tol_qp && max_sweeps == o.max_sweeps && competitor == o.competitor &&
           crack_site == o.crack_site && same_notch(notch, o.notch) && threshold == o.threshold &&
           out_dir == o.out_dir && snapshot_every == o.snapshot_every;
}

namespace {

const std::set<std::string> kKnownKeys = {
    "grid.dim",          "grid.extent",        "grid.cells",          "grid.dirichlet",
    "schedule.kind",     "schedule.rate",      "schedule.table",      "schedule.profile",
    "params.eps",        "params.eta",         "params.delta",        "params.tol_am",
    "params.tol_lin",    "params.tol_qp",      "params.max_sweeps",   "strategy.competitor",
    "strategy.crack_site", "strategy.notch_site", "strategy.notch_value", "strategy.notch_width",
    "strategy.threshold", "output.dir",        "output.snapshot_every"};

std::vector<std::string> words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

double to_double(const std::string& key, const std::string& s) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InvalidArgument("config: '" + key + "' expects a number, got '" + s + "'");
    }
}

int to_int(const std::string& key, const std::string& s) {
    const double v = to_double(key, s);
    if (v != std::floor(v)) throw InvalidArgument("config: '" + key + "' expects an integer, got '" + s + "'");
    return static_cast<int>(v);
}

std::vector<double> to_doubles(const std::string& key, const std::string& s) {
    std::vector<double> out;
    for (const auto& w : words(s)) out.push_back(to_double(key, w));
    if (out.empty()) throw InvalidArgument("config: '" + key + "' is empty");
    return out;
}

bool to_bool(const std::string& key, const std::string& s) {
    if (s == "on" || s == "true" || s == "yes" || s == "1") return true;
    if (s == "off" || s == "false" || s == "no" || s == "0") return false;
    throw InvalidArgument("config: '" + key + "' expects on/off, got '" + s + "'");
}

std::string fmt(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

double derived_h(const RunConfig& c) { return c.eps.front() / 5.0; }

std::array<int, 2> derived_cells(const RunConfig& c) {
    const double h = derived_h(c);
    std::array<int, 2> cells{0, 0};
    for (int d = 0; d < c.dim; ++d) cells[d] = std::max(2, static_cast<int>(std::ceil(c.extent[d] / h - 1e-9)));
    return cells;
}

void validate(RunConfig& c) {
    if (c.dim != 1 && c.dim != 2) throw InvalidArgument("config: dim must be 1 or 2");
    if (c.eps.empty()) throw InvalidArgument("config: missing required key 'params.eps'");
    for (double e : c.eps)
        if (!(e > 0.0)) throw InvalidArgument("config: eps must be positive");
    for (int d = 0; d < c.dim; ++d)
        if (!(c.extent[d] > 0.0)) throw InvalidArgument("config: extent must be positive");
    if (c.cells)
        for (int d = 0; d < c.dim; ++d)
            if ((*c.cells)[d] < 1) throw InvalidArgument("config: cells must be positive");
    if (c.eta) {
        if (!(*c.eta > 0.0)) throw InvalidArgument("config: eta must be positive");
        for (double e : c.eps) {
            if (*c.eta >= e) {
                std::ostringstream msg;
                msg << "config: eta (" << *c.eta << ") >= eps (" << e << ") violates 0 < eta << eps";
                throw InvalidArgument(msg.str());
            }
        }
    }
    if (c.delta && !(*c.delta > 0.0 && *c.delta <= 1.0)) throw InvalidArgument("config: delta must lie in (0, 1]");
    if (c.schedule_kind != "ramp" && c.schedule_kind != "table")
        throw InvalidArgument("config: schedule kind must be 'ramp' or 'table'");
    if (c.schedule_kind == "table" && c.table.size() < 2)
        throw InvalidArgument("config: table schedule needs at least two knots");
    if (c.profile == ProfileKind::AntiplaneY && c.dim != 2)
        throw InvalidArgument("config: antiplane_y profile needs dim = 2");
    if (!(c.threshold > 0.0 && c.threshold < 1.0)) throw InvalidArgument("config: threshold must lie in (0, 1)");
    if (c.competitor && !c.crack_site) throw InvalidArgument("config: competitor on but no crack_site");
    if (c.snapshot_every < 0) throw InvalidArgument("config: snapshot_every must be >= 0");

    c.warnings.clear();
    for (double e : c.eps) {
        for (int d = 0; d < c.dim; ++d) {
            const double h = c.cells ? c.extent[d] / (*c.cells)[d] : e / 5.0;
            if (h >= e) {
                std::ostringstream msg;
                msg << "warning: h = " << h << " >= eps = " << e << " on axis " << d << " (under-resolved)";
                c.warnings.push_back(msg.str());
            }
        }
    }
}

RunConfig from_tree(const pt::ptree& tree) {
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw InvalidArgument("config: key '" + section + "' outside of a section");
        for (const auto& [key, value] : body) {
            (void)value;
            if (!kKnownKeys.count(section + "." + key))
                throw InvalidArgument("config: unknown key '" + section + "." + key + "'");
        }
    }
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(key)) return *v;
        return std::nullopt;
    };
    auto required = [&](const std::string& key) {
        auto v = get(key);
        if (!v || v->empty()) throw InvalidArgument("config: missing required key '" + key + "'");
        return *v;
    };

    RunConfig c;
    c.dim = to_int("grid.dim", required("grid.dim"));
    const auto ext = to_doubles("grid.extent", required("grid.extent"));
    if (static_cast<int>(ext.size()) != c.dim) throw InvalidArgument("config: extent needs one value per axis");
    c.extent = {ext[0], c.dim == 2 ? ext[1] : 1.0};
    if (auto v = get("grid.cells")) {
        const auto cells = to_doubles("grid.cells", *v);
        if (static_cast<int>(cells.size()) != c.dim) throw InvalidArgument("config: cells needs one value per axis");
        c.cells = std::array<int, 2>{to_int("grid.cells", fmt(cells[0])), c.dim == 2 ? to_int("grid.cells", fmt(cells[1])) : 0};
    }
    if (auto v = get("grid.dirichlet")) {
        for (const auto& w : words(*v)) c.dirichlet.push_back(parse_face(w));
    } else if (c.dim == 1) {
        c.dirichlet = {Face::Left, Face::Right};
    } else {
        c.dirichlet = {Face::Bottom, Face::Top};
    }

    c.schedule_kind = required("schedule.kind");
    if (auto v = get("schedule.rate")) c.rate = to_double("schedule.rate", *v);
    if (auto v = get("schedule.table")) {
        for (const auto& w : words(*v)) {
            const auto colon = w.find(':');
            if (colon == std::string::npos) throw InvalidArgument("config: table entries are t:a, got '" + w + "'");
            c.table.emplace_back(to_double("schedule.table", w.substr(0, colon)),
                                 to_double("schedule.table", w.substr(colon + 1)));
        }
    }
    c.profile = c.dim == 2 ? ProfileKind::AntiplaneY : ProfileKind::LinearX;
    if (auto v = get("schedule.profile")) c.profile = parse_profile(*v);

    c.eps = to_doubles("params.eps", required("params.eps"));
    if (auto v = get("params.eta")) c.eta = to_double("params.eta", *v);
    if (auto v = get("params.delta")) c.delta = to_double("params.delta", *v);
    if (auto v = get("params.tol_am")) c.tol_am = to_double("params.tol_am", *v);
    if (auto v = get("params.tol_lin")) c.tol_lin = to_double("params.tol_lin", *v);
    if (auto v = get("params.tol_qp")) c.tol_qp = to_double("params.tol_qp", *v);
    if (auto v = get("params.max_sweeps")) c.max_sweeps = to_int("params.max_sweeps", *v);

    if (auto v = get("strategy.competitor")) c.competitor = to_bool("strategy.competitor", *v);
    if (auto v = get("strategy.crack_site")) c.crack_site = to_double("strategy.crack_site", *v);
    if (auto v = get("strategy.notch_site")) {
        Notch n;
        n.site = to_double("strategy.notch_site", *v);
        if (auto nv = get("strategy.notch_value")) n.value = to_double("strategy.notch_value", *nv);
        if (auto nw = get("strategy.notch_width")) n.half_width = to_double("strategy.notch_width", *nw);
        c.notch = n;
    } else if (get("strategy.notch_value") || get("strategy.notch_width")) {
        throw InvalidArgument("config: notch_value/notch_width given without notch_site");
    }
    if (auto v = get("strategy.threshold")) c.threshold = to_double("strategy.threshold", *v);

    if (auto v = get("output.dir")) c.out_dir = *v;
    if (auto v = get("output.snapshot_every")) c.snapshot_every = to_int("output.snapshot_every", *v);

    validate(c);
    return c;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    std::istringstream in(text);
    pt::ptree tree;
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    return from_tree(tree);
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("config: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string write_config(const RunConfig& c) {
    std::ostringstream out;
    out << "[grid]\n";
    out << "dim = " << c.dim << "\n";
    out << "extent = " << fmt(c.extent[0]);
    if (c.dim == 2) out << ' ' << fmt(c.extent[1]);
    out << "\n";
    if (c.cells) {
        out << "cells = " << (*c.cells)[0];
        if (c.dim == 2) out << ' ' << (*c.cells)[1];
        out << "\n";
    }
    out << "dirichlet =";
    for (Face f : c.dirichlet) out << ' ' << face_name(f);
    out << "\n\n[schedule]\n";
    out << "kind = " << c.schedule_kind << "\n";
    out << "rate = " << fmt(c.rate) << "\n";
    if (!c.table.empty()) {
        out << "table =";
        for (const auto& [t, a] : c.table) out << ' ' << fmt(t) << ':' << fmt(a);
        out << "\n";
    }
    out << "profile = " << profile_name(c.profile) << "\n\n[params]\n";
    out << "eps =";
    for (double e : c.eps) out << ' ' << fmt(e);
    out << "\n";
    if (c.eta) out << "eta = " << fmt(*c.eta) << "\n";
    if (c.delta) out << "delta = " << fmt(*c.delta) << "\n";
    if (c.tol_am) out << "tol_am = " << fmt(*c.tol_am) << "\n";
    out << "tol_lin = " << fmt(c.tol_lin) << "\n";
    out << "tol_qp = " << fmt(c.tol_qp) << "\n";
    out << "max_sweeps = " << c.max_sweeps << "\n\n[strategy]\n";
    out << "competitor = " << (c.competitor ? "on" : "off") << "\n";
    if (c.crack_site) out << "crack_site = " << fmt(*c.crack_site) << "\n";
    if (c.notch) {
        out << "notch_site = " << fmt(c.notch->site) << "\n";
        out << "notch_value = " << fmt(c.notch->value) << "\n";
        out << "notch_width = " << fmt(c.notch->half_width) << "\n";
    }
    out << "threshold = " << fmt(c.threshold) << "\n\n[output]\n";
    out << "dir = " << c.out_dir << "\n";
    out << "snapshot_every = " << c.snapshot_every << "\n";
    return out.str();
}

std::vector<RunConfig> expand_sweep(const RunConfig& config) {
    if (config.eps.empty()) throw InvalidArgument("sweep: empty eps list");
    std::vector<RunConfig> out;
    for (double e : config.eps) {
        RunConfig c = config;
        c.eps = {e};
        if (!c.cells) c.cells = derived_cells(c);
        if (!c.eta) c.eta = e * e / 10.0;
        if (!c.delta) c.delta = e / 2.0;
        std::ostringstream dir;
        dir << config.out_dir << "/eps_" << e;
        c.out_dir = dir.str();
        validate(c);
        out.push_back(std::move(c));
    }
    return out;
}

GridPtr make_grid(const RunConfig& c) {
    if (c.eps.size() != 1) throw InvalidArgument("config: a single run needs exactly one eps");
    const auto cells = c.cells ? *c.cells : derived_cells(c);
    return build_grid(c.dim, c.extent, cells, c.dirichlet);
}

ATParams make_params(const RunConfig& c) {
    if (c.eps.size() != 1) throw InvalidArgument("config: a single run needs exactly one eps");
    const double measure = c.dim == 2 ? c.extent[0] * c.extent[1] : c.extent[0];
    ATParams p = ATParams::with_defaults(c.eps.front(), measure);
    if (c.eta) p.eta = *c.eta;
    if (c.delta) p.delta = *c.delta;
    if (c.tol_am) p.tol_am = *c.tol_am;
    p.tol_lin = c.tol_lin;
    p.tol_qp = c.tol_qp;
    p.max_sweeps = c.max_sweeps;
    return p;
}

BoundarySchedule make_schedule(const RunConfig& c, const GridPtr& grid) {
    Field profile = make_profile(grid, c.profile);
    if (c.schedule_kind == "table") return BoundarySchedule(std::move(profile), c.table);
    return BoundarySchedule::ramp(std::move(profile), c.rate);
}

Strategy make_strategy(const RunConfig& c) {
    Strategy s;
    s.competitor = c.competitor;
    s.crack_site = c.crack_site;
    s.notch = c.notch;
    s.threshold = c.threshold;
    return s;
}

}  // namespace atfrac
