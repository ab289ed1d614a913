#include "elc/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "elc/errors.hpp"

namespace elc {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

using nlohmann::json;

VectorField Snapshot::field(const std::string& name) const {
    for (const auto& e : fields) {
        if (e.name != name) continue;
        if (e.components != grid.dim())
            throw DataError("snapshot field '" + name + "' has " + std::to_string(e.components) +
                            " components, expected " + std::to_string(grid.dim()));
        VectorField f(grid);
        std::ranges::copy(e.values, f.values().begin());
        return f;
    }
    throw DataError("snapshot has no field '" + name + "'");
}

void write_snapshot(const std::filesystem::path& path, const State& s) {
    const TorusGrid& g = s.grid();
    json header = {{"magic", "ELC1"},
                   {"dim", g.dim()},
                   {"n", g.n()},
                   {"length", g.length()},
                   {"t", s.t},
                   {"fields", json::array({json::array({"v", g.dim()}), json::array({"d", g.dim()})})}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open snapshot for writing: " + path.string());
    out << header.dump() << '\n';
    std::vector<double> row;
    for (const VectorField* f : {&s.v, &s.d}) {
        row.resize(g.points() * g.dim());
        for (std::size_t p = 0; p < g.points(); ++p)
            for (int c = 0; c < g.dim(); ++c) row[p * g.dim() + c] = f->comp(c)[p];
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
    if (!out) throw IoError("failed writing snapshot: " + path.string());
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open snapshot: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty snapshot file: " + path.string());
    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw DataError("snapshot " + path.string() + ": bad header: " + e.what());
    }
    Snapshot snap;
    try {
        if (header.at("magic") != "ELC1") throw DataError("snapshot " + path.string() + ": bad magic");
        snap.grid = TorusGrid(header.at("dim").get<int>(), header.at("n").get<int>(), header.value("length", 1.0));
        snap.t = header.at("t").get<double>();
        for (const auto& f : header.at("fields")) {
            Snapshot::Entry e;
            e.name = f.at(0).get<std::string>();
            e.components = f.at(1).get<int>();
            if (e.components < 1 || e.components > 9) throw DataError("snapshot " + path.string() + ": bad component count");
            snap.fields.push_back(std::move(e));
        }
    } catch (const json::exception& e) {
        throw DataError("snapshot " + path.string() + ": malformed header: " + e.what());
    }
    const std::size_t np = snap.grid.points();
    std::vector<double> row;
    for (auto& e : snap.fields) {
        row.resize(np * e.components);
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
        if (!in) throw IoError("snapshot " + path.string() + ": truncated data for field '" + e.name + "'");
        e.values.resize(row.size());
        for (std::size_t p = 0; p < np; ++p)
            for (int c = 0; c < e.components; ++c) e.values[c * np + p] = row[p * e.components + c];
    }
    return snap;
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.contains(it.key())) throw UsageError("unknown key '" + it.key() + "' in " + where);
}

Vec3 vec3(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() < 2 || j.size() > 3) throw UsageError(what + " must be an array of 2 or 3 numbers");
    Vec3 v{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

InitSpec init_from_json(const json& j, const RunConfig& cfg, const std::filesystem::path& base) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "taylor_green") {
        reject_unknown(j, {"type", "amplitude", "wavenumber", "director"}, "init");
        init::TaylorGreen tg;
        tg.amplitude = j.value("amplitude", 1.0);
        tg.wavenumber = j.value("wavenumber", 1);
        if (j.contains("director")) tg.director = vec3(j["director"], "init.director");
        return tg;
    }
    if (type == "random_smooth") {
        reject_unknown(j, {"type", "seed", "band", "velocity_amplitude", "director_amplitude", "director_base"}, "init");
        init::RandomSmooth r;
        r.seed = j.value("seed", std::uint64_t{0});
        r.band = j.value("band", 2);
        r.velocity_amplitude = j.value("velocity_amplitude", 0.1);
        r.director_amplitude = j.value("director_amplitude", 0.1);
        if (j.contains("director_base")) r.director_base = vec3(j["director_base"], "init.director_base");
        return r;
    }
    if (type == "unstable_mode") {
        reject_unknown(j, {"type", "epsilon_leslie", "m", "phi", "amplitude"}, "init");
        LeslieUnstableParams params{cfg.mu, j.at("epsilon_leslie").get<double>()};
        const double theta0 = solve_theta0_unstable(params);
        const auto [nu, n] = in_plane_geometry(theta0, j.value("phi", 0.0));
        init::ConstantDirectorPerturbed c;
        c.mode = unstable_mode(params, j.at("m").get<double>(), nu, n);
        c.n = n;
        c.amplitude = j.value("amplitude", 1e-4);
        return c;
    }
    if (type == "constant_director_perturbed") {
        reject_unknown(j, {"type", "n", "nu", "m", "a", "b", "amplitude"}, "init");
        init::ConstantDirectorPerturbed c;
        c.n = vec3(j.at("n"), "init.n");
        c.mode.n = c.n;
        c.mode.nu = vec3(j.at("nu"), "init.nu");
        c.mode.m = j.at("m").get<double>();
        c.mode.a = j.contains("a") ? vec3(j["a"], "init.a") : Vec3{0.0, 0.0, 0.0};
        c.mode.b = vec3(j.at("b"), "init.b");
        double s = 0.0;
        for (int i = 0; i < 3; ++i) s += c.mode.nu[i] * c.n[i];
        c.mode.theta = std::asin(std::clamp(s, -1.0, 1.0));
        c.amplitude = j.value("amplitude", 1e-4);
        return c;
    }
    if (type == "file") {
        reject_unknown(j, {"type", "path"}, "init");
        std::filesystem::path p = j.at("path").get<std::string>();
        if (p.is_relative() && !base.empty()) p = base / p;
        return init::FromFile{p.string()};
    }
    throw UsageError("unknown init type '" + type + "'");
}

}  // namespace

LeslieCoefficients coefficients_from_json(const json& j) {
    try {
        LeslieCoefficients mu;
        const json& m = j.at("mu");
        if (m.is_array()) {
            if (m.size() != 6) throw UsageError("mu must list six Leslie coefficients");
            std::array<double, 6> a{};
            for (int i = 0; i < 6; ++i) a[i] = m[i].get<double>();
            mu = LeslieCoefficients::from_array(a);
        } else {
            reject_unknown(m, {"mu1", "mu2", "mu3", "mu4", "mu5", "mu6"}, "mu");
            mu.mu1 = m.value("mu1", 0.0);
            mu.mu2 = m.value("mu2", 0.0);
            mu.mu3 = m.value("mu3", 0.0);
            mu.mu4 = m.value("mu4", 0.0);
            mu.mu5 = m.value("mu5", 0.0);
            mu.mu6 = m.value("mu6", 0.0);
        }
        mu.eps_penalty = j.value("eps_penalty", 1.0);
        return mu;
    } catch (const json::exception& e) {
        throw UsageError(std::string("bad coefficient specification: ") + e.what());
    }
}

RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir) {
    try {
        reject_unknown(j,
                       {"grid", "mu", "eps_penalty", "dt", "t_end", "init", "output", "dealias", "mode_cutoff",
                        "freeze_director"},
                       "config");
        RunConfig cfg;
        const json& g = j.at("grid");
        reject_unknown(g, {"dim", "n", "length"}, "grid");
        double length = 1.0;
        if (g.contains("length")) {
            if (g["length"].is_string()) {
                const std::string s = g["length"].get<std::string>();
                if (s != "pi" && s != "2pi") throw UsageError("grid.length must be a number, \"pi\" or \"2pi\"");
                length = (s == "pi" ? 1.0 : 2.0) * std::numbers::pi;
            } else {
                length = g["length"].get<double>();
            }
        }
        cfg.grid = TorusGrid(g.value("dim", 2), g.value("n", 32), length);
        cfg.mu = coefficients_from_json(j);
        cfg.dt = j.at("dt").get<double>();
        cfg.t_end = j.at("t_end").get<double>();
        if (j.contains("output")) {
            reject_unknown(j["output"], {"every", "snapshot_every"}, "output");
            cfg.output.sample_every = j["output"].value("every", 1L);
            cfg.output.snapshot_every = j["output"].value("snapshot_every", 0L);
        }
        cfg.dealias = j.value("dealias", true);
        if (j.contains("mode_cutoff") && !j["mode_cutoff"].is_null()) cfg.mode_cutoff = j["mode_cutoff"].get<int>();
        cfg.freeze_director = j.value("freeze_director", false);
        cfg.init = init_from_json(j.at("init"), cfg, base_dir);
        return cfg;
    } catch (const json::exception& e) {
        throw UsageError(std::string("bad run configuration: ") + e.what());
    }
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw UsageError(path.string() + ": invalid JSON: " + e.what());
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    const json j = read_json_file(path);
    try {
        return run_config_from_json(j, path.parent_path());
    } catch (const UsageError& e) {
        throw UsageError(path.string() + ": " + e.what());
    }
}

const char* const csv_header =
    "t,E_total,E_kin,E_grad,E_penalty,A,diss_mu1,diss_mu4,diss_director,diss_Ad,law_residual";

std::string csv_row(const EnergyReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.t, r.E_total,
                  r.E_kin, r.E_grad, r.E_penalty, r.A, r.diss_mu1, r.diss_mu4, r.diss_director, r.diss_Ad,
                  r.law_residual);
    return buf;
}

std::string energy_csv(const std::vector<EnergyReport>& reports) {
    std::string out = csv_header;
    out += '\n';
    for (const auto& r : reports) {
        out += csv_row(r);
        out += '\n';
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw IoError("failed writing: " + path.string());
}

}  // namespace elc
