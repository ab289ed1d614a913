#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>

#include <unistd.h>

#include "elc/errors.hpp"
#include "elc/io.hpp"

using namespace elc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("elc_test_io_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

json base_config() {
    return json::parse(R"({
        "grid": {"dim": 2, "n": 16, "length": 1},
        "mu": [0.0, -0.5, 0.5, 1.0, 0.2, 0.2],
        "dt": 1e-3, "t_end": 0.01,
        "init": {"type": "random_smooth", "seed": 3, "band": 1}
    })");
}

}  // namespace

TEST(Snapshot, RoundTripIsBitExact) {
    RunConfig cfg = run_config_from_json(base_config());
    State s = initial_state(cfg);
    s.t = 0.125;
    const fs::path p = scratch("rt.elc1");
    write_snapshot(p, s);
    const Snapshot snap = read_snapshot(p);
    EXPECT_EQ(snap.grid.n(), 16);
    EXPECT_EQ(snap.grid.dim(), 2);
    EXPECT_EQ(snap.t, 0.125);
    const VectorField v = snap.field("v"), d = snap.field("d");
    ASSERT_EQ(v.values().size(), s.v.values().size());
    for (std::size_t i = 0; i < v.values().size(); ++i) {
        EXPECT_EQ(v.values()[i], s.v.values()[i]);
        EXPECT_EQ(d.values()[i], s.d.values()[i]);
    }
    EXPECT_THROW(snap.field("p"), DataError);
}

TEST(Snapshot, FileInitRestoresState) {
    const RunConfig cfg = run_config_from_json(base_config());
    const State s = initial_state(cfg);
    const fs::path p = scratch("init.elc1");
    write_snapshot(p, s);
    json j = base_config();
    j["init"] = {{"type", "file"}, {"path", p.filename().string()}};
    const RunConfig restored = run_config_from_json(j, p.parent_path());
    const State r = initial_state(restored);
    for (std::size_t i = 0; i < s.d.values().size(); ++i) EXPECT_NEAR(r.d.values()[i], s.d.values()[i], 1e-15);
}

TEST(Snapshot, Errors) {
    EXPECT_THROW(read_snapshot(scratch("missing.elc1")), IoError);
    {
        std::ofstream out(scratch("bad.elc1"));
        out << R"({"magic": "NOPE", "dim": 2, "n": 8, "t": 0, "fields": []})" << '\n';
    }
    EXPECT_THROW(read_snapshot(scratch("bad.elc1")), DataError);
    {
        std::ofstream out(scratch("short.elc1"));
        out << R"({"magic": "ELC1", "dim": 2, "n": 8, "t": 0, "fields": [["v", 2]]})" << '\n' << "abc";
    }
    EXPECT_THROW(read_snapshot(scratch("short.elc1")), IoError);
    {
        std::ofstream out(scratch("garbage.elc1"));
        out << "not json\n";
    }
    EXPECT_THROW(read_snapshot(scratch("garbage.elc1")), DataError);
}

TEST(Config, ParsesFields) {
    json j = base_config();
    j["grid"]["length"] = "pi";
    j["mode_cutoff"] = 4;
    j["freeze_director"] = true;
    j["output"] = {{"every", 5}, {"snapshot_every", 10}};
    const RunConfig cfg = run_config_from_json(j);
    EXPECT_DOUBLE_EQ(cfg.grid.length(), std::numbers::pi);
    ASSERT_TRUE(cfg.mode_cutoff);
    EXPECT_EQ(*cfg.mode_cutoff, 4);
    EXPECT_TRUE(cfg.freeze_director);
    EXPECT_EQ(cfg.output.sample_every, 5);
    EXPECT_EQ(cfg.output.snapshot_every, 10);
    EXPECT_DOUBLE_EQ(cfg.mu.mu4, 1.0);
}

TEST(Config, NamedCoefficients) {
    json j = base_config();
    j["mu"] = {{"mu4", 0.1}};
    j["eps_penalty"] = 0.5;
    const RunConfig cfg = run_config_from_json(j);
    EXPECT_DOUBLE_EQ(cfg.mu.mu4, 0.1);
    EXPECT_DOUBLE_EQ(cfg.mu.mu2, 0.0);
    EXPECT_DOUBLE_EQ(cfg.mu.eps_penalty, 0.5);
}

TEST(Config, RejectsMistakes) {
    json j = base_config();
    j["tend"] = 1.0;
    EXPECT_THROW(run_config_from_json(j), UsageError);
    j = base_config();
    j["grid"]["length"] = "tau";
    EXPECT_THROW(run_config_from_json(j), UsageError);
    j = base_config();
    j["mu"] = {1, 2, 3};
    EXPECT_THROW(run_config_from_json(j), UsageError);
    j = base_config();
    j.erase("dt");
    EXPECT_THROW(run_config_from_json(j), UsageError);
    j = base_config();
    j["init"]["type"] = "vortex";
    EXPECT_THROW(run_config_from_json(j), UsageError);
    j = base_config();
    j["init"]["colour"] = 1;
    EXPECT_THROW(run_config_from_json(j), UsageError);
}

TEST(Config, UnstableModeInit) {
    const RunConfig cfg = load_run_config(fs::path(ELC_SOURCE_DIR) / "configs" / "unstable_mode.json");
    const auto* u = std::get_if<init::ConstantDirectorPerturbed>(&cfg.init);
    ASSERT_NE(u, nullptr);
    EXPECT_NEAR(u->mode.growth_rate, 0.4725, 1e-12);
    EXPECT_DOUBLE_EQ(cfg.grid.length(), std::numbers::pi);
}

TEST(Config, FileErrors) {
    EXPECT_THROW(load_run_config(scratch("nothing.json")), IoError);
    {
        std::ofstream out(scratch("broken.json"));
        out << "{ \"grid\": ";
    }
    EXPECT_THROW(load_run_config(scratch("broken.json")), UsageError);
}

TEST(Csv, HeaderAndRows) {
    EnergyReport r;
    r.t = 0.5;
    r.E_total = 1.0 / 3.0;
    const std::string csv = energy_csv({r, r});
    EXPECT_EQ(csv.substr(0, csv.find('\n')), csv_header);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_NE(csv.find("0.33333333333333331"), std::string::npos);
    EXPECT_THROW(write_text_file(scratch("no_dir") / "x" / "y.csv", csv), IoError);
}
