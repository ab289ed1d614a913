#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "elc/diagnostics.hpp"
#include "elc/solver.hpp"

namespace elc {

/// Fields read back from an ELC1 snapshot file.
struct Snapshot {
    TorusGrid grid{2, 8};
    double t = 0.0;
    struct Entry {
        std::string name;
        int components = 0;
        RealBuffer values;  // component-major, like GridField
    };
    std::vector<Entry> fields;

    /// Throws DataError when the field is missing or is not a grid vector field.
    VectorField field(const std::string& name) const;
};

/// One JSON header line, then little-endian float64 arrays field by field, points in
/// row-major order with components interleaved.
void write_snapshot(const std::filesystem::path& path, const State& s);
Snapshot read_snapshot(const std::filesystem::path& path);

LeslieCoefficients coefficients_from_json(const nlohmann::json& j);
/// Relative file paths inside the config resolve against `base_dir`.
RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json read_json_file(const std::filesystem::path& path);
RunConfig load_run_config(const std::filesystem::path& path);

extern const char* const csv_header;
std::string csv_row(const EnergyReport& r);
std::string energy_csv(const std::vector<EnergyReport>& reports);

/// Writes `content` atomically enough for our purposes; throws IoError naming the path.
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace elc
