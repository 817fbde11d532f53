#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypres/config.hpp"
#include "hypres/errors.hpp"
#include "hypres/model_quantum.hpp"

namespace hypres {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kManifestVersion = 1;

struct RunManifest {
    std::string config_hash;
    nlohmann::json versions;
    nlohmann::json config;
    std::filesystem::path output_dir;
    // output key -> file name inside output_dir
    std::map<std::string, std::string> outputs;
    std::map<std::string, double> wall_times;
    std::string status = "complete";
    std::string failed_stage;
    std::string error;
    // scalar summaries: comparison max_err, lattice size, g_ell ...
    nlohmann::json summary = nlohmann::json::object();

    std::filesystem::path path_of(const std::string& key) const;
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
RunManifest load_manifest(const std::filesystem::path& path);

// Raised by run_pipeline with the original error nested inside.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

// orbit -> floquet -> action -> [calibrate] -> bs -> [oracle, compare].
// Writes manifest.json into the output directory, also when a stage fails.
RunManifest run_pipeline(const RunConfig& config);

// Re-parses every referenced file and checks that re-serializing gives the
// same content. Throws DependencyError / SchemaError otherwise.
void verify_manifest(const RunManifest& manifest);

// (Re z, Im z) scatter files for the lattice and oracle, plus a |det| grid
// for the model system. Adds the files to the manifest and rewrites it.
std::vector<std::filesystem::path> emit_plot_data(RunManifest& manifest);

// columns: re_z, im_z, abs_det
std::string det_scan_csv(const ModelSpec& spec, double re_min, double re_max, double im_min,
                         double im_max, int n_re, int n_im, int k_max);

}  // namespace hypres
