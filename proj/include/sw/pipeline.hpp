#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "sw/encoding.hpp"
#include "sw/mesh.hpp"
#include "sw/pls.hpp"

namespace sw {

struct PipelineConfig {
    int target_vertices = 3000;
    int eig_count = 301;
    int resolution = 2;
    int dictionary_k = 32;
    std::string sigma_rule = "mean-nearest";
    int pls_components = 4;
    std::uint64_t seed = 0;

    void check() const;
    std::string to_json() const;
    // Overlays the fields present in `text` onto the current values.
    void apply_json(const std::string& text);
    static PipelineConfig from_json(const std::string& text);
};

struct ManifestRow {
    std::string mesh_path;      // as written in the manifest
    std::string resolved_path;  // relative paths resolved against the manifest dir
    double carcass_weight = 0.0;
    std::vector<double> targets;
};

struct DatasetManifest {
    std::vector<std::string> target_names;
    std::vector<ManifestRow> rows;

    static DatasetManifest load(const std::string& csv_path);
    int target_index(const std::string& name) const;
    int size() const { return static_cast<int>(rows.size()); }
};

// Per-mesh pipeline product: signature plus global scalars.
struct MeshFeatures {
    Eigen::MatrixXd signature;  // p x m
    double geodesic_diameter = 0.0;
    double volume = 0.0;
    bool volume_watertight = true;
    bool reached_target = true;
    std::uint64_t hash = 0;
    bool eig_cache_hit = false;
    bool sig_cache_hit = false;
};

// Load -> validate -> simplify -> eigensolve -> signature, with binary
// caches under cache_dir when it is non-empty.
MeshFeatures process_mesh(const std::string& path, const PipelineConfig& config,
                          const std::string& cache_dir);

struct ExtractOptions {
    std::string cache_dir;  // empty disables caching
    bool skip_bad = false;
};

struct ExtractResult {
    std::vector<std::string> mesh_paths;  // manifest spelling, rows kept
    std::vector<std::string> feature_names;
    Eigen::MatrixXd features;  // n x (k+3)
    std::vector<std::string> target_names;
    Eigen::MatrixXd targets;  // n x T
    Dictionary dictionary;
    int cache_hits = 0;
    std::vector<std::string> skipped;  // "<path>: <reason>" for --skip-bad rows
};

ExtractResult cmd_extract(const DatasetManifest& manifest, const PipelineConfig& config,
                          const ExtractOptions& options);

void write_feature_table(const ExtractResult& result, const std::string& csv_path);

struct FeatureTable {
    std::vector<std::string> mesh_paths;
    std::vector<std::string> feature_names;
    Eigen::MatrixXd features;
    std::vector<std::string> target_names;
    Eigen::MatrixXd targets;
};

FeatureTable read_feature_table(const std::string& csv_path);

struct ModelBundle {
    PipelineConfig config;
    std::string target_name;
    std::vector<std::string> feature_names;
    Dictionary dictionary;
    PLSModel pls;

    std::string to_json() const;
    static ModelBundle from_json(const std::string& text);
    static ModelBundle load(const std::string& path);
    void save(const std::string& path) const;
};

ModelBundle cmd_train(const FeatureTable& table, const Dictionary& dictionary,
                      const std::string& target_name, const PipelineConfig& config);

struct EvaluateOptions : ExtractOptions {
    // Learn the dictionary once on all meshes instead of refitting inside
    // each fold (the leakier variant).
    bool shared_dictionary = false;
};

EvalReport cmd_evaluate(const DatasetManifest& manifest, const std::string& target_name,
                        const PipelineConfig& config, const EvaluateOptions& options);

struct PredictDiagnostics {
    Eigen::VectorXd features;
    std::vector<std::string> feature_names;
    double prediction = 0.0;
};

double cmd_predict(const ModelBundle& bundle, const std::string& mesh_path,
                   double carcass_weight, const std::string& cache_dir,
                   PredictDiagnostics* diagnostics = nullptr);

struct SynthOptions {
    int count = 0;
    std::uint64_t seed = 0;
    double noise_rel = 0.0;  // relative std of the multiplicative target noise
    int subdivisions = 4;    // icosphere base resolution
    std::string out_dir;
};

// Writes OBJ meshes plus manifest.csv; returns the manifest path.
std::string cmd_synth(const SynthOptions& options);

}  // namespace sw
