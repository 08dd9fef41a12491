#include "sw/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sw/eigensolver.hpp"
#include "sw/errors.hpp"
#include "sw/laplacian.hpp"
#include "sw/parallel.hpp"
#include "sw/primitives.hpp"
#include "sw/sgws.hpp"
#include "sw/simplify.hpp"

namespace fs = std::filesystem;

namespace sw {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_csv_double(const std::string& field, const std::string& context) {
    try {
        size_t pos = 0;
        double v = std::stod(field, &pos);
        if (pos != field.size() || !std::isfinite(v)) throw std::invalid_argument(field);
        return v;
    } catch (const std::exception&) {
        throw ParseError(context + ": bad numeric field '" + field + "'");
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write file: " + path);
    out << text;
}

double normal01(std::mt19937_64& rng) {
    auto uniform01 = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
    double u1 = uniform01();
    double u2 = uniform01();
    u1 = std::max(u1, 1e-300);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::vector<std::string> feature_column_names(int k) {
    std::vector<std::string> names;
    names.reserve(k + 3);
    for (int i = 0; i < k; ++i) {
        char buf[24];
        std::snprintf(buf, sizeof buf, "word_%03d", i);
        names.emplace_back(buf);
    }
    names.emplace_back("geodesic_diameter_cm");
    names.emplace_back("volume_cm3");
    names.emplace_back("carcass_weight_kg");
    return names;
}

// Signature + scalars for every manifest row (parallel across meshes);
// rows that fail validation either abort or land in `skipped`.
struct ProcessedSet {
    std::vector<int> kept_rows;
    std::vector<MeshFeatures> features;  // aligned with kept_rows
    std::vector<std::string> skipped;
    int cache_hits = 0;
};

ProcessedSet process_manifest(const DatasetManifest& manifest, const PipelineConfig& config,
                              const ExtractOptions& options) {
    const int n = manifest.size();
    std::vector<MeshFeatures> all(n);
    std::vector<std::string> failures(n);
    parallel_for(n, [&](int i) {
        try {
            all[i] = process_mesh(manifest.rows[i].resolved_path, config, options.cache_dir);
        } catch (const std::exception& e) {
            failures[i] = e.what();
            if (failures[i].empty()) failures[i] = "unknown error";
        }
    });

    ProcessedSet out;
    for (int i = 0; i < n; ++i) {
        if (failures[i].empty()) {
            out.kept_rows.push_back(i);
            out.cache_hits += (all[i].eig_cache_hit ? 1 : 0) + (all[i].sig_cache_hit ? 1 : 0);
            out.features.push_back(std::move(all[i]));
        } else {
            out.skipped.push_back(manifest.rows[i].mesh_path + ": " + failures[i]);
        }
    }
    if (!out.skipped.empty() && !options.skip_bad) {
        std::string msg = "mesh processing failed:";
        for (const auto& s : out.skipped) msg += "\n  " + s;
        throw ValidationError(msg);
    }
    return out;
}

Eigen::MatrixXd concat_signatures(const std::vector<MeshFeatures>& feats,
                                  const std::vector<int>& which) {
    if (which.empty()) throw ArgumentError("no signatures to concatenate");
    const int p = static_cast<int>(feats[which[0]].signature.rows());
    Eigen::Index total = 0;
    for (int i : which) total += feats[i].signature.cols();
    Eigen::MatrixXd out(p, total);
    Eigen::Index at = 0;
    for (int i : which) {
        out.middleCols(at, feats[i].signature.cols()) = feats[i].signature;
        at += feats[i].signature.cols();
    }
    return out;
}

Eigen::VectorXd encode_mesh(const MeshFeatures& mf, const Dictionary& dict,
                            double carcass_weight) {
    Eigen::MatrixXd codes = soft_assign(mf.signature, dict);
    Eigen::VectorXd hist = pool(codes);
    return assemble_features(hist, mf.geodesic_diameter, mf.volume, carcass_weight);
}

}  // namespace

void PipelineConfig::check() const {
    if (target_vertices < 4) throw ArgumentError("config: target_vertices must be >= 4");
    if (eig_count < 1) throw ArgumentError("config: eig_count must be >= 1");
    if (resolution < 1) throw ArgumentError("config: resolution must be >= 1");
    int p = resolution * (resolution + 3) / 2;
    if (dictionary_k <= p) {
        throw ArgumentError("config: dictionary_k must exceed the signature dimension " +
                            std::to_string(p));
    }
    if (sigma_rule != "mean-nearest") {
        throw ArgumentError("config: unknown sigma_rule '" + sigma_rule + "'");
    }
    if (pls_components < 1) throw ArgumentError("config: pls_components must be >= 1");
}

std::string PipelineConfig::to_json() const {
    nlohmann::json j;
    j["target_vertices"] = target_vertices;
    j["eig_count"] = eig_count;
    j["resolution"] = resolution;
    j["dictionary_k"] = dictionary_k;
    j["sigma_rule"] = sigma_rule;
    j["pls_components"] = pls_components;
    j["seed"] = seed;
    return j.dump();
}

void PipelineConfig::apply_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config JSON: ") + e.what());
    }
    static const std::set<std::string> known = {
        "target_vertices", "eig_count",      "resolution", "dictionary_k",
        "sigma_rule",      "pls_components", "seed"};
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) throw ParseError("config JSON: unknown key '" + key + "'");
        (void)value;
    }
    if (j.contains("target_vertices")) target_vertices = j["target_vertices"].get<int>();
    if (j.contains("eig_count")) eig_count = j["eig_count"].get<int>();
    if (j.contains("resolution")) resolution = j["resolution"].get<int>();
    if (j.contains("dictionary_k")) dictionary_k = j["dictionary_k"].get<int>();
    if (j.contains("sigma_rule")) sigma_rule = j["sigma_rule"].get<std::string>();
    if (j.contains("pls_components")) pls_components = j["pls_components"].get<int>();
    if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
    check();
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
    PipelineConfig c;
    c.apply_json(text);
    return c;
}

DatasetManifest DatasetManifest::load(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw ValidationError("cannot open manifest: " + csv_path);
    const fs::path base = fs::path(csv_path).parent_path();

    DatasetManifest manifest;
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw ParseError("manifest: empty file");
    ++line_no;
    auto header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "mesh_path" || header[1] != "carcass_weight_kg") {
        throw ParseError("manifest: header must start with mesh_path,carcass_weight_kg "
                         "followed by at least one target column");
    }
    manifest.target_names.assign(header.begin() + 2, header.end());

    std::set<std::string> seen_paths;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        const std::string ctx = "manifest row " + std::to_string(line_no);
        if (fields.size() != header.size()) {
            throw ParseError(ctx + ": expected " + std::to_string(header.size()) +
                             " fields, got " + std::to_string(fields.size()));
        }
        ManifestRow row;
        row.mesh_path = fields[0];
        if (row.mesh_path.empty()) throw ValidationError(ctx + ": empty mesh path");
        if (!seen_paths.insert(row.mesh_path).second) {
            throw ValidationError(ctx + ": duplicate mesh path '" + row.mesh_path + "'");
        }
        fs::path p(row.mesh_path);
        row.resolved_path = p.is_absolute() ? row.mesh_path : (base / p).string();
        if (!fs::exists(row.resolved_path)) {
            throw ValidationError(ctx + ": mesh file not found: " + row.mesh_path);
        }
        row.carcass_weight = parse_csv_double(fields[1], ctx);
        if (!(row.carcass_weight > 0.0)) {
            throw ValidationError(ctx + ": carcass weight must be positive");
        }
        for (size_t t = 2; t < fields.size(); ++t) {
            row.targets.push_back(parse_csv_double(fields[t], ctx));
        }
        manifest.rows.push_back(std::move(row));
    }
    return manifest;
}

int DatasetManifest::target_index(const std::string& name) const {
    for (size_t i = 0; i < target_names.size(); ++i) {
        if (target_names[i] == name) return static_cast<int>(i);
    }
    return -1;
}

MeshFeatures process_mesh(const std::string& path, const PipelineConfig& config,
                          const std::string& cache_dir) {
    config.check();
    TriangleMesh mesh = load_obj_file(path);
    MeshReport report = validate(mesh);
    if (!report.ok()) {
        throw ValidationError(path + ": mesh failed validation (" + report.to_json() + ")");
    }

    MeshFeatures out;
    if (mesh.vertex_count() > config.target_vertices) {
        SimplifyResult simplified = simplify(mesh, config.target_vertices);
        out.reached_target = simplified.reached_target;
        mesh = std::move(simplified.mesh);
        MeshReport after = validate(mesh);
        if (!after.ok() || after.component_count != report.component_count) {
            throw NumericalError(path + ": simplification produced an invalid mesh");
        }
    }

    out.hash = content_hash(mesh);
    const int m = mesh.vertex_count();
    const int count = std::min(config.eig_count, m - 1);

    const bool caching = !cache_dir.empty();
    fs::path eig_path, sig_path;
    if (caching) {
        fs::create_directories(cache_dir);
        char stem[64];
        std::snprintf(stem, sizeof stem, "%016llx_%d",
                      static_cast<unsigned long long>(out.hash), count);
        eig_path = fs::path(cache_dir) / (std::string("eig_") + stem + ".swe");
        std::snprintf(stem, sizeof stem, "%016llx_%d_r%d",
                      static_cast<unsigned long long>(out.hash), count, config.resolution);
        sig_path = fs::path(cache_dir) / (std::string("sig_") + stem + ".sws");
    }

    EigenSystem eigs;
    if (caching && fs::exists(eig_path)) {
        eigs = load_eigensystem_file(eig_path.string());
        out.eig_cache_hit = true;
    } else {
        CotanLaplacian lap = build_laplacian(mesh);
        eigs = solve_eigs(lap, count);
        if (caching) save_eigensystem_file(eigs, eig_path.string());
    }

    if (caching && fs::exists(sig_path)) {
        out.signature = load_signature_file(sig_path.string());
        out.sig_cache_hit = true;
    } else {
        WaveletFilterBank bank =
            design_filter_bank(eigs.eigenvalues[eigs.count() - 1], config.resolution);
        out.signature = compute_signature(eigs, bank);
        if (caching) save_signature_file(out.signature, sig_path.string());
    }

    VolumeResult vol = volume(mesh);
    out.volume = vol.value;
    out.volume_watertight = vol.watertight;
    out.geodesic_diameter = geodesic_diameter(mesh);
    return out;
}

ExtractResult cmd_extract(const DatasetManifest& manifest, const PipelineConfig& config,
                          const ExtractOptions& options) {
    config.check();
    if (manifest.size() == 0) throw ValidationError("extract: manifest has no rows");

    ProcessedSet processed = process_manifest(manifest, config, options);
    if (processed.kept_rows.empty()) {
        throw ValidationError("extract: every mesh failed validation");
    }

    const int n = static_cast<int>(processed.kept_rows.size());
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    Eigen::MatrixXd training = concat_signatures(processed.features, all);

    ExtractResult result;
    result.dictionary = learn_dictionary(training, config.dictionary_k, config.seed);
    result.feature_names = feature_column_names(config.dictionary_k);
    result.target_names = manifest.target_names;
    result.cache_hits = processed.cache_hits;
    result.skipped = processed.skipped;
    result.features.resize(n, config.dictionary_k + 3);
    result.targets.resize(n, static_cast<Eigen::Index>(manifest.target_names.size()));
    result.mesh_paths.reserve(n);

    for (int i = 0; i < n; ++i) {
        const ManifestRow& row = manifest.rows[processed.kept_rows[i]];
        result.mesh_paths.push_back(row.mesh_path);
        result.features.row(i) =
            encode_mesh(processed.features[i], result.dictionary, row.carcass_weight)
                .transpose();
        for (size_t t = 0; t < row.targets.size(); ++t) {
            result.targets(i, static_cast<Eigen::Index>(t)) = row.targets[t];
        }
    }
    return result;
}

void write_feature_table(const ExtractResult& result, const std::string& csv_path) {
    std::ostringstream os;
    os << "mesh_path";
    for (const auto& name : result.feature_names) os << ',' << name;
    for (const auto& name : result.target_names) os << ',' << name;
    os << '\n';
    for (size_t i = 0; i < result.mesh_paths.size(); ++i) {
        os << result.mesh_paths[i];
        for (Eigen::Index j = 0; j < result.features.cols(); ++j) {
            os << ',' << fmt_double(result.features(static_cast<Eigen::Index>(i), j));
        }
        for (Eigen::Index j = 0; j < result.targets.cols(); ++j) {
            os << ',' << fmt_double(result.targets(static_cast<Eigen::Index>(i), j));
        }
        os << '\n';
    }
    write_text_file(csv_path, os.str());
}

FeatureTable read_feature_table(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw ValidationError("cannot open feature table: " + csv_path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("feature table: empty file");
    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "mesh_path") {
        throw ParseError("feature table: bad header");
    }
    // Feature block ends at carcass_weight_kg; targets follow.
    int split = -1;
    for (size_t i = 1; i < header.size(); ++i) {
        if (header[i] == "carcass_weight_kg") split = static_cast<int>(i);
    }
    if (split < 0) throw ParseError("feature table: missing carcass_weight_kg column");

    FeatureTable table;
    table.feature_names.assign(header.begin() + 1, header.begin() + split + 1);
    table.target_names.assign(header.begin() + split + 1, header.end());

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ParseError("feature table: ragged row with " +
                             std::to_string(fields.size()) + " fields");
        }
        table.mesh_paths.push_back(fields[0]);
        std::vector<double> vals;
        vals.reserve(fields.size() - 1);
        for (size_t i = 1; i < fields.size(); ++i) {
            vals.push_back(parse_csv_double(fields[i], "feature table"));
        }
        rows.push_back(std::move(vals));
    }
    const int n = static_cast<int>(rows.size());
    const int fcols = static_cast<int>(table.feature_names.size());
    const int tcols = static_cast<int>(table.target_names.size());
    table.features.resize(n, fcols);
    table.targets.resize(n, tcols);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < fcols; ++j) table.features(i, j) = rows[i][j];
        for (int j = 0; j < tcols; ++j) table.targets(i, j) = rows[i][fcols + j];
    }
    return table;
}

ModelBundle cmd_train(const FeatureTable& table, const Dictionary& dictionary,
                      const std::string& target_name, const PipelineConfig& config) {
    config.check();
    int t_idx = -1;
    for (size_t i = 0; i < table.target_names.size(); ++i) {
        if (table.target_names[i] == target_name) t_idx = static_cast<int>(i);
    }
    if (t_idx < 0) {
        throw ArgumentError("train: unknown target column '" + target_name + "'");
    }
    if (dictionary.word_count() + 3 != table.features.cols()) {
        throw ValidationError("train: dictionary size and feature table disagree (k=" +
                              std::to_string(dictionary.word_count()) + ", columns=" +
                              std::to_string(table.features.cols()) + ")");
    }
    if (dictionary.word_count() != config.dictionary_k) {
        throw ValidationError("train: dictionary k does not match config");
    }

    ModelBundle bundle;
    bundle.config = config;
    bundle.target_name = target_name;
    bundle.feature_names = table.feature_names;
    bundle.dictionary = dictionary;
    bundle.pls = fit_pls(table.features, table.targets.col(t_idx), config.pls_components);
    return bundle;
}

EvalReport cmd_evaluate(const DatasetManifest& manifest, const std::string& target_name,
                        const PipelineConfig& config, const EvaluateOptions& options) {
    config.check();
    const int t_idx = manifest.target_index(target_name);
    if (t_idx < 0) {
        throw ArgumentError("evaluate: unknown target column '" + target_name + "'");
    }

    ProcessedSet processed = process_manifest(manifest, config, options);
    const int n = static_cast<int>(processed.kept_rows.size());
    if (n < 4) throw ArgumentError("evaluate: need at least 4 usable meshes, have " +
                                   std::to_string(n));

    Eigen::VectorXd y(n);
    std::vector<double> weights(n);
    for (int i = 0; i < n; ++i) {
        const ManifestRow& row = manifest.rows[processed.kept_rows[i]];
        y[i] = row.targets[t_idx];
        weights[i] = row.carcass_weight;
    }

    Dictionary shared;
    if (options.shared_dictionary) {
        std::vector<int> all(n);
        for (int i = 0; i < n; ++i) all[i] = i;
        shared = learn_dictionary(concat_signatures(processed.features, all),
                                  config.dictionary_k, config.seed);
    }

    Eigen::VectorXd y_hat(n);
    std::vector<std::string> fold_errors(n);
    parallel_for(n, [&](int fold) {
        try {
            std::vector<int> train_idx;
            train_idx.reserve(n - 1);
            for (int i = 0; i < n; ++i) {
                if (i != fold) train_idx.push_back(i);
            }
            const Dictionary& dict =
                options.shared_dictionary
                    ? shared
                    : learn_dictionary(concat_signatures(processed.features, train_idx),
                                       config.dictionary_k, config.seed);

            Eigen::MatrixXd x_train(n - 1, config.dictionary_k + 3);
            Eigen::VectorXd y_train(n - 1);
            for (int r = 0; r < n - 1; ++r) {
                int i = train_idx[r];
                x_train.row(r) = encode_mesh(processed.features[i], dict, weights[i]).transpose();
                y_train[r] = y[i];
            }
            PLSModel model = fit_pls(x_train, y_train, config.pls_components);
            y_hat[fold] =
                predict(model, encode_mesh(processed.features[fold], dict, weights[fold]));
        } catch (const std::exception& e) {
            fold_errors[fold] = e.what();
        }
    });
    for (int fold = 0; fold < n; ++fold) {
        if (!fold_errors[fold].empty()) {
            throw NumericalError("evaluate fold " + std::to_string(fold) + " (" +
                                 manifest.rows[processed.kept_rows[fold]].mesh_path +
                                 "): " + fold_errors[fold]);
        }
    }
    return metrics(y, y_hat);
}

double cmd_predict(const ModelBundle& bundle, const std::string& mesh_path,
                   double carcass_weight, const std::string& cache_dir,
                   PredictDiagnostics* diagnostics) {
    if (!(carcass_weight > 0.0) || !std::isfinite(carcass_weight)) {
        throw ArgumentError("predict: carcass weight must be positive");
    }
    if (bundle.dictionary.word_count() + 3 != bundle.pls.dimension() ||
        bundle.dictionary.word_count() != bundle.config.dictionary_k ||
        static_cast<int>(bundle.feature_names.size()) != bundle.pls.dimension()) {
        throw ValidationError("predict: bundle violates the feature-order contract");
    }
    MeshFeatures mf = process_mesh(mesh_path, bundle.config, cache_dir);
    Eigen::VectorXd features = encode_mesh(mf, bundle.dictionary, carcass_weight);
    double prediction = predict(bundle.pls, features);
    if (diagnostics) {
        diagnostics->features = features;
        diagnostics->feature_names = bundle.feature_names;
        diagnostics->prediction = prediction;
    }
    return prediction;
}

std::string ModelBundle::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["target"] = target_name;
    j["config"] = nlohmann::json::parse(config.to_json());
    j["feature_columns"] = feature_names;
    j["dictionary"] = nlohmann::json::parse(dictionary.to_json());
    j["pls"] = nlohmann::json::parse(pls.to_json());
    return j.dump();
}

ModelBundle ModelBundle::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model bundle JSON: ") + e.what());
    }
    if (!j.contains("version") || j["version"].get<int>() != 1) {
        throw ParseError("model bundle JSON: unsupported version");
    }
    ModelBundle b;
    try {
        b.target_name = j.at("target").get<std::string>();
        b.config = PipelineConfig::from_json(j.at("config").dump());
        b.feature_names = j.at("feature_columns").get<std::vector<std::string>>();
        b.dictionary = Dictionary::from_json(j.at("dictionary").dump());
        b.pls = PLSModel::from_json(j.at("pls").dump());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model bundle JSON: ") + e.what());
    }
    return b;
}

ModelBundle ModelBundle::load(const std::string& path) {
    return from_json(read_text_file(path));
}

void ModelBundle::save(const std::string& path) const { write_text_file(path, to_json()); }

std::string cmd_synth(const SynthOptions& options) {
    if (options.count < 4) throw ArgumentError("synth: need at least 4 meshes");
    if (options.subdivisions < 1 || options.subdivisions > 6) {
        throw ArgumentError("synth: subdivisions must be in [1, 6]");
    }
    if (options.noise_rel < 0.0) throw ArgumentError("synth: noise must be nonnegative");
    fs::create_directories(options.out_dir);

    const TriangleMesh base = make_icosphere(options.subdivisions);
    std::mt19937_64 rng(options.seed);
    auto uniform01 = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };

    std::ostringstream manifest;
    manifest << "mesh_path,carcass_weight_kg,target_kg\n";

    for (int i = 0; i < options.count; ++i) {
        const double ax = 14.0 + 6.0 * uniform01();
        const double ay = 10.0 + 5.0 * uniform01();
        const double az = 24.0 + 12.0 * uniform01();

        // A few smooth radial bumps keep the shapes from being exact
        // ellipsoids.
        const int n_bumps = 3;
        Eigen::Vector3d bump_dir[n_bumps];
        double bump_amp[n_bumps], bump_width[n_bumps];
        for (int b = 0; b < n_bumps; ++b) {
            double z = 2.0 * uniform01() - 1.0;
            double phi = 2.0 * M_PI * uniform01();
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            bump_dir[b] = Eigen::Vector3d(r * std::cos(phi), r * std::sin(phi), z);
            bump_amp[b] = 0.01 + 0.03 * uniform01();
            bump_width[b] = 0.3 + 0.3 * uniform01();
        }
        const double noise_z = normal01(rng);

        TriangleMesh mesh = base;
        for (auto& v : mesh.vertices) {
            Eigen::Vector3d u = v.normalized();
            double f = 1.0;
            for (int b = 0; b < n_bumps; ++b) {
                double ang = std::acos(std::clamp(u.dot(bump_dir[b]), -1.0, 1.0));
                double ratio = ang / bump_width[b];
                f += bump_amp[b] * std::exp(-ratio * ratio);
            }
            v = Eigen::Vector3d(ax * f * u.x(), ay * f * u.y(), az * f * u.z());
        }

        const double vol = volume(mesh).value;
        const double max_axis = std::max({ax, ay, az});
        const double carcass_weight = 1.05e-3 * vol;
        double target = 0.8e-3 * vol + 0.15 * max_axis;
        target *= 1.0 + options.noise_rel * noise_z;

        char name[32];
        std::snprintf(name, sizeof name, "mesh_%03d.obj", i);
        save_obj_file(mesh, (fs::path(options.out_dir) / name).string());
        manifest << name << ',' << fmt_double(carcass_weight) << ',' << fmt_double(target)
                 << '\n';
    }

    const std::string manifest_path = (fs::path(options.out_dir) / "manifest.csv").string();
    write_text_file(manifest_path, manifest.str());
    return manifest_path;
}

}  // namespace sw
