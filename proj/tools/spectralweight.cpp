#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sw/errors.hpp"
#include "sw/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
    std::string config_path;
    bool seed_set = false;
    std::uint64_t seed = 0;
};

sw::PipelineConfig resolve_config(const CommonFlags& flags) {
    sw::PipelineConfig config;
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) throw sw::ValidationError("cannot open config: " + flags.config_path);
        std::ostringstream os;
        os << in.rdbuf();
        config.apply_json(os.str());
    }
    if (flags.seed_set) config.seed = flags.seed;
    config.check();
    return config;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file overlaying the defaults");
    cmd->add_option("--seed", flags.seed, "Override the config seed")
        ->each([&flags](const std::string&) { flags.seed_set = true; });
}

std::string default_dict_path(const std::string& features_path) {
    fs::path p(features_path);
    p.replace_extension(".dict.json");
    return p.string();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SpectralWeight: spectral graph wavelet shape features and PLS weight "
                 "prediction for scanned meshes"};
    app.require_subcommand(1);

    // extract
    auto* extract = app.add_subcommand(
        "extract", "Compute the feature matrix and dictionary for a dataset manifest");
    CommonFlags extract_flags;
    std::string extract_manifest, extract_out, extract_dict_out, extract_cache;
    bool extract_skip_bad = false, extract_verbose = false;
    extract->add_option("--manifest", extract_manifest, "Dataset manifest CSV")->required();
    extract->add_option("--out", extract_out, "Output feature CSV")->required();
    extract->add_option("--dictionary-out", extract_dict_out,
                        "Dictionary JSON path (default: <out>.dict.json)");
    extract->add_option("--cache-dir", extract_cache, "Reuse per-mesh binary caches here");
    extract->add_flag("--skip-bad", extract_skip_bad,
                      "Skip meshes failing validation instead of aborting");
    extract->add_flag("--verbose", extract_verbose, "Print per-run cache statistics");
    add_common(extract, extract_flags);

    // train
    auto* train = app.add_subcommand("train", "Fit a PLS model from an extracted feature CSV");
    CommonFlags train_flags;
    std::string train_features, train_dict, train_target, train_out;
    train->add_option("--features", train_features, "Feature CSV from extract")->required();
    train->add_option("--dictionary", train_dict,
                      "Dictionary JSON from extract (default: <features>.dict.json)");
    train->add_option("--target", train_target, "Target column name")->required();
    train->add_option("--out", train_out, "Output model bundle JSON")->required();
    add_common(train, train_flags);

    // evaluate
    auto* evaluate =
        app.add_subcommand("evaluate", "Leave-one-out cross-validation over a manifest");
    CommonFlags eval_flags;
    std::string eval_manifest, eval_target, eval_cache, eval_out;
    bool eval_skip_bad = false, eval_shared = false, eval_verbose = false;
    evaluate->add_option("--manifest", eval_manifest, "Dataset manifest CSV")->required();
    evaluate->add_option("--target", eval_target, "Target column name")->required();
    evaluate->add_option("--cache-dir", eval_cache, "Reuse per-mesh binary caches here");
    evaluate->add_option("--out", eval_out, "Write the evaluation report JSON here");
    evaluate->add_flag("--skip-bad", eval_skip_bad,
                       "Skip meshes failing validation instead of aborting");
    evaluate->add_flag("--shared-dictionary", eval_shared,
                       "Learn one dictionary on all meshes instead of per fold");
    evaluate->add_flag("--verbose", eval_verbose, "Print per-fold predictions");
    add_common(evaluate, eval_flags);

    // predict
    auto* predict = app.add_subcommand("predict", "Predict a cut weight for one mesh");
    CommonFlags predict_flags;
    std::string predict_model, predict_mesh, predict_cache;
    double predict_weight = 0.0;
    bool predict_verbose = false;
    predict->add_option("--model", predict_model, "Model bundle JSON from train")->required();
    predict->add_option("--mesh", predict_mesh, "OBJ mesh to score")->required();
    predict->add_option("--weight", predict_weight, "Half-carcass weight covariate (kg)")
        ->required();
    predict->add_option("--cache-dir", predict_cache, "Reuse per-mesh binary caches here");
    predict->add_flag("--verbose", predict_verbose, "Print the assembled feature vector");
    add_common(predict, predict_flags);

    // synth
    auto* synth = app.add_subcommand(
        "synth", "Generate a synthetic ellipsoid dataset with known targets");
    CommonFlags synth_flags;
    std::string synth_out;
    int synth_n = 0, synth_subdiv = 4;
    double synth_noise = 0.0;
    synth->add_option("--n", synth_n, "Number of meshes (>= 4)")->required();
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--noise", synth_noise, "Relative target noise level");
    synth->add_option("--subdivisions", synth_subdiv, "Icosphere subdivisions (1-6)");
    add_common(synth, synth_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*extract) {
            sw::PipelineConfig config = resolve_config(extract_flags);
            sw::DatasetManifest manifest = sw::DatasetManifest::load(extract_manifest);
            sw::ExtractOptions options;
            options.cache_dir = extract_cache;
            options.skip_bad = extract_skip_bad;
            sw::ExtractResult result = sw::cmd_extract(manifest, config, options);
            sw::write_feature_table(result, extract_out);
            std::string dict_path =
                extract_dict_out.empty() ? default_dict_path(extract_out) : extract_dict_out;
            std::ofstream dict_out(dict_path, std::ios::binary);
            if (!dict_out) throw sw::ValidationError("cannot write dictionary: " + dict_path);
            dict_out << result.dictionary.to_json();
            for (const auto& s : result.skipped) {
                std::cerr << "skipped " << s << "\n";
            }
            std::cout << "features: " << extract_out << " (" << result.mesh_paths.size()
                      << " x " << result.features.cols() << ")\n";
            std::cout << "dictionary: " << dict_path << "\n";
            if (extract_verbose || result.cache_hits > 0) {
                std::cout << "cache hits: " << result.cache_hits << "\n";
            }
        } else if (*train) {
            sw::PipelineConfig config = resolve_config(train_flags);
            sw::FeatureTable table = sw::read_feature_table(train_features);
            std::string dict_path =
                train_dict.empty() ? default_dict_path(train_features) : train_dict;
            std::ifstream dict_in(dict_path, std::ios::binary);
            if (!dict_in) throw sw::ValidationError("cannot open dictionary: " + dict_path);
            std::ostringstream os;
            os << dict_in.rdbuf();
            sw::Dictionary dictionary = sw::Dictionary::from_json(os.str());
            sw::ModelBundle bundle = sw::cmd_train(table, dictionary, train_target, config);
            bundle.save(train_out);
            std::cout << "model: " << train_out << " (target " << train_target << ", "
                      << bundle.pls.n_components << " components)\n";
        } else if (*evaluate) {
            sw::PipelineConfig config = resolve_config(eval_flags);
            sw::DatasetManifest manifest = sw::DatasetManifest::load(eval_manifest);
            sw::EvaluateOptions options;
            options.cache_dir = eval_cache;
            options.skip_bad = eval_skip_bad;
            options.shared_dictionary = eval_shared;
            sw::EvalReport report = sw::cmd_evaluate(manifest, eval_target, config, options);
            std::cout << sw::report_table_header() << "\n"
                      << sw::format_report_row(eval_target, report) << "\n";
            if (eval_verbose) {
                for (size_t i = 0; i < report.folds.size(); ++i) {
                    std::printf("fold %3zu: y=%.4f yhat=%.4f\n", i, report.folds[i].first,
                                report.folds[i].second);
                }
            }
            if (!eval_out.empty()) {
                std::ofstream out(eval_out, std::ios::binary);
                if (!out) throw sw::ValidationError("cannot write report: " + eval_out);
                out << report.to_json();
            }
        } else if (*predict) {
            sw::PipelineConfig config = resolve_config(predict_flags);
            (void)config;  // prediction runs under the bundle's config snapshot
            sw::ModelBundle bundle = sw::ModelBundle::load(predict_model);
            sw::PredictDiagnostics diag;
            double value = sw::cmd_predict(bundle, predict_mesh, predict_weight,
                                           predict_cache, &diag);
            if (predict_verbose) {
                for (size_t i = 0; i < diag.feature_names.size(); ++i) {
                    std::printf("%-24s %.6g\n", diag.feature_names[i].c_str(),
                                diag.features[static_cast<Eigen::Index>(i)]);
                }
            }
            std::printf("%s: %.6f kg\n", bundle.target_name.c_str(), value);
        } else if (*synth) {
            sw::PipelineConfig config = resolve_config(synth_flags);
            sw::SynthOptions options;
            options.count = synth_n;
            options.seed = config.seed;
            options.noise_rel = synth_noise;
            options.subdivisions = synth_subdiv;
            options.out_dir = synth_out;
            std::string manifest_path = sw::cmd_synth(options);
            std::cout << "manifest: " << manifest_path << "\n";
        }
    } catch (const sw::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const sw::ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sw::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sw::StructuralError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const sw::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
