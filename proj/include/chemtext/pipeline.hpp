#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "chemtext/cooc.hpp"
#include "chemtext/embedding.hpp"
#include "chemtext/glove.hpp"

namespace chemtext {

// Full-run configuration; everything has a default except the input
// locations and resource files.
struct RunConfig {
    std::uint64_t seed = 1;
    bool deterministic = true;
    std::filesystem::path out_dir = "out";

    struct Inputs {
        std::filesystem::path xml_dir;   // patent XML bundles (optional)
        std::filesystem::path text_dir;  // plain-text documents (optional)
        std::vector<std::string> classes = {"C06B", "149"};
        std::string venue;
    } inputs;

    struct Resources {
        std::filesystem::path lexicon;
        std::filesystem::path stopwords;
        std::filesystem::path application_words;
        std::filesystem::path stop_chemicals;  // optional
    } resources;

    struct Prep {
        int min_count = 5;
        bool drop_numeric = true;
    } prep;

    struct Cooc {
        int window = 8;
        std::string weighting = "inverse_distance";
        bool distinguish_sides = false;
    } cooc;

    TrainConfig w2v;      // defaults D=200, m=8, k=5, t=1e-4
    GloveConfig glove;    // defaults D=200, x_max=100, alpha=0.75

    struct Queries {
        std::vector<std::string> words = {"underwater", "air", "rocket"};
        int k = 5;
        std::map<std::string, std::vector<std::string>> groups;
        std::vector<std::string> pca_tokens;  // empty: lexicon tokens in vocabulary
        int pca_components = 2;
        int top_chemicals = 10;
        int app_words_per_chemical = 2;
    } queries;

    static RunConfig from_file(const std::filesystem::path& p);
    static RunConfig from_json_text(const std::string& text);

    // Canonical serialization of the semantically meaningful fields
    // (everything except out_dir); hashed into the manifest.
    std::string canonical_json() const;
    std::uint64_t config_hash() const;
};

// Every violated constraint as "field: problem"; empty means valid.
std::vector<std::string> validate_config(const RunConfig& cfg);

struct StageTiming {
    std::string stage;
    double seconds;
};

struct RunReport {
    std::filesystem::path out_dir;
    std::vector<StageTiming> timings;
    std::map<std::string, std::string> artifacts;  // name -> path
    std::uint64_t config_hash = 0;
    std::uint64_t corpus_hash = 0;
    std::size_t documents = 0;
    int vocabulary = 0;
    std::string status;  // complete | incomplete
};

struct PipelineError : std::runtime_error {
    PipelineError(const std::string& stage_, const std::string& what_)
        : std::runtime_error("stage '" + stage_ + "' failed: " + what_), stage(stage_) {}
    std::string stage;
};

// Runs ingest -> prep -> chem stats -> cooc -> both trainers -> all four
// report artifacts, writing a manifest with config/corpus hashes and stage
// timings. Aborts on the first stage failure (manifest marked incomplete).
RunReport run_pipeline(const RunConfig& cfg);

}  // namespace chemtext
