#include "chemtext/pipeline.hpp"

#include <chrono>
#include <fstream>

#include <nlohmann/json.hpp>

#include "chemtext/chemlex.hpp"
#include "chemtext/embedspace.hpp"
#include "chemtext/ingest.hpp"
#include "chemtext/sgns.hpp"

using json = nlohmann::json;

namespace chemtext {

namespace {

std::filesystem::path get_path(const json& j, const char* key) {
    return j.contains(key) ? std::filesystem::path(j.at(key).get<std::string>())
                           : std::filesystem::path();
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

RunConfig RunConfig::from_file(const std::filesystem::path& p) {
    return from_json_text(read_file(p));
}

RunConfig RunConfig::from_json_text(const std::string& text) {
    json j = json::parse(text);
    RunConfig cfg;
    cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
    cfg.deterministic = get_or<bool>(j, "deterministic", cfg.deterministic);
    if (j.contains("out_dir")) cfg.out_dir = get_path(j, "out_dir");

    if (j.contains("inputs")) {
        const json& in = j.at("inputs");
        cfg.inputs.xml_dir = get_path(in, "xml_dir");
        cfg.inputs.text_dir = get_path(in, "text_dir");
        cfg.inputs.classes = get_or<std::vector<std::string>>(in, "classes", cfg.inputs.classes);
        cfg.inputs.venue = get_or<std::string>(in, "venue", cfg.inputs.venue);
    }
    if (j.contains("resources")) {
        const json& r = j.at("resources");
        cfg.resources.lexicon = get_path(r, "lexicon");
        cfg.resources.stopwords = get_path(r, "stopwords");
        cfg.resources.application_words = get_path(r, "application_words");
        cfg.resources.stop_chemicals = get_path(r, "stop_chemicals");
    }
    if (j.contains("prep")) {
        const json& p = j.at("prep");
        cfg.prep.min_count = get_or<int>(p, "min_count", cfg.prep.min_count);
        cfg.prep.drop_numeric = get_or<bool>(p, "drop_numeric", cfg.prep.drop_numeric);
    }
    if (j.contains("cooc")) {
        const json& c = j.at("cooc");
        cfg.cooc.window = get_or<int>(c, "window", cfg.cooc.window);
        cfg.cooc.weighting = get_or<std::string>(c, "weighting", cfg.cooc.weighting);
        cfg.cooc.distinguish_sides = get_or<bool>(c, "distinguish_sides", cfg.cooc.distinguish_sides);
    }
    if (j.contains("w2v")) {
        const json& w = j.at("w2v");
        cfg.w2v.dim = get_or<int>(w, "dim", cfg.w2v.dim);
        cfg.w2v.window = get_or<int>(w, "window", cfg.w2v.window);
        cfg.w2v.epochs = get_or<int>(w, "epochs", cfg.w2v.epochs);
        cfg.w2v.learning_rate = get_or<double>(w, "learning_rate", cfg.w2v.learning_rate);
        cfg.w2v.negatives = get_or<int>(w, "negatives", cfg.w2v.negatives);
        cfg.w2v.subsample_t = get_or<double>(w, "subsample_t", cfg.w2v.subsample_t);
        cfg.w2v.shrink_window = get_or<bool>(w, "shrink_window", cfg.w2v.shrink_window);
        cfg.w2v.workers = get_or<int>(w, "workers", cfg.w2v.workers);
    }
    if (j.contains("glove")) {
        const json& g = j.at("glove");
        cfg.glove.dim = get_or<int>(g, "dim", cfg.glove.dim);
        cfg.glove.epochs = get_or<int>(g, "epochs", cfg.glove.epochs);
        cfg.glove.learning_rate = get_or<double>(g, "learning_rate", cfg.glove.learning_rate);
        cfg.glove.x_max = get_or<double>(g, "x_max", cfg.glove.x_max);
        cfg.glove.alpha = get_or<double>(g, "alpha", cfg.glove.alpha);
        cfg.glove.workers = get_or<int>(g, "workers", cfg.glove.workers);
        std::string opt = get_or<std::string>(g, "optimizer", "adagrad");
        cfg.glove.optimizer =
            opt == "sgd" ? GloveConfig::Optimizer::Sgd : GloveConfig::Optimizer::AdaGrad;
    }
    if (j.contains("queries")) {
        const json& q = j.at("queries");
        cfg.queries.words = get_or<std::vector<std::string>>(q, "words", cfg.queries.words);
        cfg.queries.k = get_or<int>(q, "k", cfg.queries.k);
        if (q.contains("groups")) {
            for (auto& [name, tokens] : q.at("groups").items())
                cfg.queries.groups[name] = tokens.get<std::vector<std::string>>();
        }
        cfg.queries.pca_tokens =
            get_or<std::vector<std::string>>(q, "pca_tokens", cfg.queries.pca_tokens);
        cfg.queries.pca_components = get_or<int>(q, "pca_components", cfg.queries.pca_components);
        cfg.queries.top_chemicals = get_or<int>(q, "top_chemicals", cfg.queries.top_chemicals);
        cfg.queries.app_words_per_chemical =
            get_or<int>(q, "app_words_per_chemical", cfg.queries.app_words_per_chemical);
    }
    return cfg;
}

std::string RunConfig::canonical_json() const {
    json groups = json::object();
    for (const auto& [name, tokens] : queries.groups) groups[name] = tokens;
    json j = {
        {"seed", seed},
        {"deterministic", deterministic},
        {"inputs",
         {{"xml_dir", inputs.xml_dir.string()},
          {"text_dir", inputs.text_dir.string()},
          {"classes", inputs.classes},
          {"venue", inputs.venue}}},
        {"resources",
         {{"lexicon", resources.lexicon.string()},
          {"stopwords", resources.stopwords.string()},
          {"application_words", resources.application_words.string()},
          {"stop_chemicals", resources.stop_chemicals.string()}}},
        {"prep", {{"min_count", prep.min_count}, {"drop_numeric", prep.drop_numeric}}},
        {"cooc",
         {{"window", cooc.window},
          {"weighting", cooc.weighting},
          {"distinguish_sides", cooc.distinguish_sides}}},
        {"w2v",
         {{"dim", w2v.dim},
          {"window", w2v.window},
          {"epochs", w2v.epochs},
          {"learning_rate", w2v.learning_rate},
          {"negatives", w2v.negatives},
          {"subsample_t", w2v.subsample_t},
          {"shrink_window", w2v.shrink_window},
          {"workers", w2v.workers}}},
        {"glove",
         {{"dim", glove.dim},
          {"epochs", glove.epochs},
          {"learning_rate", glove.learning_rate},
          {"x_max", glove.x_max},
          {"alpha", glove.alpha},
          {"optimizer", glove.optimizer == GloveConfig::Optimizer::Sgd ? "sgd" : "adagrad"},
          {"workers", glove.workers}}},
        {"queries",
         {{"words", queries.words},
          {"k", queries.k},
          {"groups", groups},
          {"pca_tokens", queries.pca_tokens},
          {"pca_components", queries.pca_components},
          {"top_chemicals", queries.top_chemicals},
          {"app_words_per_chemical", queries.app_words_per_chemical}}},
    };
    return j.dump();
}

std::uint64_t RunConfig::config_hash() const { return fnv1a64(canonical_json()); }

std::vector<std::string> validate_config(const RunConfig& cfg) {
    std::vector<std::string> errors;
    auto require = [&](bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    };
    namespace fs = std::filesystem;

    require(!cfg.inputs.xml_dir.empty() || !cfg.inputs.text_dir.empty(),
            "inputs: at least one of xml_dir or text_dir is required");
    if (!cfg.inputs.xml_dir.empty())
        require(fs::is_directory(cfg.inputs.xml_dir),
                "inputs.xml_dir: not a directory: " + cfg.inputs.xml_dir.string());
    if (!cfg.inputs.text_dir.empty())
        require(fs::is_directory(cfg.inputs.text_dir),
                "inputs.text_dir: not a directory: " + cfg.inputs.text_dir.string());

    require(!cfg.resources.lexicon.empty() && fs::exists(cfg.resources.lexicon),
            "resources.lexicon: file not found: " + cfg.resources.lexicon.string());
    require(!cfg.resources.stopwords.empty() && fs::exists(cfg.resources.stopwords),
            "resources.stopwords: file not found: " + cfg.resources.stopwords.string());
    require(!cfg.resources.application_words.empty() && fs::exists(cfg.resources.application_words),
            "resources.application_words: file not found: " + cfg.resources.application_words.string());
    if (!cfg.resources.stop_chemicals.empty())
        require(fs::exists(cfg.resources.stop_chemicals),
                "resources.stop_chemicals: file not found: " + cfg.resources.stop_chemicals.string());

    require(cfg.prep.min_count >= 1, "prep.min_count: must be >= 1");
    require(cfg.cooc.window >= 1, "cooc.window: must be >= 1");
    try {
        cooc_weighting_from_string(cfg.cooc.weighting);
    } catch (const std::exception&) {
        errors.push_back("cooc.weighting: unknown value '" + cfg.cooc.weighting + "'");
    }
    require(cfg.w2v.dim >= 1, "w2v.dim: must be >= 1");
    require(cfg.w2v.window >= 1, "w2v.window: must be >= 1");
    require(cfg.w2v.epochs >= 1, "w2v.epochs: must be >= 1");
    require(cfg.w2v.negatives >= 1, "w2v.negatives: must be >= 1");
    require(cfg.w2v.learning_rate > 0.0, "w2v.learning_rate: must be positive");
    require(cfg.w2v.subsample_t > 0.0 && cfg.w2v.subsample_t <= 1.0,
            "w2v.subsample_t: must be in (0, 1]");
    require(cfg.w2v.workers >= 1, "w2v.workers: must be >= 1");
    require(cfg.glove.dim >= 1, "glove.dim: must be >= 1");
    require(cfg.glove.epochs >= 1, "glove.epochs: must be >= 1");
    require(cfg.glove.learning_rate > 0.0, "glove.learning_rate: must be positive");
    require(cfg.glove.x_max > 0.0, "glove.x_max: must be positive");
    require(cfg.glove.alpha > 0.0, "glove.alpha: must be positive");
    require(cfg.glove.workers >= 1, "glove.workers: must be >= 1");
    require(cfg.queries.k >= 1, "queries.k: must be >= 1");
    require(cfg.queries.pca_components >= 1, "queries.pca_components: must be >= 1");
    return errors;
}

namespace {

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::vector<std::filesystem::path> sorted_files(const std::filesystem::path& dir,
                                                const std::string& ext) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ext)
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

// Query token for a lexicon entry: its highest-frequency in-vocabulary
// surface form (merged forms included).
std::string entry_query_token(const LexiconEntry& entry, const Vocabulary& vocab) {
    std::vector<std::string> candidates;
    candidates.push_back(ChemLexicon::merged_form(entry.canonical));
    for (const auto& s : entry.synonyms) candidates.push_back(ChemLexicon::merged_form(s));
    std::string best;
    std::int64_t best_count = -1;
    for (const auto& c : candidates) {
        int id = vocab.id(c);
        if (id >= 0 && vocab.count(id) > best_count) {
            best_count = vocab.count(id);
            best = c;
        }
    }
    return best;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

}  // namespace

RunReport run_pipeline(const RunConfig& user_cfg) {
    {
        auto errors = validate_config(user_cfg);
        if (!errors.empty()) throw PipelineError("validate", join(errors, "; "));
    }
    RunConfig cfg = user_cfg;
    if (cfg.deterministic) {
        cfg.w2v.workers = 1;
        cfg.glove.workers = 1;
    }
    cfg.w2v.seed = derive_seed(cfg.seed, "w2v");
    cfg.glove.seed = derive_seed(cfg.seed, "glove");

    const auto& out = cfg.out_dir;
    std::filesystem::create_directories(out);

    RunReport report;
    report.out_dir = out;
    report.config_hash = cfg.config_hash();
    report.status = "incomplete";

    json manifest;
    manifest["config_hash"] = hex64(report.config_hash);
    manifest["status"] = "incomplete";
    std::vector<std::string> ingest_warnings;

    auto write_manifest = [&] {
        std::ofstream mf(out / "manifest.json");
        mf << manifest.dump(2) << "\n";
    };

    std::string current_stage = "ingest";
    auto stage_done = [&](const std::string& name, const Timer& t) {
        report.timings.push_back({name, t.seconds()});
        manifest["stage_seconds"][name] = t.seconds();
    };

    try {
        // --- ingest ---
        Timer t_ingest;
        DocumentStore store;
        if (!cfg.inputs.xml_dir.empty()) {
            std::set<std::string> classes(cfg.inputs.classes.begin(), cfg.inputs.classes.end());
            for (const auto& file : sorted_files(cfg.inputs.xml_dir, ".xml")) {
                PatentParseResult parsed = parse_patent_xml(read_file(file));
                for (const auto& err : parsed.errors)
                    ingest_warnings.push_back(file.filename().string() + ": " + err);
                for (const auto& patent : parsed.patents) {
                    if (!classes.empty() && !filter_by_classification(patent, classes)) continue;
                    try {
                        store.add(document_from_patent(patent));
                    } catch (const std::exception& e) {
                        ingest_warnings.push_back(e.what());
                    }
                }
            }
        }
        if (!cfg.inputs.text_dir.empty()) {
            for (const auto& file : sorted_files(cfg.inputs.text_dir, ".txt")) {
                std::map<std::string, std::string> meta = {{"source_kind", "proceedings"}};
                if (!cfg.inputs.venue.empty()) meta["venue"] = cfg.inputs.venue;
                store.add(load_plain_text(file, meta));
            }
        }
        if (store.size() == 0) throw std::runtime_error("no documents ingested");
        store.save_jsonl(out / "store.jsonl");
        report.documents = store.size();
        manifest["documents"] = store.size();
        manifest["ingest_warnings"] = ingest_warnings;
        report.artifacts["store"] = (out / "store.jsonl").string();
        stage_done("ingest", t_ingest);

        // --- prep ---
        current_stage = "prep";
        Timer t_prep;
        ChemLexicon lexicon = ChemLexicon::load_tsv(cfg.resources.lexicon);
        CleaningConfig cleaning;
        cleaning.drop_numeric = cfg.prep.drop_numeric;
        cleaning.load_stopwords(cfg.resources.stopwords);

        std::vector<std::vector<std::string>> token_sentences;
        for (const auto& doc : store.documents()) {
            std::string cleaned = clean_text(doc.text, cleaning);
            std::string merged = merge_entities(cleaned, lexicon);
            for (const auto& sentence : segment_sentences(merged)) {
                auto tokens = tokenize(sentence, cleaning);
                if (!tokens.empty()) token_sentences.push_back(std::move(tokens));
            }
        }
        if (token_sentences.empty()) throw std::runtime_error("corpus is empty after preprocessing");
        Vocabulary vocab = build_vocabulary(token_sentences, cfg.prep.min_count);
        TokenizedCorpus corpus = encode_corpus(token_sentences, vocab);
        save_corpus_text(token_sentences, out / "corpus.txt");
        vocab.save_tsv(out / "vocab.tsv");
        report.corpus_hash = fnv1a64(read_file(out / "corpus.txt"));
        report.vocabulary = vocab.size();
        manifest["corpus_hash"] = hex64(report.corpus_hash);
        manifest["vocabulary"] = vocab.size();
        manifest["sentences"] = token_sentences.size();
        report.artifacts["corpus"] = (out / "corpus.txt").string();
        report.artifacts["vocab"] = (out / "vocab.tsv").string();
        stage_done("prep", t_prep);

        // --- chemical mention statistics ---
        current_stage = "chem_stats";
        Timer t_stats;
        std::unordered_set<std::string> stop_chems;
        if (!cfg.resources.stop_chemicals.empty()) {
            for (auto& line : read_lines(cfg.resources.stop_chemicals)) {
                std::string name = to_lower(trim(line));
                if (!name.empty() && name[0] != '#') stop_chems.insert(name);
            }
        }
        std::vector<MentionStat> stats = mention_stats(token_sentences, lexicon, stop_chems);
        stage_done("chem_stats", t_stats);

        // --- co-occurrence ---
        current_stage = "cooc";
        Timer t_cooc;
        CoocMatrix cooc_matrix = build_cooccurrence(
            corpus, static_cast<std::uint32_t>(vocab.size()), cfg.cooc.window,
            cooc_weighting_from_string(cfg.cooc.weighting), cfg.cooc.distinguish_sides);
        cooc_matrix.save(out / "cooc.bin");
        manifest["cooc_nonzeros"] = cooc_matrix.entries.size();
        report.artifacts["cooc"] = (out / "cooc.bin").string();
        stage_done("cooc", t_cooc);

        // --- word2vec ---
        current_stage = "train_w2v";
        Timer t_w2v;
        EmbeddingModel w2v = train_skipgram(corpus, vocab, cfg.w2v);
        save_model(w2v, out / "w2v.bin");
        save_model_text(w2v, out / "w2v.txt");
        report.artifacts["w2v"] = (out / "w2v.bin").string();
        stage_done("train_w2v", t_w2v);

        // --- glove ---
        current_stage = "train_glove";
        Timer t_glove;
        GloveModel glove_raw = train_glove(cooc_matrix, cfg.glove);
        EmbeddingModel glove = to_embedding_model(glove_raw, vocab, /*query_combined=*/true);
        save_model(glove, out / "glove.bin");
        save_model_text(glove, out / "glove.txt");
        report.artifacts["glove"] = (out / "glove.bin").string();
        stage_done("train_glove", t_glove);

        // --- report artifacts ---
        current_stage = "reports";
        Timer t_reports;
        std::vector<std::pair<std::string, const EmbeddingModel*>> models = {{"word2vec", &w2v},
                                                                             {"glove", &glove}};

        // group similarity matrix (Table 1 layout: lower triangle per model)
        {
            std::ofstream gf(out / "groups.tsv");
            gf << "model\tgroup_a\tgroup_b\tmean_cosine\tmean_euclidean\tmean_euclidean_normalized\n";
            std::vector<std::string> names;
            for (const auto& [name, _] : cfg.queries.groups) names.push_back(name);
            for (const auto& [model_name, model] : models) {
                for (std::size_t a = 0; a < names.size(); ++a) {
                    for (std::size_t b = 0; b <= a; ++b) {
                        try {
                            GroupSimilarity g = group_similarity(cfg.queries.groups.at(names[a]),
                                                                 cfg.queries.groups.at(names[b]),
                                                                 *model);
                            gf << model_name << '\t' << names[a] << '\t' << names[b] << '\t'
                               << fmt6(g.mean_cosine) << '\t' << fmt6(g.mean_euclidean) << '\t'
                               << fmt6(g.mean_euclidean_normalized) << "\n";
                        } catch (const std::exception& e) {
                            gf << "# " << model_name << " " << names[a] << "/" << names[b]
                               << " skipped: " << e.what() << "\n";
                        }
                    }
                }
            }
            report.artifacts["groups"] = (out / "groups.tsv").string();
        }

        // mention counts + most similar application words (Table 2 layout)
        std::vector<std::string> app_words;
        for (auto& line : read_lines(cfg.resources.application_words)) {
            std::string w = to_lower(trim(line));
            if (!w.empty() && w[0] != '#') app_words.push_back(w);
        }
        {
            std::ofstream mf2(out / "mentions.tsv");
            mf2 << "rank\tname\tn\tn_ner\tword2vec_application_words\tglove_application_words\n";
            int rank = 1;
            for (const auto& stat : stats) {
                if (rank > cfg.queries.top_chemicals) break;
                std::string token = entry_query_token(lexicon.entry(stat.entry), vocab);
                mf2 << rank << '\t' << stat.name << '\t' << stat.n_total << '\t' << stat.n_ner;
                for (const auto& [model_name, model] : models) {
                    mf2 << '\t';
                    if (token.empty()) {
                        mf2 << "-";
                        continue;
                    }
                    try {
                        SimilarityRanking r = application_words(
                            token, app_words, cfg.queries.app_words_per_chemical, *model);
                        std::vector<std::string> words;
                        for (const auto& item : r.items) words.push_back(item.token);
                        mf2 << (words.empty() ? "-" : join(words, ", "));
                    } catch (const std::exception&) {
                        mf2 << "-";
                    }
                }
                mf2 << "\n";
                ++rank;
            }
            report.artifacts["mentions"] = (out / "mentions.tsv").string();
        }

        // similarity rankings at three filter levels (Table 3 layout)
        {
            std::ofstream rf(out / "rankings.tsv");
            rf << "query\tmodel\tfilter\trank\ttoken\tscore\n";
            for (const auto& query : cfg.queries.words) {
                for (const auto& [model_name, model] : models) {
                    for (FilterLevel filter : {FilterLevel::AllWords, FilterLevel::ChemicalNames,
                                               FilterLevel::LikelyEnergetics}) {
                        try {
                            SimilarityRanking r =
                                nearest(query, cfg.queries.k, filter, *model, &lexicon);
                            int rank = 1;
                            for (const auto& item : r.items) {
                                rf << query << '\t' << model_name << '\t' << to_string(filter)
                                   << '\t' << rank++ << '\t' << item.token << '\t'
                                   << fmt6(item.score) << "\n";
                            }
                        } catch (const std::exception& e) {
                            rf << "# " << query << " " << model_name << " " << to_string(filter)
                               << " skipped: " << e.what() << "\n";
                        }
                    }
                }
            }
            report.artifacts["rankings"] = (out / "rankings.tsv").string();
        }

        // PCA projections (Fig 2 layout), one CSV per model
        {
            std::vector<std::string> pca_tokens = cfg.queries.pca_tokens;
            if (pca_tokens.empty()) {
                for (int i = 0; i < vocab.size(); ++i) {
                    if (lexicon.lookup_surface(vocab.token(i)) >= 0) pca_tokens.push_back(vocab.token(i));
                }
            }
            auto label_of = [&](const std::string& token) -> std::string {
                for (const auto& [name, members] : cfg.queries.groups) {
                    for (const auto& m : members) {
                        if (to_lower(m) == token) return name;
                    }
                }
                int entry = lexicon.lookup_surface(token);
                if (entry >= 0) {
                    const auto& label = lexicon.entry(entry).energetic_label;
                    if (label.has_value() && *label) return "energetic";
                    return "chemical";
                }
                return "other";
            };
            for (const auto& [model_name, model] : models) {
                std::filesystem::path path = out / ("pca_" + model_name + ".csv");
                std::ofstream pf(path);
                pf << "token";
                for (int c = 1; c <= cfg.queries.pca_components; ++c) pf << ",pc" << c;
                pf << ",label\n";
                try {
                    PcaProjection proj = pca_project(*model, pca_tokens, cfg.queries.pca_components);
                    for (std::size_t i = 0; i < pca_tokens.size(); ++i) {
                        pf << pca_tokens[i];
                        for (std::size_t c = 0; c < static_cast<std::size_t>(cfg.queries.pca_components); ++c)
                            pf << ',' << fmt6(proj.coordinates.at(i, c));
                        pf << ',' << label_of(pca_tokens[i]) << "\n";
                    }
                } catch (const std::exception& e) {
                    pf << "# skipped: " << e.what() << "\n";
                }
                report.artifacts["pca_" + model_name] = path.string();
            }
        }
        stage_done("reports", t_reports);

        report.status = "complete";
        manifest["status"] = "complete";
        manifest["seed"] = cfg.seed;
        manifest["deterministic"] = cfg.deterministic;
        json artifacts = json::object();
        for (const auto& [k, v] : report.artifacts) artifacts[k] = v;
        manifest["artifacts"] = artifacts;
        write_manifest();
        return report;
    } catch (const std::exception& e) {
        manifest["failed_stage"] = current_stage;
        manifest["error"] = e.what();
        write_manifest();
        throw PipelineError(current_stage, e.what());
    }
}

}  // namespace chemtext
