// chemtext: command-line front end for the energetics text-mining pipeline.

#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "chemtext/chemlex.hpp"
#include "chemtext/classifier.hpp"
#include "chemtext/cooc.hpp"
#include "chemtext/embedspace.hpp"
#include "chemtext/glove.hpp"
#include "chemtext/ingest.hpp"
#include "chemtext/pipeline.hpp"
#include "chemtext/resolver.hpp"
#include "chemtext/sgns.hpp"

using namespace chemtext;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

std::vector<std::filesystem::path> files_with_ext(const std::filesystem::path& dir,
                                                  const std::string& ext) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ext)
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<std::string> load_word_list(const std::filesystem::path& p) {
    std::vector<std::string> words;
    for (auto& line : read_lines(p)) {
        std::string w = to_lower(trim(line));
        if (!w.empty() && w[0] != '#') words.push_back(w);
    }
    return words;
}

void print_ranking(const SimilarityRanking& r) {
    int rank = 1;
    for (const auto& item : r.items) {
        std::printf("%d\t%s\t%.6f\n", rank++, item.token.c_str(), item.score);
    }
}

Vocabulary vocab_for_corpus(const std::string& vocab_path, const std::string& corpus_path,
                            int min_count) {
    if (!vocab_path.empty()) return Vocabulary::load_tsv(vocab_path);
    return build_vocabulary(load_corpus_text(corpus_path), min_count);
}

struct IngestPatentsArgs {
    std::string xml_dir, classes = "C06B,149", out;
    bool append = false;
};

int run_ingest_patents(const IngestPatentsArgs& a) {
    std::set<std::string> wanted;
    for (auto& c : split(a.classes, ',')) {
        std::string code;
        for (char ch : trim(c)) code += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        if (!code.empty()) wanted.insert(code);
    }
    DocumentStore store;
    if (a.append && std::filesystem::exists(a.out)) store = DocumentStore::load_jsonl(a.out);
    std::size_t parsed = 0, kept = 0, errors = 0;
    for (const auto& file : files_with_ext(a.xml_dir, ".xml")) {
        PatentParseResult result = parse_patent_xml(read_file(file));
        errors += result.errors.size();
        for (const auto& err : result.errors)
            std::cerr << file.filename().string() << ": " << err << "\n";
        for (const auto& p : result.patents) {
            ++parsed;
            if (!wanted.empty() && !filter_by_classification(p, wanted)) continue;
            try {
                store.add(document_from_patent(p));
                ++kept;
            } catch (const std::exception& e) {
                std::cerr << e.what() << "\n";
                ++errors;
            }
        }
    }
    store.save_jsonl(a.out);
    CorpusStats stats = corpus_stats(store);
    std::printf("parsed %zu patents, kept %zu (errors: %zu); store now holds %zu documents "
                "(%zu patents, %zu proceedings, %zu other)\n",
                parsed, kept, errors, stats.total_documents, stats.patents, stats.proceedings,
                stats.other);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"energetics text mining: embeddings and chemical associations"};
    app.require_subcommand(1);

    // ---- ingest ----
    auto* ingest = app.add_subcommand("ingest", "build a document store");
    ingest->require_subcommand(1);

    IngestPatentsArgs ip;
    auto* ingest_patents = ingest->add_subcommand("patents", "parse patent XML bundles");
    ingest_patents->add_option("--xml-dir", ip.xml_dir, "directory of .xml files")
        ->required()
        ->check(CLI::ExistingDirectory);
    ingest_patents->add_option("--classes", ip.classes, "classification prefixes, comma separated");
    ingest_patents->add_option("--out", ip.out, "output JSON-lines store")->required();
    ingest_patents->add_flag("--append", ip.append, "append to an existing store");

    struct {
        std::string dir, venue, kind = "proceedings", out;
        bool append = false;
    } it;
    auto* ingest_text = ingest->add_subcommand("text", "load UTF-8 plain-text documents");
    ingest_text->add_option("--dir", it.dir, "directory of .txt files")
        ->required()
        ->check(CLI::ExistingDirectory);
    ingest_text->add_option("--venue", it.venue, "venue name stored in document metadata");
    ingest_text->add_option("--kind", it.kind, "source kind: patent|proceedings|other");
    ingest_text->add_option("--out", it.out, "output JSON-lines store")->required();
    ingest_text->add_flag("--append", it.append, "append to an existing store");

    // ---- prep ----
    struct {
        std::string store, lexicon, stopwords, out, vocab_out;
        int min_count = 5;
        bool keep_numeric = false;
    } pp;
    auto* prep = app.add_subcommand("prep", "clean, merge, segment, tokenize, build vocabulary");
    prep->add_option("--store", pp.store, "JSON-lines document store")->required()->check(CLI::ExistingFile);
    prep->add_option("--lexicon", pp.lexicon, "chemical lexicon TSV")->required()->check(CLI::ExistingFile);
    prep->add_option("--stopwords", pp.stopwords, "stop-word list")->check(CLI::ExistingFile);
    prep->add_option("--min-count", pp.min_count, "vocabulary frequency cutoff");
    prep->add_option("--out", pp.out, "tokenized corpus output")->required();
    prep->add_option("--vocab", pp.vocab_out, "vocabulary TSV output (default: <out>.vocab.tsv)");
    prep->add_flag("--keep-numeric", pp.keep_numeric, "keep pure-digit tokens");

    // ---- chem ----
    auto* chem = app.add_subcommand("chem", "chemical lexicon tools");
    chem->require_subcommand(1);

    struct {
        std::string data, out;
        int epochs = 80;
        double lr = 0.1, lambda = 1e-3, holdout = 0.2;
        std::uint64_t seed = 1;
    } ct;
    auto* chem_train = chem->add_subcommand("train", "train the energetic/non-energetic classifier");
    chem_train->add_option("--data", ct.data, "TSV: name <tab> smiles <tab> label")->required()->check(CLI::ExistingFile);
    chem_train->add_option("--out", ct.out, "model JSON output")->required();
    chem_train->add_option("--epochs", ct.epochs);
    chem_train->add_option("--lr", ct.lr);
    chem_train->add_option("--lambda", ct.lambda);
    chem_train->add_option("--holdout", ct.holdout, "hold-out fraction (0 disables)");
    chem_train->add_option("--seed", ct.seed);

    struct {
        std::string model, smiles;
        double threshold = std::nan("");
    } cc;
    auto* chem_classify = chem->add_subcommand("classify", "score a molecule");
    chem_classify->add_option("--model", cc.model)->required()->check(CLI::ExistingFile);
    chem_classify->add_option("--smiles", cc.smiles)->required();
    chem_classify->add_option("--threshold", cc.threshold, "override the stored decision threshold");

    struct {
        std::string corpus, lexicon, stop_chems, out;
        int top = 0;
    } cs;
    auto* chem_stats = chem->add_subcommand("stats", "per-chemical mention statistics");
    chem_stats->add_option("--corpus", cs.corpus, "tokenized corpus file")->required()->check(CLI::ExistingFile);
    chem_stats->add_option("--lexicon", cs.lexicon)->required()->check(CLI::ExistingFile);
    chem_stats->add_option("--stop-chems", cs.stop_chems, "names to exclude")->check(CLI::ExistingFile);
    chem_stats->add_option("--top", cs.top, "limit rows (0 = all)");
    chem_stats->add_option("--out", cs.out, "write TSV here instead of stdout");

    struct {
        std::string name, cache, remote;
    } cr;
    auto* chem_resolve = chem->add_subcommand("resolve", "resolve a name to a structure");
    chem_resolve->add_option("--name", cr.name)->required();
    chem_resolve->add_option("--cache", cr.cache, "name->smiles cache TSV");
    chem_resolve->add_option("--remote", cr.remote, "remote lookup base URL (or CHEMTEXT_RESOLVER_URL)");

    // ---- cooc ----
    struct {
        std::string corpus, vocab, out, weighting = "uniform";
        int window = 8, min_count = 5;
        bool distinguish_sides = false;
    } co;
    auto* cooc_cmd = app.add_subcommand("cooc", "build the co-occurrence matrix");
    cooc_cmd->add_option("--corpus", co.corpus)->required()->check(CLI::ExistingFile);
    cooc_cmd->add_option("--vocab", co.vocab, "vocabulary TSV (rebuilt from the corpus if omitted)");
    cooc_cmd->add_option("-m,--window", co.window, "window half-size");
    cooc_cmd->add_option("--weighting", co.weighting, "uniform|inverse-distance");
    cooc_cmd->add_flag("--distinguish-sides", co.distinguish_sides, "right-context-only counts");
    cooc_cmd->add_option("--min-count", co.min_count, "cutoff when rebuilding the vocabulary");
    cooc_cmd->add_option("--out", co.out)->required();

    // ---- train ----
    auto* train = app.add_subcommand("train", "train embeddings");
    train->require_subcommand(1);

    struct {
        std::string corpus, vocab, out, mode = "ns";
        TrainConfig cfg;
        bool no_shrink = false;
        bool text_out = false;
    } tw;
    auto* train_w2v = train->add_subcommand("w2v", "skip-gram word2vec");
    train_w2v->add_option("--corpus", tw.corpus)->required()->check(CLI::ExistingFile);
    train_w2v->add_option("--vocab", tw.vocab, "vocabulary TSV (rebuilt if omitted)");
    train_w2v->add_option("--dim", tw.cfg.dim);
    train_w2v->add_option("--window", tw.cfg.window);
    train_w2v->add_option("--neg", tw.cfg.negatives);
    train_w2v->add_option("--epochs", tw.cfg.epochs);
    train_w2v->add_option("--lr", tw.cfg.learning_rate);
    train_w2v->add_option("--subsample", tw.cfg.subsample_t);
    train_w2v->add_option("--min-count", tw.cfg.min_count);
    train_w2v->add_option("--seed", tw.cfg.seed);
    train_w2v->add_option("--workers", tw.cfg.workers);
    train_w2v->add_option("--mode", tw.mode, "ns|full-softmax|single-softmax");
    train_w2v->add_flag("--no-shrink", tw.no_shrink, "fixed window size");
    train_w2v->add_flag("--text", tw.text_out, "also write <out>.txt");
    train_w2v->add_option("--out", tw.out)->required();

    struct {
        std::string cooc, vocab, out, optimizer = "adagrad";
        GloveConfig cfg;
        bool plain_vectors = false;
        bool text_out = false;
    } tg;
    auto* train_glove_cmd = train->add_subcommand("glove", "GloVe weighted least squares");
    train_glove_cmd->add_option("--cooc", tg.cooc)->required()->check(CLI::ExistingFile);
    train_glove_cmd->add_option("--vocab", tg.vocab)->required()->check(CLI::ExistingFile);
    train_glove_cmd->add_option("--dim", tg.cfg.dim);
    train_glove_cmd->add_option("--xmax", tg.cfg.x_max);
    train_glove_cmd->add_option("--alpha", tg.cfg.alpha);
    train_glove_cmd->add_option("--epochs", tg.cfg.epochs);
    train_glove_cmd->add_option("--lr", tg.cfg.learning_rate);
    train_glove_cmd->add_option("--seed", tg.cfg.seed);
    train_glove_cmd->add_option("--workers", tg.cfg.workers);
    train_glove_cmd->add_option("--optimizer", tg.optimizer, "adagrad|sgd");
    train_glove_cmd->add_flag("--plain-vectors", tg.plain_vectors, "query with w alone, not w + w~");
    train_glove_cmd->add_flag("--text", tg.text_out, "also write <out>.txt");
    train_glove_cmd->add_option("--out", tg.out)->required();

    // ---- query ----
    auto* query = app.add_subcommand("query", "query a trained model");
    query->require_subcommand(1);

    struct {
        std::string model, word, lexicon, filter = "all";
        int k = 5;
    } qn;
    auto* query_nearest = query->add_subcommand("nearest", "top-k most similar words");
    query_nearest->add_option("--model", qn.model)->required()->check(CLI::ExistingFile);
    query_nearest->add_option("--word", qn.word)->required();
    query_nearest->add_option("-k", qn.k);
    query_nearest->add_option("--filter", qn.filter, "all|chemicals|energetics");
    query_nearest->add_option("--lexicon", qn.lexicon)->check(CLI::ExistingFile);

    struct {
        std::string model, word, apps;
        int k = 5;
    } qa;
    auto* query_apps = query->add_subcommand("apps", "most similar application words");
    query_apps->add_option("--model", qa.model)->required()->check(CLI::ExistingFile);
    query_apps->add_option("--word", qa.word)->required();
    query_apps->add_option("--apps", qa.apps, "application word list")->required()->check(CLI::ExistingFile);
    query_apps->add_option("-k", qa.k);

    struct {
        std::string model, groups;
    } qg;
    auto* query_groups = query->add_subcommand("groups", "group similarity matrix");
    query_groups->add_option("--model", qg.model)->required()->check(CLI::ExistingFile);
    query_groups->add_option("--groups", qg.groups, "JSON: {\"name\": [tokens...]}")->required()->check(CLI::ExistingFile);

    struct {
        std::string model;
        std::vector<std::string> abc;
        int k = 5;
    } qy;
    auto* query_analogy = query->add_subcommand("analogy", "a : b :: c : ?");
    query_analogy->add_option("--model", qy.model)->required()->check(CLI::ExistingFile);
    query_analogy->add_option("words", qy.abc, "a b c")->expected(3);
    query_analogy->add_option("-k", qy.k);

    struct {
        std::string model, tokens, out;
        int ncomp = 2;
    } qp;
    auto* query_pca = query->add_subcommand("pca", "principal-component projection");
    query_pca->add_option("--model", qp.model)->required()->check(CLI::ExistingFile);
    query_pca->add_option("--tokens", qp.tokens, "token list file")->required()->check(CLI::ExistingFile);
    query_pca->add_option("--ncomp", qp.ncomp);
    query_pca->add_option("--out", qp.out, "CSV output (stdout if omitted)");

    struct {
        std::string model, tokens, metric = "cosine";
        int k = 10;
    } qh;
    auto* query_hubs = query->add_subcommand("hubs", "hubness diagnostics");
    query_hubs->add_option("--model", qh.model)->required()->check(CLI::ExistingFile);
    query_hubs->add_option("--tokens", qh.tokens, "candidate token file (default: whole vocabulary)");
    query_hubs->add_option("-k", qh.k);
    query_hubs->add_option("--metric", qh.metric, "cosine|euclidean");

    // ---- run ----
    struct {
        std::string config, out_dir;
        std::uint64_t seed = 0;
        bool seed_set = false, deterministic = false;
    } rn;
    auto* run_cmd = app.add_subcommand("run", "full pipeline from a config file");
    run_cmd->add_option("--config", rn.config)->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--seed", rn.seed)->each([&](const std::string&) { rn.seed_set = true; });
    run_cmd->add_flag("--deterministic", rn.deterministic, "force single-worker mode everywhere");
    run_cmd->add_option("--out-dir", rn.out_dir, "override the configured output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (ingest_patents->parsed()) return run_ingest_patents(ip);

        if (ingest_text->parsed()) {
            DocumentStore store;
            if (it.append && std::filesystem::exists(it.out)) store = DocumentStore::load_jsonl(it.out);
            std::size_t added = 0;
            for (const auto& file : files_with_ext(it.dir, ".txt")) {
                std::map<std::string, std::string> meta = {{"source_kind", it.kind}};
                if (!it.venue.empty()) meta["venue"] = it.venue;
                std::size_t repl = 0;
                store.add(load_plain_text(file, meta, &repl));
                if (repl) std::cerr << file.filename().string() << ": replaced " << repl
                                    << " invalid UTF-8 sequence(s)\n";
                ++added;
            }
            store.save_jsonl(it.out);
            std::printf("added %zu documents; store now holds %zu\n", added, store.size());
            return kExitOk;
        }

        if (prep->parsed()) {
            DocumentStore store = DocumentStore::load_jsonl(pp.store);
            ChemLexicon lexicon = ChemLexicon::load_tsv(pp.lexicon);
            CleaningConfig cleaning;
            cleaning.drop_numeric = !pp.keep_numeric;
            if (!pp.stopwords.empty()) cleaning.load_stopwords(pp.stopwords);
            std::vector<std::vector<std::string>> sentences;
            for (const auto& doc : store.documents()) {
                std::string merged = merge_entities(clean_text(doc.text, cleaning), lexicon);
                for (const auto& s : segment_sentences(merged)) {
                    auto toks = tokenize(s, cleaning);
                    if (!toks.empty()) sentences.push_back(std::move(toks));
                }
            }
            Vocabulary vocab = build_vocabulary(sentences, pp.min_count);
            save_corpus_text(sentences, pp.out);
            std::string vocab_path = pp.vocab_out.empty() ? pp.out + ".vocab.tsv" : pp.vocab_out;
            vocab.save_tsv(vocab_path);
            std::printf("%zu sentences, vocabulary %d (min_count %d) -> %s, %s\n",
                        sentences.size(), vocab.size(), pp.min_count, pp.out.c_str(),
                        vocab_path.c_str());
            return kExitOk;
        }

        if (chem_train->parsed()) {
            std::vector<MolGraph> mols;
            std::vector<bool> labels;
            std::vector<std::string> names;
            for (auto& line : read_lines(ct.data)) {
                if (line.empty() || line[0] == '#') continue;
                auto cols = split(line, '\t');
                if (cols.size() < 3) continue;
                mols.push_back(parse_smiles(cols[1]));
                labels.push_back(cols[2] == "1" || cols[2] == "true");
                names.push_back(cols[0]);
            }
            auto schema = bond_schema_from_molecules(mols);
            std::vector<FeatureVector> xs;
            for (const auto& mol : mols) xs.push_back(featurize_sum_over_bonds(mol, schema).fv);
            SvmConfig svm;
            svm.epochs = ct.epochs;
            svm.learning_rate = ct.lr;
            svm.lambda = ct.lambda;
            svm.seed = ct.seed;
            svm.holdout_fraction = ct.holdout;
            HoldoutMetrics metrics;
            LinearModel model = train_linear_classifier(xs, labels, svm, &metrics);
            model.save_json(ct.out);
            std::printf("trained on %d molecules (%zu bond features)", metrics.n_train,
                        schema.size());
            if (metrics.n_test > 0) {
                std::printf("; hold-out: accuracy %.3f auROC %.3f FPR %.3f (n=%d)",
                            metrics.accuracy, metrics.auroc, metrics.false_positive_rate,
                            metrics.n_test);
            }
            std::printf("\nmodel -> %s\n", ct.out.c_str());
            return kExitOk;
        }

        if (chem_classify->parsed()) {
            LinearModel model = LinearModel::load_json(cc.model);
            if (!std::isnan(cc.threshold)) model.decision_threshold = cc.threshold;
            MolGraph mol = parse_smiles(cc.smiles);
            auto features = featurize_sum_over_bonds(mol, model.schema);
            if (features.unknown_bonds > 0)
                std::cerr << "note: " << features.unknown_bonds
                          << " bond(s) outside the model's schema\n";
            Classification r = classify_energetic(model, features.fv);
            std::printf("score %.6f -> %s (threshold %.3f)\n", r.score,
                        r.label ? "energetic" : "non-energetic", model.decision_threshold);
            return kExitOk;
        }

        if (chem_stats->parsed()) {
            ChemLexicon lexicon = ChemLexicon::load_tsv(cs.lexicon);
            auto sentences = load_corpus_text(cs.corpus);
            std::unordered_set<std::string> stop_chems;
            if (!cs.stop_chems.empty())
                for (auto& w : load_word_list(cs.stop_chems)) stop_chems.insert(w);
            auto stats = mention_stats(sentences, lexicon, stop_chems);
            std::ostream* os = &std::cout;
            std::ofstream file;
            if (!cs.out.empty()) {
                file.open(cs.out);
                os = &file;
            }
            *os << "rank\tname\tn\tn_ner\n";
            int rank = 1;
            for (const auto& s : stats) {
                if (cs.top > 0 && rank > cs.top) break;
                *os << rank++ << '\t' << s.name << '\t' << s.n_total << '\t' << s.n_ner << "\n";
            }
            return kExitOk;
        }

        if (chem_resolve->parsed()) {
            NameResolver resolver;
            if (!cr.cache.empty()) {
                if (std::filesystem::exists(cr.cache)) resolver.load_cache(cr.cache);
                resolver.set_cache_file(cr.cache);
            }
            std::string remote = cr.remote;
            if (remote.empty()) {
                if (const char* env = std::getenv("CHEMTEXT_RESOLVER_URL")) remote = env;
            }
            if (!remote.empty()) resolver.set_remote(std::make_shared<HttpChemLookup>(remote));
            auto hit = resolver.resolve(cr.name);
            if (!hit) {
                std::printf("%s: not found\n", cr.name.c_str());
                return kExitOk;
            }
            std::printf("%s\t%s\n", hit->canonical_name.c_str(), hit->smiles.c_str());
            return kExitOk;
        }

        if (cooc_cmd->parsed()) {
            auto sentences = load_corpus_text(co.corpus);
            Vocabulary vocab = vocab_for_corpus(co.vocab, co.corpus, co.min_count);
            TokenizedCorpus corpus = encode_corpus(sentences, vocab);
            CoocMatrix mat = build_cooccurrence(corpus, static_cast<std::uint32_t>(vocab.size()),
                                                co.window, cooc_weighting_from_string(co.weighting),
                                                co.distinguish_sides);
            mat.save(co.out);
            std::printf("V=%d m=%d %s %s: %zu nonzeros -> %s\n", vocab.size(), co.window,
                        to_string(mat.weighting).c_str(),
                        mat.distinguish_sides ? "asymmetric" : "symmetric", mat.entries.size(),
                        co.out.c_str());
            return kExitOk;
        }

        if (train_w2v->parsed()) {
            auto sentences = load_corpus_text(tw.corpus);
            Vocabulary vocab = vocab_for_corpus(tw.vocab, tw.corpus, tw.cfg.min_count);
            TokenizedCorpus corpus = encode_corpus(sentences, vocab);
            tw.cfg.shrink_window = !tw.no_shrink;
            if (tw.mode == "full-softmax") tw.cfg.mode = TrainConfig::Mode::FullSoftmax;
            else if (tw.mode == "single-softmax") tw.cfg.mode = TrainConfig::Mode::SingleSoftmax;
            else tw.cfg.mode = TrainConfig::Mode::NegativeSampling;
            TrainStats stats;
            EmbeddingModel model = train_skipgram(corpus, vocab, tw.cfg, &stats);
            save_model(model, tw.out);
            if (tw.text_out) save_model_text(model, tw.out + ".txt");
            std::printf("V=%d D=%d pairs=%lld final mean loss %.4f -> %s\n", model.vocab_size(),
                        model.dim(), static_cast<long long>(stats.pairs_processed),
                        stats.epoch_mean_loss.empty() ? 0.0 : stats.epoch_mean_loss.back(),
                        tw.out.c_str());
            return kExitOk;
        }

        if (train_glove_cmd->parsed()) {
            CoocMatrix cooc = CoocMatrix::load(tg.cooc);
            Vocabulary vocab = Vocabulary::load_tsv(tg.vocab);
            tg.cfg.optimizer = tg.optimizer == "sgd" ? GloveConfig::Optimizer::Sgd
                                                     : GloveConfig::Optimizer::AdaGrad;
            TrainStats stats;
            GloveModel glove = train_glove(cooc, tg.cfg, &stats);
            EmbeddingModel model = to_embedding_model(glove, vocab, !tg.plain_vectors);
            save_model(model, tg.out);
            if (tg.text_out) save_model_text(model, tg.out + ".txt");
            std::printf("V=%d D=%d nonzeros=%zu final mean loss %.6f -> %s\n", model.vocab_size(),
                        model.dim(), cooc.entries.size(),
                        stats.epoch_mean_loss.empty() ? 0.0 : stats.epoch_mean_loss.back(),
                        tg.out.c_str());
            return kExitOk;
        }

        if (query_nearest->parsed()) {
            EmbeddingModel model = load_model(qn.model);
            std::optional<ChemLexicon> lexicon;
            if (!qn.lexicon.empty()) lexicon = ChemLexicon::load_tsv(qn.lexicon);
            FilterLevel filter = filter_level_from_string(qn.filter);
            if (filter != FilterLevel::AllWords && !lexicon) {
                std::cerr << "--filter " << qn.filter << " needs --lexicon\n";
                return kExitValidation;
            }
            print_ranking(nearest(qn.word, qn.k, filter, model, lexicon ? &*lexicon : nullptr));
            return kExitOk;
        }

        if (query_apps->parsed()) {
            EmbeddingModel model = load_model(qa.model);
            print_ranking(application_words(qa.word, load_word_list(qa.apps), qa.k, model));
            return kExitOk;
        }

        if (query_groups->parsed()) {
            EmbeddingModel model = load_model(qg.model);
            auto spec = nlohmann::json::parse(read_file(qg.groups));
            std::vector<std::pair<std::string, std::vector<std::string>>> groups;
            for (auto& [name, tokens] : spec.items())
                groups.emplace_back(name, tokens.get<std::vector<std::string>>());
            std::printf("group_a\tgroup_b\tmean_cosine\tmean_euclidean\tmean_euclidean_normalized\n");
            for (std::size_t a = 0; a < groups.size(); ++a) {
                for (std::size_t b = 0; b <= a; ++b) {
                    GroupSimilarity g = group_similarity(groups[a].second, groups[b].second, model);
                    std::printf("%s\t%s\t%.6f\t%.6f\t%.6f\n", groups[a].first.c_str(),
                                groups[b].first.c_str(), g.mean_cosine, g.mean_euclidean,
                                g.mean_euclidean_normalized);
                }
            }
            return kExitOk;
        }

        if (query_analogy->parsed()) {
            EmbeddingModel model = load_model(qy.model);
            print_ranking(analogy(qy.abc[0], qy.abc[1], qy.abc[2], qy.k, model));
            return kExitOk;
        }

        if (query_pca->parsed()) {
            EmbeddingModel model = load_model(qp.model);
            auto tokens = load_word_list(qp.tokens);
            PcaProjection proj = pca_project(model, tokens, qp.ncomp);
            std::ostream* os = &std::cout;
            std::ofstream file;
            if (!qp.out.empty()) {
                file.open(qp.out);
                os = &file;
            }
            *os << "token";
            for (int c = 1; c <= qp.ncomp; ++c) *os << ",pc" << c;
            *os << "\n";
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                *os << tokens[i];
                for (int c = 0; c < qp.ncomp; ++c) {
                    char buf[32];
                    std::snprintf(buf, sizeof(buf), ",%.6f",
                                  proj.coordinates.at(i, static_cast<std::size_t>(c)));
                    *os << buf;
                }
                *os << "\n";
            }
            std::fprintf(stderr, "explained variance:");
            for (double v : proj.explained_variance) std::fprintf(stderr, " %.6f", v);
            std::fprintf(stderr, "\n");
            return kExitOk;
        }

        if (query_hubs->parsed()) {
            EmbeddingModel model = load_model(qh.model);
            std::vector<std::string> tokens =
                qh.tokens.empty() ? model.tokens : load_word_list(qh.tokens);
            HubMetric metric = qh.metric == "euclidean" ? HubMetric::Euclidean : HubMetric::Cosine;
            HubnessReport report = hubness(model, qh.k, tokens, metric);
            std::vector<std::size_t> order(report.tokens.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return report.counts[a] > report.counts[b];
            });
            for (std::size_t i = 0; i < order.size() && i < 20; ++i)
                std::printf("%s\t%d\n", report.tokens[order[i]].c_str(), report.counts[order[i]]);
            std::printf("# skewness %.4f (%s)\n", report.skewness, qh.metric.c_str());
            return kExitOk;
        }

        if (run_cmd->parsed()) {
            RunConfig cfg = RunConfig::from_file(rn.config);
            if (rn.seed_set) cfg.seed = rn.seed;
            if (rn.deterministic) cfg.deterministic = true;
            if (!rn.out_dir.empty()) cfg.out_dir = rn.out_dir;
            auto errors = validate_config(cfg);
            if (!errors.empty()) {
                for (const auto& e : errors) std::cerr << "config error: " << e << "\n";
                return kExitValidation;
            }
            RunReport report = run_pipeline(cfg);
            std::printf("pipeline complete: %zu documents, vocabulary %d\n", report.documents,
                        report.vocabulary);
            for (const auto& t : report.timings)
                std::printf("  %-12s %8.2fs\n", t.stage.c_str(), t.seconds);
            std::printf("outputs in %s\n", report.out_dir.string().c_str());
            return kExitOk;
        }
    } catch (const PipelineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.stage == "validate" ? kExitValidation : kExitRuntime;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
