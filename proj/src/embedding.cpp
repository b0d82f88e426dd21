#include "chemtext/embedding.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

namespace chemtext {

int EmbeddingModel::id(std::string_view token) const {
    auto it = token_to_id.find(std::string(token));
    return it == token_to_id.end() ? -1 : it->second;
}

std::vector<double> EmbeddingModel::query_vector(int id_) const {
    if (id_ < 0 || id_ >= vocab_size()) throw std::out_of_range("query_vector: word id out of range");
    auto i = static_cast<std::size_t>(id_);
    std::vector<double> v(W.row(i), W.row(i) + W.cols);
    if (query_combined) {
        for (std::size_t d = 0; d < W.cols; ++d) v[d] += W_ctx.at(i, d);
    }
    return v;
}

Matrix EmbeddingModel::query_matrix() const {
    Matrix q = W;
    if (query_combined) {
        for (std::size_t k = 0; k < q.a.size(); ++k) q.a[k] += W_ctx.a[k];
    }
    return q;
}

void EmbeddingModel::set_tokens(const Vocabulary& vocab) {
    tokens = vocab.tokens();
    token_to_id.clear();
    for (std::size_t i = 0; i < tokens.size(); ++i)
        token_to_id.emplace(tokens[i], static_cast<int>(i));
    vocab_hash = vocab.hash();
}

namespace {

constexpr char kMagic[8] = {'W', 'E', 'M', 'B', '0', '0', '0', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

void write_string(std::ostream& out, const std::string& s) {
    write_pod(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    std::uint32_t len;
    read_pod(in, len);
    std::string s(len, '\0');
    in.read(s.data(), len);
    return s;
}

}  // namespace

void save_model(const EmbeddingModel& model, const std::filesystem::path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model: " + p.string());
    out.write(kMagic, sizeof(kMagic));
    write_string(out, model.algorithm);
    write_pod(out, static_cast<std::uint64_t>(model.W.rows));
    write_pod(out, static_cast<std::uint64_t>(model.W.cols));
    write_pod(out, model.vocab_hash);
    write_pod(out, static_cast<std::uint8_t>(model.b.empty() ? 0 : 1));
    write_pod(out, static_cast<std::uint8_t>(model.query_combined ? 1 : 0));
    for (const auto& t : model.tokens) write_string(out, t);
    out.write(reinterpret_cast<const char*>(model.W.a.data()),
              static_cast<std::streamsize>(model.W.a.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(model.W_ctx.a.data()),
              static_cast<std::streamsize>(model.W_ctx.a.size() * sizeof(double)));
    if (!model.b.empty()) {
        out.write(reinterpret_cast<const char*>(model.b.data()),
                  static_cast<std::streamsize>(model.b.size() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(model.b_ctx.data()),
                  static_cast<std::streamsize>(model.b_ctx.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("short write saving model: " + p.string());
}

EmbeddingModel load_model(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model: " + p.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not an embedding model file: " + p.string());

    EmbeddingModel model;
    model.algorithm = read_string(in);
    std::uint64_t V, D;
    read_pod(in, V);
    read_pod(in, D);
    read_pod(in, model.vocab_hash);
    std::uint8_t has_biases, combined;
    read_pod(in, has_biases);
    read_pod(in, combined);
    model.query_combined = combined != 0;

    model.tokens.reserve(V);
    for (std::uint64_t i = 0; i < V; ++i) {
        model.tokens.push_back(read_string(in));
        model.token_to_id.emplace(model.tokens.back(), static_cast<int>(i));
    }
    model.W = Matrix(V, D);
    model.W_ctx = Matrix(V, D);
    in.read(reinterpret_cast<char*>(model.W.a.data()),
            static_cast<std::streamsize>(model.W.a.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(model.W_ctx.a.data()),
            static_cast<std::streamsize>(model.W_ctx.a.size() * sizeof(double)));
    if (has_biases) {
        model.b.resize(V);
        model.b_ctx.resize(V);
        in.read(reinterpret_cast<char*>(model.b.data()),
                static_cast<std::streamsize>(V * sizeof(double)));
        in.read(reinterpret_cast<char*>(model.b_ctx.data()),
                static_cast<std::streamsize>(V * sizeof(double)));
    }
    if (!in) throw std::runtime_error("truncated model file: " + p.string());
    return model;
}

void save_model_text(const EmbeddingModel& model, const std::filesystem::path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write model: " + p.string());
    out << model.vocab_size() << ' ' << model.dim() << "\n";
    char buf[64];
    for (int i = 0; i < model.vocab_size(); ++i) {
        out << model.tokens[static_cast<std::size_t>(i)];
        for (double v : model.query_vector(i)) {
            std::snprintf(buf, sizeof(buf), " %.8g", v);
            out << buf;
        }
        out << "\n";
    }
}

}  // namespace chemtext
