#include "chemtext/cooc.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <unordered_map>

namespace chemtext {

std::string to_string(CoocWeighting w) {
    return w == CoocWeighting::Uniform ? "uniform" : "inverse_distance";
}

CoocWeighting cooc_weighting_from_string(std::string_view s) {
    if (s == "uniform") return CoocWeighting::Uniform;
    if (s == "inverse_distance" || s == "inverse-distance") return CoocWeighting::InverseDistance;
    throw std::invalid_argument("unknown co-occurrence weighting: " + std::string(s));
}

double CoocMatrix::total_mass() const {
    double sum = 0.0;
    for (const auto& e : entries) sum += e.x;
    return sum;
}

double CoocMatrix::value(std::uint32_t i, std::uint32_t j) const {
    CoocEntry probe{i, j, 0.0};
    auto it = std::lower_bound(entries.begin(), entries.end(), probe,
                               [](const CoocEntry& a, const CoocEntry& b) {
                                   return a.i != b.i ? a.i < b.i : a.j < b.j;
                               });
    if (it != entries.end() && it->i == i && it->j == j) return it->x;
    return 0.0;
}

CoocMatrix build_cooccurrence(const TokenizedCorpus& corpus, std::uint32_t vocab_size, int m,
                              CoocWeighting weighting, bool distinguish_sides) {
    if (m < 1) throw std::invalid_argument("build_cooccurrence: window half-size must be >= 1");

    std::unordered_map<std::uint64_t, double> acc;
    const bool inverse = weighting == CoocWeighting::InverseDistance;
    for (const auto& sent : corpus.sentences) {
        const int n = static_cast<int>(sent.size());
        for (int center = 0; center < n; ++center) {
            auto c = static_cast<std::uint32_t>(sent[static_cast<std::size_t>(center)]);
            for (int d = 1; d <= m && center + d < n; ++d) {
                auto r = static_cast<std::uint32_t>(sent[static_cast<std::size_t>(center + d)]);
                double w = inverse ? 1.0 / static_cast<double>(d) : 1.0;
                acc[(static_cast<std::uint64_t>(c) << 32) | r] += w;
                if (!distinguish_sides) acc[(static_cast<std::uint64_t>(r) << 32) | c] += w;
            }
        }
    }

    CoocMatrix mat;
    mat.vocab_size = vocab_size;
    mat.window = m;
    mat.weighting = weighting;
    mat.distinguish_sides = distinguish_sides;
    mat.entries.reserve(acc.size());
    for (const auto& [key, x] : acc) {
        mat.entries.push_back(
            {static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key), x});
    }
    std::sort(mat.entries.begin(), mat.entries.end(), [](const CoocEntry& a, const CoocEntry& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    return mat;
}

const std::vector<CoocEntry>& iterate_nonzero(const CoocMatrix& matrix) { return matrix.entries; }

namespace {
constexpr char kMagic[8] = {'C', 'O', 'O', 'C', '0', '0', '0', '1'};
}

void CoocMatrix::save(const std::filesystem::path& p) const {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write co-occurrence file: " + p.string());
    out.write(kMagic, sizeof(kMagic));
    std::uint32_t w32 = vocab_size;
    std::int32_t m32 = window;
    std::uint8_t weight8 = weighting == CoocWeighting::InverseDistance ? 1 : 0;
    std::uint8_t sides8 = distinguish_sides ? 1 : 0;
    std::uint64_t count = entries.size();
    out.write(reinterpret_cast<const char*>(&w32), sizeof(w32));
    out.write(reinterpret_cast<const char*>(&m32), sizeof(m32));
    out.write(reinterpret_cast<const char*>(&weight8), sizeof(weight8));
    out.write(reinterpret_cast<const char*>(&sides8), sizeof(sides8));
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    for (const auto& e : entries) {
        out.write(reinterpret_cast<const char*>(&e.i), sizeof(e.i));
        out.write(reinterpret_cast<const char*>(&e.j), sizeof(e.j));
        out.write(reinterpret_cast<const char*>(&e.x), sizeof(e.x));
    }
}

CoocMatrix CoocMatrix::load(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open co-occurrence file: " + p.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not a co-occurrence file: " + p.string());
    CoocMatrix mat;
    std::uint32_t w32;
    std::int32_t m32;
    std::uint8_t weight8, sides8;
    std::uint64_t count;
    in.read(reinterpret_cast<char*>(&w32), sizeof(w32));
    in.read(reinterpret_cast<char*>(&m32), sizeof(m32));
    in.read(reinterpret_cast<char*>(&weight8), sizeof(weight8));
    in.read(reinterpret_cast<char*>(&sides8), sizeof(sides8));
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    mat.vocab_size = w32;
    mat.window = m32;
    mat.weighting = weight8 ? CoocWeighting::InverseDistance : CoocWeighting::Uniform;
    mat.distinguish_sides = sides8 != 0;
    mat.entries.resize(count);
    for (auto& e : mat.entries) {
        in.read(reinterpret_cast<char*>(&e.i), sizeof(e.i));
        in.read(reinterpret_cast<char*>(&e.j), sizeof(e.j));
        in.read(reinterpret_cast<char*>(&e.x), sizeof(e.x));
    }
    if (!in) throw std::runtime_error("truncated co-occurrence file: " + p.string());
    return mat;
}

}  // namespace chemtext
