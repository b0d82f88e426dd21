#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chemtext {

// Counter/seed based PRNG (splitmix64). Small state, deterministic across
// platforms; every stochastic stage in the project draws from one of these.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    // Uniform in [0, 1), 53 bits of precision.
    double next_double();
    // Uniform in [0, n).
    std::uint64_t next_below(std::uint64_t n);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    std::uint64_t state_;
};

// One splitmix64 step applied to an arbitrary 64-bit value; used for
// stateless per-index draws (window shrinkage, per-sentence streams).
std::uint64_t mix64(std::uint64_t x);

// Stage seeds are derived from the root seed by name so every stage gets an
// independent, reproducible stream.
std::uint64_t derive_seed(std::uint64_t root_seed, std::string_view stage);

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed = 1469598103934665603ull);

// Dense row-major matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double* row(std::size_t i) { return a.data() + i * cols; }
    const double* row(std::size_t i) const { return a.data() + i * cols; }
    double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    bool all_finite() const;
};

// Walker alias sampler over a fixed discrete distribution. Construction and
// sampling are deterministic.
class AliasSampler {
  public:
    explicit AliasSampler(const std::vector<double>& weights);
    // Draws an index using two uniforms from rng.
    std::size_t sample(Rng& rng) const;
    std::size_t size() const { return prob_.size(); }

  private:
    std::vector<double> prob_;
    std::vector<std::uint32_t> alias_;
};

// --- string helpers ---

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delim);
std::vector<std::string> split_ws(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string collapse_ws(std::string_view s);

inline bool is_ascii_alnum(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
inline bool is_ascii_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::size_t levenshtein(std::string_view a, std::string_view b);

// --- file helpers ---

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view content);
std::vector<std::string> read_lines(const std::filesystem::path& p);

}  // namespace chemtext
