#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "chemtext/textprep.hpp"

namespace chemtext {

enum class CoocWeighting { Uniform, InverseDistance };

std::string to_string(CoocWeighting w);
CoocWeighting cooc_weighting_from_string(std::string_view s);

struct CoocEntry {
    std::uint32_t i;
    std::uint32_t j;
    double x;

    bool operator==(const CoocEntry&) const = default;
};

// Sparse word-word co-occurrence counts for a symmetric sliding window of
// half-size m. Windows never cross sentence boundaries. In symmetric mode
// (distinguish_sides = false) every pair occurrence is accumulated into both
// (i,j) and (j,i); with distinguish_sides = true the entry (i,j) counts only
// occurrences of j to the right of i.
struct CoocMatrix {
    std::uint32_t vocab_size = 0;
    int window = 0;
    CoocWeighting weighting = CoocWeighting::Uniform;
    bool distinguish_sides = false;
    std::vector<CoocEntry> entries;  // sorted by (i, j); all x > 0

    double total_mass() const;
    double value(std::uint32_t i, std::uint32_t j) const;  // 0 when absent

    void save(const std::filesystem::path& p) const;
    static CoocMatrix load(const std::filesystem::path& p);
};

CoocMatrix build_cooccurrence(const TokenizedCorpus& corpus, std::uint32_t vocab_size, int m,
                              CoocWeighting weighting, bool distinguish_sides);

// Deterministic (i,j)-sorted view of the nonzero entries.
const std::vector<CoocEntry>& iterate_nonzero(const CoocMatrix& matrix);

}  // namespace chemtext
