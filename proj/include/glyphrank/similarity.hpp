#pragma once

// Similarity kernels over unit-normalized float32 rows, accumulated in double.
// Inputs are assumed normalized at the module boundary; nothing here rescales.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "glyphrank/embedding.hpp"

namespace glyphrank {

inline double dot(std::span<const float> a, std::span<const float> b) noexcept {
    const std::size_t n = a.size();
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc[0] += static_cast<double>(a[i]) * b[i];
        acc[1] += static_cast<double>(a[i + 1]) * b[i + 1];
        acc[2] += static_cast<double>(a[i + 2]) * b[i + 2];
        acc[3] += static_cast<double>(a[i + 3]) * b[i + 3];
    }
    for (; i < n; ++i) acc[0] += static_cast<double>(a[i]) * b[i];
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

// Dot product clamped to [-1, 1]. Throws DimMismatch.
double cosine(const GlobalEmbedding& u, const GlobalEmbedding& v);

// cosine(query.global, candidate.global) for every candidate, index order.
std::vector<double> global_scores(const QuerySample& query, const CandidateIndex& index);

// Token-driven: mean over radical tokens of the best patch response.
double s_i2t(const LocalEmbeddingSet& patches, const LocalEmbeddingSet& tokens, std::span<const std::uint8_t> mask);

// Patch-driven: mean over patches of the best radical-token response.
double s_t2i(const LocalEmbeddingSet& patches, const LocalEmbeddingSet& tokens, std::span<const std::uint8_t> mask);

struct ResponseMap {
    std::size_t token_index = 0;
    std::vector<double> values;  // one cosine per patch
};

ResponseMap response_map(const LocalEmbeddingSet& patches, const LocalEmbeddingSet& tokens, std::size_t token_index);

// CSV: `patch_index,response`, 9 significant digits.
void write_response_map_csv(const ResponseMap& map, std::ostream& out);

}  // namespace glyphrank
