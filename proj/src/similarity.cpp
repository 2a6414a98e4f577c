#include "glyphrank/similarity.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>

#include "glyphrank/error.hpp"

namespace glyphrank {

namespace {

void check_local_args(const LocalEmbeddingSet& patches, const LocalEmbeddingSet& tokens,
                      std::span<const std::uint8_t> mask) {
    if (patches.dim() != tokens.dim()) {
        throw Error(ErrorCode::DimMismatch, "patch dim " + std::to_string(patches.dim()) + " != token dim " +
                                                std::to_string(tokens.dim()));
    }
    if (mask.size() != tokens.rows()) {
        throw Error(ErrorCode::LengthMismatch, "mask length " + std::to_string(mask.size()) + " != token rows " +
                                                   std::to_string(tokens.rows()));
    }
    if (patches.rows() == 0) throw Error(ErrorCode::InvalidParams, "no image patches");
    if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) {
        throw Error(ErrorCode::EmptyMask, "mask selects no radical token");
    }
}

}  // namespace

double cosine(const GlobalEmbedding& u, const GlobalEmbedding& v) {
    if (u.dim() != v.dim()) {
        throw Error(ErrorCode::DimMismatch, std::to_string(u.dim()) + " vs " + std::to_string(v.dim()));
    }
    return std::clamp(dot(u.values(), v.values()), -1.0, 1.0);
}

std::vector<double> global_scores(const QuerySample& query, const CandidateIndex& index) {
    if (query.dim() != index.dim()) {
        throw Error(ErrorCode::DimMismatch, "query dim " + std::to_string(query.dim()) + " != index dim " +
                                                std::to_string(index.dim()));
    }
    std::vector<double> scores(index.size());
    for (std::size_t j = 0; j < index.size(); ++j) {
        scores[j] = std::clamp(dot(query.global.values(), index[j].global.values()), -1.0, 1.0);
    }
    return scores;
}

double s_i2t(const LocalEmbeddingSet& patches, const LocalEmbeddingSet& tokens, std::span<const std::uint8_t> mask) {
    check_local_args(patches, tokens, mask);
    double sum = 0.0;
    std::size_t active = 0;
    for (std::size_t i = 0; i < tokens.rows(); ++i) {
        if (!mask[i]) continue;
        const auto t = tokens.row(i);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < patches.rows(); ++n) best = std::max(best, dot(patches.row(n), t));
        sum += best;
        ++active;
    }
    return sum / static_cast<double>(active);
}

double s_t2i(const LocalEmbeddingSet& patches, const LocalEmbeddingSet& tokens, std::span<const std::uint8_t> mask) {
    check_local_args(patches, tokens, mask);
    double sum = 0.0;
    for (std::size_t n = 0; n < patches.rows(); ++n) {
        const auto v = patches.row(n);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < tokens.rows(); ++i) {
            if (mask[i]) best = std::max(best, dot(v, tokens.row(i)));
        }
        sum += best;
    }
    return sum / static_cast<double>(patches.rows());
}

ResponseMap response_map(const LocalEmbeddingSet& patches, const LocalEmbeddingSet& tokens, std::size_t token_index) {
    if (token_index >= tokens.rows()) {
        throw Error(ErrorCode::IndexOutOfRange, "token " + std::to_string(token_index) + " of " +
                                                    std::to_string(tokens.rows()));
    }
    if (patches.dim() != tokens.dim()) throw Error(ErrorCode::DimMismatch, "patch/token dims differ");
    ResponseMap map{token_index, std::vector<double>(patches.rows())};
    const auto t = tokens.row(token_index);
    for (std::size_t n = 0; n < patches.rows(); ++n) map.values[n] = dot(patches.row(n), t);
    return map;
}

void write_response_map_csv(const ResponseMap& map, std::ostream& out) {
    out << "patch_index,response\n";
    char buf[48];
    for (std::size_t n = 0; n < map.values.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%zu,%.9g\n", n, map.values[n]);
        out << buf;
    }
}

}  // namespace glyphrank
