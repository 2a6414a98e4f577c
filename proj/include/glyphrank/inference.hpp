#pragma once

// Coarse-to-fine ranking of one query against the candidate index:
//   1. global cosine against every candidate, full coarse ordering;
//   2. the first k of that ordering form the Top-K set;
//   3. patch-driven masked local score (s_t2i) for Top-K only;
//   4. temperature softmax of both scores over Top-K;
//   5. final score = p_global * p_local (left unnormalized).
// Ties are broken by ascending candidate position everywhere.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "glyphrank/embedding.hpp"

namespace glyphrank {

struct InferenceConfig {
    static constexpr std::size_t kDefaultK = 50;
    static constexpr double kDefaultTemperature = 0.07;

    std::size_t k = kDefaultK;  // clamped to the index size at run time
    double tau_g = kDefaultTemperature;
    double tau_l = kDefaultTemperature;

    void validate() const;
};

struct RankedEntry {
    std::size_t candidate = 0;   // position in the index
    std::string_view label;      // view into the index; valid while it lives
    std::size_t coarse_rank = 0; // 0-based position in the global-only ordering
    double s_global = 0.0;
    // Set for Top-K entries only.
    std::optional<double> s_local;
    std::optional<double> p_global;
    std::optional<double> p_local;
    std::optional<double> s_final;

    bool in_topk() const noexcept { return s_final.has_value(); }
};

struct RankingResult {
    std::size_t k = 0;  // effective Top-K size
    // Top-K entries by s_final, then the rest by s_global.
    std::vector<RankedEntry> entries;

    std::string_view top1() const noexcept { return entries.front().label; }
    std::size_t top1_candidate() const noexcept { return entries.front().candidate; }
    std::span<const RankedEntry> topk() const noexcept { return {entries.data(), k}; }
};

// Indices of the k largest scores, descending, ties by ascending index.
std::vector<std::size_t> select_topk(std::span<const double> scores, std::size_t k);

// softmax(scores / tau) with max-subtraction. Throws InvalidTemperature.
std::vector<double> normalize_topk(std::span<const double> scores, double tau);

// Element-wise product. Throws LengthMismatch.
std::vector<double> fuse(std::span<const double> p_global, std::span<const double> p_local);

// Position of the largest value, lowest position on ties.
std::size_t argmax(std::span<const double> values);

RankingResult infer(const QuerySample& query, const CandidateIndex& index, const InferenceConfig& cfg);

// infer() with k forced to the whole index; the reference for the hierarchical path.
RankingResult infer_exhaustive(const QuerySample& query, const CandidateIndex& index, const InferenceConfig& cfg);

// Columns: query_id,rank,label,s_global,s_local,p_global,p_local,s_final.
void write_ranking_csv_header(std::ostream& out);
void write_ranking_csv(std::string_view query_id, const RankingResult& result, std::ostream& out,
                       std::size_t max_rows = static_cast<std::size_t>(-1));

}  // namespace glyphrank
