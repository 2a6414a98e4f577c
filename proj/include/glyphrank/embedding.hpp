#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "glyphrank/ids.hpp"

namespace glyphrank {

// Rows whose norm is already within this distance of 1 are left bit-for-bit
// untouched by normalization, which keeps save/load/save byte-identical. A
// float32 row rescaled once lands within ~1.2e-7 of unit norm.
inline constexpr double kRenormTolerance = 1e-6;
inline constexpr double kUnitNormTolerance = 1e-5;
inline constexpr double kZeroNormThreshold = 1e-8;

// Rescales `row` to unit l2 norm. Throws ZeroVector / NonFinite.
void normalize_row(std::span<float> row, std::optional<std::size_t> record = std::nullopt);

class GlobalEmbedding {
public:
    GlobalEmbedding() = default;
    // Stored as given; call normalize() to enforce the unit-norm invariant.
    explicit GlobalEmbedding(std::vector<float> values) : values_(std::move(values)) {}

    std::span<const float> values() const noexcept { return values_; }
    std::size_t dim() const noexcept { return values_.size(); }

    void normalize(std::optional<std::size_t> record = std::nullopt);

    friend bool operator==(const GlobalEmbedding&, const GlobalEmbedding&) = default;

private:
    std::vector<float> values_;
};

/// Row-major rows x dim matrix: image patches (N_p rows) or IDS tokens (M rows).
class LocalEmbeddingSet {
public:
    LocalEmbeddingSet() = default;
    LocalEmbeddingSet(std::size_t rows, std::size_t dim, std::vector<float> data);
    explicit LocalEmbeddingSet(const std::vector<std::vector<float>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t dim() const noexcept { return dim_; }
    std::span<const float> row(std::size_t i) const noexcept { return {data_.data() + i * dim_, dim_}; }
    std::span<float> mutable_row(std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }
    std::span<const float> data() const noexcept { return data_; }

    void normalize(std::optional<std::size_t> record = std::nullopt);

    friend bool operator==(const LocalEmbeddingSet&, const LocalEmbeddingSet&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t dim_ = 0;
    std::vector<float> data_;
};

struct Candidate {
    std::string label;
    IdsSequence ids;
    GlobalEmbedding global;
    LocalEmbeddingSet local;  // one row per IDS token, operators included

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// Immutable full category set. Construction normalizes every embedding and
/// checks the invariants: non-empty, shared dim, unique labels, one local row
/// per IDS token, at least one radical per candidate.
class CandidateIndex {
public:
    explicit CandidateIndex(std::vector<Candidate> candidates);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return candidates_.size(); }
    const Candidate& operator[](std::size_t i) const noexcept { return candidates_[i]; }
    const std::vector<Candidate>& candidates() const noexcept { return candidates_; }
    std::optional<std::size_t> find(std::string_view label) const;

    auto begin() const noexcept { return candidates_.begin(); }
    auto end() const noexcept { return candidates_.end(); }

    friend bool operator==(const CandidateIndex& a, const CandidateIndex& b) {
        return a.candidates_ == b.candidates_;
    }

private:
    std::size_t dim_ = 0;
    std::vector<Candidate> candidates_;
    std::unordered_map<std::string, std::size_t> by_label_;
};

struct QuerySample {
    std::string id;
    GlobalEmbedding global;
    LocalEmbeddingSet local;  // N_p patch rows
    std::optional<std::string> truth;

    void normalize(std::optional<std::size_t> record = std::nullopt);
    std::size_t dim() const noexcept { return global.dim(); }

    friend bool operator==(const QuerySample&, const QuerySample&) = default;
};

}  // namespace glyphrank
