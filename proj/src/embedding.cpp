#include "glyphrank/embedding.hpp"

#include <cmath>

#include "glyphrank/error.hpp"

namespace glyphrank {

void normalize_row(std::span<float> row, std::optional<std::size_t> record) {
    double sq = 0.0;
    for (float x : row) {
        if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "embedding contains NaN or Inf", record);
        sq += static_cast<double>(x) * x;
    }
    const double norm = std::sqrt(sq);
    if (norm < kZeroNormThreshold) throw Error(ErrorCode::ZeroVector, "embedding has zero norm", record);
    if (std::abs(norm - 1.0) <= kRenormTolerance) return;
    const double inv = 1.0 / norm;
    for (float& x : row) x = static_cast<float>(x * inv);
}

void GlobalEmbedding::normalize(std::optional<std::size_t> record) {
    if (values_.empty()) throw Error(ErrorCode::DimMismatch, "global embedding is empty", record);
    normalize_row(values_, record);
}

LocalEmbeddingSet::LocalEmbeddingSet(std::size_t rows, std::size_t dim, std::vector<float> data)
    : rows_(rows), dim_(dim), data_(std::move(data)) {
    if (data_.size() != rows_ * dim_) {
        throw Error(ErrorCode::DimMismatch, "local embedding data has " + std::to_string(data_.size()) +
                                                " values, expected " + std::to_string(rows_ * dim_));
    }
}

LocalEmbeddingSet::LocalEmbeddingSet(const std::vector<std::vector<float>>& rows) {
    rows_ = rows.size();
    dim_ = rows.empty() ? 0 : rows.front().size();
    data_.reserve(rows_ * dim_);
    for (const auto& r : rows) {
        if (r.size() != dim_) throw Error(ErrorCode::DimMismatch, "ragged local embedding rows");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

void LocalEmbeddingSet::normalize(std::optional<std::size_t> record) {
    if (rows_ == 0 || dim_ == 0) throw Error(ErrorCode::RowMismatch, "local embedding set is empty", record);
    for (std::size_t i = 0; i < rows_; ++i) normalize_row(mutable_row(i), record);
}

CandidateIndex::CandidateIndex(std::vector<Candidate> candidates) : candidates_(std::move(candidates)) {
    if (candidates_.empty()) throw Error(ErrorCode::EmptyIndex, "candidate index is empty");
    dim_ = candidates_.front().global.dim();
    by_label_.reserve(candidates_.size());
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
        auto& c = candidates_[i];
        if (c.global.dim() != dim_ || c.local.dim() != dim_) {
            throw Error(ErrorCode::DimMismatch,
                        "candidate '" + c.label + "' has dim " + std::to_string(c.global.dim()) + "/" +
                            std::to_string(c.local.dim()) + ", index dim is " + std::to_string(dim_),
                        i);
        }
        if (c.ids.empty() || c.local.rows() != c.ids.size()) {
            throw Error(ErrorCode::RowMismatch,
                        "candidate '" + c.label + "' has " + std::to_string(c.local.rows()) +
                            " local rows for " + std::to_string(c.ids.size()) + " IDS tokens",
                        i);
        }
        if (c.ids.radical_count() == 0) {
            throw Error(ErrorCode::NoRadical, "candidate '" + c.label + "' has no radical token", i);
        }
        c.global.normalize(i);
        c.local.normalize(i);
        if (!by_label_.emplace(c.label, i).second) {
            throw Error(ErrorCode::DuplicateLabel, "duplicate label '" + c.label + "'", i);
        }
    }
}

std::optional<std::size_t> CandidateIndex::find(std::string_view label) const {
    auto it = by_label_.find(std::string(label));
    if (it == by_label_.end()) return std::nullopt;
    return it->second;
}

void QuerySample::normalize(std::optional<std::size_t> record) {
    global.normalize(record);
    if (local.dim() != global.dim()) {
        throw Error(ErrorCode::DimMismatch, "query '" + id + "' local/global dims differ", record);
    }
    local.normalize(record);
}

}  // namespace glyphrank
