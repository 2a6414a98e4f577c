#pragma once

// On-disk formats.
//
// GLIX (candidate index), all integers little-endian:
//   "GLIX" | version u32 (=1) | dim u32 | count u32
//   per candidate: label_len u16 | label UTF-8 | ids_len u16 | ids UTF-8 |
//                  M u16 | dim x f32 global | M x dim x f32 local
//
// GLQY (queries) has the same header with magic "GLQY"; per query:
//   id_len u16 | id | truth_len u16 | truth (0 = absent) |
//   N_p u16 | dim x f32 global | N_p x dim x f32 local
//
// The JSON Lines debug formats carry the same fields, one record per line:
//   {"label", "ids", "global": [...], "local": [[...], ...]}
//   {"id", "truth", "global": [...], "local": [[...], ...]}
// Floats are written as the shortest decimal that round-trips the float32.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "glyphrank/embedding.hpp"
#include "glyphrank/ids.hpp"
#include "glyphrank/losses.hpp"

namespace glyphrank::io {

inline constexpr char kIndexMagic[4] = {'G', 'L', 'I', 'X'};
inline constexpr char kQueryMagic[4] = {'G', 'L', 'Q', 'Y'};
inline constexpr std::uint32_t kFormatVersion = 1;

void write_index(const CandidateIndex& index, std::ostream& out);
CandidateIndex read_index(std::istream& in, const IdsConfig& cfg = {});
void save_index(const CandidateIndex& index, const std::filesystem::path& path);
CandidateIndex load_index(const std::filesystem::path& path, const IdsConfig& cfg = {});

void write_queries(std::span<const QuerySample> queries, std::ostream& out);
std::vector<QuerySample> read_queries(std::istream& in);
void save_queries(std::span<const QuerySample> queries, const std::filesystem::path& path);
std::vector<QuerySample> load_queries(const std::filesystem::path& path);

std::string format_float(float value);

void write_index_jsonl(const CandidateIndex& index, std::ostream& out);
CandidateIndex read_index_jsonl(std::istream& in, const IdsConfig& cfg = {});
void write_queries_jsonl(std::span<const QuerySample> queries, std::ostream& out);
std::vector<QuerySample> read_queries_jsonl(std::istream& in);

/// One embedding record without IDS, as fed to `build-index`:
/// {"label", "global", "local"}. Any "ids" field present is returned too.
struct EmbeddingRecord {
    std::string label;
    std::string ids;
    GlobalEmbedding global;
    LocalEmbeddingSet local;
};
std::vector<EmbeddingRecord> read_embedding_records_jsonl(std::istream& in);

// Builds an index by joining embedding records with an IDS dictionary. The
// dictionary entry wins over a record's own "ids" field; a label with neither
// raises MissingIds.
CandidateIndex build_index(std::vector<EmbeddingRecord> records, const IdsDictionary& dict,
                           const IdsConfig& cfg = {});

/// Paired training samples for loss parity checks: a candidate record
/// ({"label", "ids", "global", "local"}, the text side) plus the matched
/// image side as "image_global" and "image_local". Embeddings are normalized.
std::vector<BatchSample> read_batch_jsonl(std::istream& in, const IdsConfig& cfg = {});

// Opens a file for writing or throws Error{Io} naming the path.
std::ofstream open_output(const std::filesystem::path& path, bool binary);
std::ifstream open_input(const std::filesystem::path& path, bool binary);

}  // namespace glyphrank::io
