#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "glyphrank/embedding.hpp"

namespace glyphrank {

/// Parameters for a synthetic index + query set built from shared radical
/// prototypes. Characters are random well-formed IDS over `n_radicals`
/// radicals; no two candidates share a radical multiset.
struct SynthParams {
    std::uint64_t seed = 0;
    std::size_t n_radicals = 32;
    std::size_t n_candidates = 100;
    std::size_t dim = 32;
    std::size_t n_patches = 16;
    double noise = 0.0;          // per-component Gaussian std added to queries
    std::size_t n_queries = 0;   // 0 means one per candidate
    double token_jitter = 0.01;  // per-component std added to candidate radical tokens

    void validate() const;
};

struct SynthData {
    CandidateIndex index;
    std::vector<QuerySample> queries;
};

// Radical r is U+4E00 + r, candidate j is labelled U+20000 + j.
inline constexpr char32_t kSynthRadicalBase = 0x4E00;
inline constexpr char32_t kSynthLabelBase = 0x20000;
inline constexpr std::size_t kSynthMaxRadicals = 0x9FFF - 0x4E00 + 1;
inline constexpr std::size_t kSynthMaxCandidates = 0x2A6DF - 0x20000 + 1;

SynthData synth_generate(const SynthParams& params);

}  // namespace glyphrank
