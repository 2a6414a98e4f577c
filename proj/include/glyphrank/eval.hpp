#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "glyphrank/embedding.hpp"
#include "glyphrank/inference.hpp"

namespace glyphrank {

// Ground-truth labels of `queries`; throws MissingTruth if one has none.
std::vector<std::string> truths_of(std::span<const QuerySample> queries);

// Fraction of queries whose truth sits in the first k of the coarse (global)
// ordering. Throws MissingTruth if a truth label is not among the results.
double recall_at_k(std::span<const RankingResult> results, std::span<const std::string> truths, std::size_t k);

double top1_accuracy(std::span<const RankingResult> results, std::span<const std::string> truths);

// Worker count for parallel evaluation: GLYPHRANK_THREADS if set, capped by
// the hardware concurrency otherwise.
std::size_t default_thread_count();

std::vector<RankingResult> infer_batch(std::span<const QuerySample> queries, const CandidateIndex& index,
                                       const InferenceConfig& cfg, std::size_t threads = 1);

enum class TimingMode {
    Latency,     // one query at a time; per-query wall clock
    Throughput,  // queries spread over worker threads; wall clock / query count
};

struct SweepOptions {
    TimingMode mode = TimingMode::Latency;
    std::size_t threads = 1;  // Throughput mode only
    bool warmup = true;
};

struct SweepRow {
    std::size_t k = 0;
    double recall_at_k = 0.0;
    double top1_acc = 0.0;
    double latency_ms = 0.0;      // mean per query
    double latency_p95_ms = 0.0;  // Latency mode only, 0 otherwise
    TimingMode mode = TimingMode::Latency;
};

std::vector<SweepRow> sweep_k(const CandidateIndex& index, std::span<const QuerySample> queries,
                              std::span<const std::size_t> k_values, const InferenceConfig& cfg,
                              const SweepOptions& options = {});

void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out);

}  // namespace glyphrank
