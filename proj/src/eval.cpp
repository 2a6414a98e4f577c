#include "glyphrank/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <thread>

#include "glyphrank/error.hpp"

namespace glyphrank {

namespace {

using Clock = std::chrono::steady_clock;

const RankedEntry& truth_entry(const RankingResult& result, const std::string& truth, std::size_t query) {
    auto it = std::find_if(result.entries.begin(), result.entries.end(),
                           [&](const RankedEntry& e) { return e.label == truth; });
    if (it == result.entries.end()) {
        throw Error(ErrorCode::MissingTruth, "truth label '" + truth + "' is not in the index", query);
    }
    return *it;
}

void check_sizes(std::span<const RankingResult> results, std::span<const std::string> truths) {
    if (results.size() != truths.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(results.size()) + " results for " +
                                                   std::to_string(truths.size()) + " truths");
    }
    if (results.empty()) throw Error(ErrorCode::MissingTruth, "no queries to score");
}

double percentile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size()))) - 1;
    return values[std::min(idx, values.size() - 1)];
}

}  // namespace

std::vector<std::string> truths_of(std::span<const QuerySample> queries) {
    std::vector<std::string> truths;
    truths.reserve(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        if (!queries[i].truth) throw Error(ErrorCode::MissingTruth, "query '" + queries[i].id + "' has no truth", i);
        truths.push_back(*queries[i].truth);
    }
    return truths;
}

double recall_at_k(std::span<const RankingResult> results, std::span<const std::string> truths, std::size_t k) {
    check_sizes(results, truths);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (truth_entry(results[i], truths[i], i).coarse_rank < k) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(results.size());
}

double top1_accuracy(std::span<const RankingResult> results, std::span<const std::string> truths) {
    check_sizes(results, truths);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
        truth_entry(results[i], truths[i], i);
        if (results[i].top1() == truths[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(results.size());
}

std::size_t default_thread_count() {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("GLYPHRANK_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
    }
    return hw;
}

std::vector<RankingResult> infer_batch(std::span<const QuerySample> queries, const CandidateIndex& index,
                                       const InferenceConfig& cfg, std::size_t threads) {
    std::vector<RankingResult> results(queries.size());
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, queries.size()));
    if (threads == 1) {
        for (std::size_t i = 0; i < queries.size(); ++i) results[i] = infer(queries[i], index, cfg);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> workers;
        for (std::size_t t = 0; t < threads; ++t) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < queries.size() && !failed; i = next++) {
                    try {
                        results[i] = infer(queries[i], index, cfg);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

std::vector<SweepRow> sweep_k(const CandidateIndex& index, std::span<const QuerySample> queries,
                              std::span<const std::size_t> k_values, const InferenceConfig& cfg,
                              const SweepOptions& options) {
    if (k_values.empty()) throw Error(ErrorCode::InvalidParams, "no k values to sweep");
    for (std::size_t k : k_values) {
        if (k < 1) throw Error(ErrorCode::InvalidParams, "k values must be >= 1");
    }
    const auto truths = truths_of(queries);

    if (options.warmup) {
        InferenceConfig warm = cfg;
        warm.k = k_values.front();
        for (const auto& q : queries) (void)infer(q, index, warm);
    }

    std::vector<SweepRow> rows;
    rows.reserve(k_values.size());
    for (std::size_t k : k_values) {
        InferenceConfig run = cfg;
        run.k = k;
        SweepRow row;
        row.k = k;
        row.mode = options.mode;
        std::vector<RankingResult> results;
        if (options.mode == TimingMode::Latency) {
            results.resize(queries.size());
            std::vector<double> ms(queries.size());
            for (std::size_t i = 0; i < queries.size(); ++i) {
                const auto start = Clock::now();
                results[i] = infer(queries[i], index, run);
                ms[i] = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
            }
            double sum = 0.0;
            for (double m : ms) sum += m;
            row.latency_ms = sum / static_cast<double>(ms.size());
            row.latency_p95_ms = percentile(std::move(ms), 0.95);
        } else {
            const auto start = Clock::now();
            results = infer_batch(queries, index, run, options.threads);
            const double total = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
            row.latency_ms = total / static_cast<double>(queries.size());
        }
        row.recall_at_k = recall_at_k(results, truths, k);
        row.top1_acc = top1_accuracy(results, truths);
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(std::span<const SweepRow> rows, std::ostream& out) {
    out << "k,recall_at_k,top1_acc,latency_ms,latency_p95_ms,mode\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%.6f,%s\n", r.k, r.recall_at_k, r.top1_acc, r.latency_ms,
                      r.latency_p95_ms, r.mode == TimingMode::Latency ? "latency" : "throughput");
        out << buf;
    }
}

}  // namespace glyphrank
