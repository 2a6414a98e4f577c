#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "glyphrank/eval.hpp"
#include "glyphrank/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace glyphrank;
using namespace glyphrank::testing;

namespace {

// Result whose truth "t" sits at the given coarse rank (0-based) and which
// puts `top` first after fusion.
RankingResult fake_result(std::size_t truth_rank, std::string_view top, std::size_t n = 6) {
    static const std::vector<std::string> names{"a", "b", "c", "d", "e", "f"};
    RankingResult r;
    r.k = n;
    std::size_t filler = 0;
    for (std::size_t i = 0; i < n; ++i) {
        RankedEntry e;
        e.candidate = i;
        e.coarse_rank = i;
        e.label = i == truth_rank ? std::string_view("t") : std::string_view(names[filler++]);
        e.s_final = 0.0;
        r.entries.push_back(e);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (r.entries[i].label == top) std::swap(r.entries[0], r.entries[i]);
    }
    return r;
}

SynthData data() {
    return synth_generate({.seed = 21, .n_radicals = 40, .n_candidates = 300, .dim = 32, .n_patches = 8,
                           .noise = 0.35, .n_queries = 60});
}

}  // namespace

TEST(Recall, Example) {
    const std::vector<RankingResult> rs{fake_result(0, "t"), fake_result(1, "a"), fake_result(4, "a")};
    const std::vector<std::string> truths(3, "t");
    EXPECT_DOUBLE_EQ(recall_at_k(rs, truths, 2), 2.0 / 3.0);
    EXPECT_EQ(recall_at_k(rs, truths, 5), 1.0);
    EXPECT_EQ(recall_at_k(rs, truths, 1000), 1.0);
    EXPECT_DOUBLE_EQ(top1_accuracy(rs, truths), 1.0 / 3.0);
}

TEST(Recall, Errors) {
    const std::vector<RankingResult> rs{fake_result(0, "t")};
    EXPECT_EQ(code_of([&] { recall_at_k(rs, std::vector<std::string>{"zz"}, 1); }), ErrorCode::MissingTruth);
    EXPECT_EQ(code_of([&] { recall_at_k(rs, std::vector<std::string>{}, 1); }), ErrorCode::LengthMismatch);
    const std::vector<QuerySample> qs{{"q", GlobalEmbedding(axis(2, 0)), rows_of({axis(2, 0)}), {}}};
    EXPECT_EQ(code_of([&] { truths_of(qs); }), ErrorCode::MissingTruth);
}

TEST(Top1, AllAndNone) {
    const std::vector<RankingResult> rs{fake_result(2, "t"), fake_result(3, "t")};
    EXPECT_EQ(top1_accuracy(rs, std::vector<std::string>(2, "t")), 1.0);
    const std::vector<RankingResult> wrong{fake_result(0, "a"), fake_result(1, "b")};
    EXPECT_EQ(top1_accuracy(wrong, std::vector<std::string>(2, "t")), 0.0);
}

TEST(Recall, FullKIsOneOnSynthetic) {
    const auto d = data();
    const auto rs = infer_batch(d.queries, d.index, {.k = 10});
    EXPECT_EQ(recall_at_k(rs, truths_of(d.queries), d.index.size()), 1.0);
}

TEST(InferBatch, ThreadCountDoesNotChangeResults) {
    const auto d = data();
    const auto a = infer_batch(d.queries, d.index, {.k = 20}, 1);
    const auto b = infer_batch(d.queries, d.index, {.k = 20}, 3);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_EQ(a[i].entries.size(), b[i].entries.size());
        for (std::size_t r = 0; r < a[i].entries.size(); ++r) {
            ASSERT_EQ(a[i].entries[r].candidate, b[i].entries[r].candidate);
        }
    }
}

TEST(Sweep, RecallNonDecreasingAndConsistent) {
    const auto d = data();
    const std::vector<std::size_t> ks{1, 5, 20, 100, 300, 1000};
    const auto rows = sweep_k(d.index, d.queries, ks, {});
    ASSERT_EQ(rows.size(), ks.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].k, ks[i]);
        EXPECT_EQ(rows[i].mode, TimingMode::Latency);
        EXPECT_GE(rows[i].latency_ms, 0.0);
        EXPECT_GE(rows[i].latency_p95_ms, 0.0);
        if (i > 0) EXPECT_GE(rows[i].recall_at_k, rows[i - 1].recall_at_k);
        const auto rs = infer_batch(d.queries, d.index, {.k = ks[i]});
        EXPECT_EQ(rows[i].top1_acc, top1_accuracy(rs, truths_of(d.queries)));
    }
    EXPECT_EQ(rows.back().recall_at_k, 1.0);
    EXPECT_EQ(rows[4].top1_acc, rows[5].top1_acc);
}

TEST(Sweep, ThroughputMode) {
    const auto d = data();
    const std::vector<std::size_t> ks{10};
    const auto lat = sweep_k(d.index, d.queries, ks, {});
    const auto thr = sweep_k(d.index, d.queries, ks, {}, {.mode = TimingMode::Throughput, .threads = 2});
    EXPECT_EQ(thr[0].mode, TimingMode::Throughput);
    EXPECT_EQ(thr[0].latency_p95_ms, 0.0);
    EXPECT_EQ(thr[0].recall_at_k, lat[0].recall_at_k);
    EXPECT_EQ(thr[0].top1_acc, lat[0].top1_acc);
}

TEST(Sweep, CsvOutput) {
    const std::vector<SweepRow> rows{{10, 0.5, 0.25, 1.5, 2.0, TimingMode::Latency},
                                     {20, 1.0, 0.75, 0.5, 0.0, TimingMode::Throughput}};
    std::ostringstream out;
    write_sweep_csv(rows, out);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "k,recall_at_k,top1_acc,latency_ms,latency_p95_ms,mode");
    EXPECT_NE(out.str().find("10,0.500000,0.250000,1.500000,2.000000,latency"), std::string::npos) << out.str();
    EXPECT_NE(out.str().find("20,1.000000,0.750000,0.500000,0.000000,throughput"), std::string::npos) << out.str();
}

TEST(Threads, EnvironmentOverride) {
    ::setenv("GLYPHRANK_THREADS", "3", 1);
    EXPECT_EQ(default_thread_count(), 3u);
    ::unsetenv("GLYPHRANK_THREADS");
    EXPECT_GE(default_thread_count(), 1u);
}
