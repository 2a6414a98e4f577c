#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "glyphrank/similarity.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace glyphrank;
using namespace glyphrank::testing;

namespace {

LocalEmbeddingSet permute_rows(const LocalEmbeddingSet& m, const std::vector<std::size_t>& perm) {
    std::vector<std::vector<float>> rows;
    for (std::size_t i : perm) rows.emplace_back(m.row(i).begin(), m.row(i).end());
    return LocalEmbeddingSet(rows);
}

}  // namespace

TEST(Cosine, Examples) {
    const GlobalEmbedding e1(axis(3, 0)), e2(axis(3, 1)), neg(axis(3, 0, -1.0f));
    EXPECT_EQ(cosine(e1, e1), 1.0);
    EXPECT_EQ(cosine(e1, e2), 0.0);
    EXPECT_EQ(cosine(e1, neg), -1.0);
    EXPECT_EQ(code_of([&] { cosine(e1, GlobalEmbedding(axis(4, 0))); }), ErrorCode::DimMismatch);
}

TEST(Cosine, ClampsRoundingExcess) {
    // Slightly over-unit row: the raw dot exceeds 1.
    const GlobalEmbedding u({0.70710683f, 0.70710683f});
    EXPECT_LE(cosine(u, u), 1.0);
}

TEST(GlobalScores, PlantedAngles) {
    std::vector<Candidate> cs;
    cs.push_back(make_candidate("a", "木", {0.6f, 0.8f}, {{1, 0}}));
    cs.push_back(make_candidate("b", "木", {0.2f, static_cast<float>(std::sqrt(0.96))}, {{1, 0}}));
    const CandidateIndex idx(std::move(cs));
    QuerySample q{"q", GlobalEmbedding(axis(2, 0)), LocalEmbeddingSet({axis(2, 0)}), {}};
    const auto s = global_scores(q, idx);
    ASSERT_EQ(s.size(), 2u);
    // Oracle: direct dot product of the stored float rows.
    EXPECT_NEAR(s[0], naive_dot(to_vector(q.global), to_vector(idx[0].global)), 1e-15);
    EXPECT_NEAR(s[0], 0.6, 1e-7);
    EXPECT_NEAR(s[1], 0.2, 1e-7);
}

TEST(GlobalScores, IdenticalEmbeddingScoresOne) {
    std::vector<Candidate> cs;
    cs.push_back(make_candidate("a", "木", axis(3, 1), {axis(3, 1)}));
    cs.push_back(make_candidate("b", "木", axis(3, 0), {axis(3, 1)}));
    const CandidateIndex idx(std::move(cs));
    QuerySample q{"q", GlobalEmbedding(axis(3, 0)), LocalEmbeddingSet({axis(3, 0)}), {}};
    EXPECT_EQ(global_scores(q, idx)[1], 1.0);
    QuerySample bad{"q", GlobalEmbedding(axis(2, 0)), LocalEmbeddingSet({axis(2, 0)}), {}};
    EXPECT_EQ(code_of([&] { global_scores(bad, idx); }), ErrorCode::DimMismatch);
}

TEST(LocalSimilarity, TokenDrivenExamples) {
    const auto v = rows_of({axis(3, 0), axis(3, 1)});
    EXPECT_EQ(s_i2t(v, rows_of({axis(3, 1)}), Mask{1}), 1.0);
    const auto t = rows_of({axis(3, 2), axis(3, 0), axis(3, 1)});
    EXPECT_EQ(s_i2t(v, t, Mask{0, 1, 1}), 1.0);
    EXPECT_DOUBLE_EQ(s_i2t(v, t, Mask{1, 1, 1}), 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(naive_s_i2t(to_matrix(v), to_matrix(t), {1, 1, 1}), 2.0 / 3.0);
    EXPECT_EQ(code_of([&] { s_i2t(v, rows_of({axis(3, 0), axis(3, 1)}), Mask{0, 0}); }), ErrorCode::EmptyMask);
}

TEST(LocalSimilarity, PatchDrivenExamples) {
    const auto tok = rows_of({axis(3, 0)});
    EXPECT_EQ(s_t2i(rows_of({axis(3, 0), axis(3, 0)}), tok, Mask{1}), 1.0);
    const auto v = rows_of({axis(3, 0), axis(3, 1)});
    EXPECT_EQ(s_t2i(v, tok, Mask{1}), 0.5);
    EXPECT_EQ(naive_s_t2i(to_matrix(v), to_matrix(tok), {1}), 0.5);
    EXPECT_EQ(code_of([&] { s_t2i(v, rows_of({axis(3, 0), axis(3, 1)}), Mask{0, 0}); }), ErrorCode::EmptyMask);
}

TEST(LocalSimilarity, ArgumentErrors) {
    const auto v = rows_of({axis(3, 0)});
    EXPECT_EQ(code_of([&] { s_t2i(v, rows_of({axis(4, 0)}), Mask{1}); }), ErrorCode::DimMismatch);
    EXPECT_EQ(code_of([&] { s_i2t(v, rows_of({axis(3, 0)}), Mask{1, 1}); }), ErrorCode::LengthMismatch);
}

TEST(LocalSimilarity, BruteForceParity) {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t d = 1 + rng() % 8, np = 1 + rng() % 8, m = 1 + rng() % 8;
        const auto v = random_local(rng, np, d);
        const auto t = random_local(rng, m, d);
        const auto mask = random_mask(rng, m);
        ASSERT_NEAR(s_i2t(v, t, mask), naive_s_i2t(to_matrix(v), to_matrix(t), mask), 1e-9);
        ASSERT_NEAR(s_t2i(v, t, mask), naive_s_t2i(to_matrix(v), to_matrix(t), mask), 1e-9);
    }
}

TEST(LocalSimilarity, RangeAndMaskInvariance) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = 2 + rng() % 16, np = 1 + rng() % 12, m = 1 + rng() % 10;
        const auto v = random_local(rng, np, d);
        auto t = random_local(rng, m, d);
        const auto mask = random_mask(rng, m);
        const double i2t = s_i2t(v, t, mask), t2i = s_t2i(v, t, mask);
        ASSERT_GE(i2t, -1.0 - 1e-6);
        ASSERT_LE(i2t, 1.0 + 1e-6);
        ASSERT_GE(t2i, -1.0 - 1e-6);
        ASSERT_LE(t2i, 1.0 + 1e-6);
        for (std::size_t i = 0; i < m; ++i) {
            if (mask[i]) continue;
            const auto r = random_unit(rng, d);
            std::copy(r.begin(), r.end(), t.mutable_row(i).begin());
        }
        ASSERT_EQ(s_i2t(v, t, mask), i2t);
        ASSERT_EQ(s_t2i(v, t, mask), t2i);
    }
}

TEST(LocalSimilarity, PatchExtensionNeverLowersTokenDriven) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 2 + rng() % 8, np = 1 + rng() % 6, m = 1 + rng() % 6;
        const auto v = random_local(rng, np, d);
        const auto t = random_local(rng, m, d);
        const auto mask = random_mask(rng, m);
        std::vector<float> extended(v.data().begin(), v.data().end());
        const auto extra = random_unit(rng, d);
        extended.insert(extended.end(), extra.begin(), extra.end());
        ASSERT_GE(s_i2t(LocalEmbeddingSet(np + 1, d, extended), t, mask), s_i2t(v, t, mask));
    }
}

TEST(LocalSimilarity, PermutationInvariance) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 2 + rng() % 8, np = 1 + rng() % 8, m = 1 + rng() % 8;
        const auto v = random_local(rng, np, d);
        const auto t = random_local(rng, m, d);
        const auto mask = random_mask(rng, m);
        std::vector<std::size_t> pp(np), tp(m);
        std::iota(pp.begin(), pp.end(), 0);
        std::iota(tp.begin(), tp.end(), 0);
        std::shuffle(pp.begin(), pp.end(), rng);
        std::shuffle(tp.begin(), tp.end(), rng);
        Mask permuted_mask;
        for (std::size_t i : tp) permuted_mask.push_back(mask[i]);
        const auto v2 = permute_rows(v, pp);
        const auto t2 = permute_rows(t, tp);
        ASSERT_NEAR(s_i2t(v2, t2, permuted_mask), s_i2t(v, t, mask), 1e-12);
        ASSERT_NEAR(s_t2i(v2, t2, permuted_mask), s_t2i(v, t, mask), 1e-12);
    }
}

TEST(ResponseMap, Examples) {
    const auto v = rows_of({axis(3, 0), axis(3, 1), axis(3, 2)});
    EXPECT_EQ(response_map(v, rows_of({axis(3, 0)}), 0).values, (std::vector<double>{1, 0, 0}));
    EXPECT_EQ(response_map(v, rows_of({axis(3, 1), axis(3, 0, -1)}), 1).values[0], -1.0);
    EXPECT_EQ(code_of([&] { response_map(v, rows_of({axis(3, 0)}), 1); }), ErrorCode::IndexOutOfRange);
}

TEST(ResponseMap, MatchesElementwiseOracle) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 2 + rng() % 16, np = 1 + rng() % 49, m = 1 + rng() % 6;
        const auto v = random_local(rng, np, d);
        const auto t = random_local(rng, m, d);
        const std::size_t token = rng() % m;
        const auto map = response_map(v, t, token);
        ASSERT_EQ(map.values.size(), np);
        const auto vm = to_matrix(v), tm = to_matrix(t);
        for (std::size_t n = 0; n < np; ++n) {
            ASSERT_NEAR(map.values[n], naive_dot(vm[n], tm[token]), 1e-6);
            ASSERT_LE(std::abs(map.values[n]), 1.0 + 1e-6);
        }
    }
}

TEST(ResponseMap, CsvFormat) {
    const ResponseMap map{0, {1.0, -0.123456789012, 0.5}};
    std::ostringstream out;
    write_response_map_csv(map, out);
    EXPECT_EQ(out.str(), "patch_index,response\n0,1\n1,-0.123456789\n2,0.5\n");
}
