#pragma once

// Test-only reference implementations. These are deliberately naive and share
// no code with the library kernels: plain nested loops over double copies of
// the data, direct softmax without max-subtraction.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "glyphrank/embedding.hpp"
#include "glyphrank/ids.hpp"

namespace glyphrank::testing {

using Matrix = std::vector<std::vector<double>>;

inline Matrix to_matrix(const LocalEmbeddingSet& m) {
    Matrix out(m.rows(), std::vector<double>(m.dim()));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t k = 0; k < m.dim(); ++k) out[i][k] = m.row(i)[k];
    }
    return out;
}

inline std::vector<double> to_vector(const GlobalEmbedding& g) { return {g.values().begin(), g.values().end()}; }

inline double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double naive_s_i2t(const Matrix& patches, const Matrix& tokens, const std::vector<std::uint8_t>& mask) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& v : patches) best = std::max(best, naive_dot(v, tokens[i]));
        num += mask[i] * best;
        den += mask[i];
    }
    return num / den;
}

inline double naive_s_t2i(const Matrix& patches, const Matrix& tokens, const std::vector<std::uint8_t>& mask) {
    double num = 0.0;
    for (const auto& v : patches) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (mask[i] == 1) best = std::max(best, naive_dot(v, tokens[i]));
        }
        num += best;
    }
    return num / static_cast<double>(patches.size());
}

// -1/B sum_i log( exp(S[i][i]/tau) / sum_j exp(S[i][j]/tau) )
inline double naive_direction_loss(const Matrix& s, double tau) {
    const std::size_t b = s.size();
    double total = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        double den = 0.0;
        for (std::size_t j = 0; j < b; ++j) den += std::exp(s[i][j] / tau);
        total += -std::log(std::exp(s[i][i] / tau) / den);
    }
    return total / static_cast<double>(b);
}

struct NaiveSample {
    std::vector<double> image_global, text_global;
    Matrix image_local, text_local;
    std::vector<std::uint8_t> mask;
};

inline double naive_global_loss(const std::vector<NaiveSample>& batch, double tau) {
    const std::size_t b = batch.size();
    Matrix i2t(b, std::vector<double>(b)), t2i(b, std::vector<double>(b));
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < b; ++j) {
            i2t[i][j] = naive_dot(batch[i].image_global, batch[j].text_global);
            t2i[i][j] = naive_dot(batch[i].text_global, batch[j].image_global);
        }
    }
    return 0.5 * (naive_direction_loss(i2t, tau) + naive_direction_loss(t2i, tau));
}

inline double naive_local_loss(const std::vector<NaiveSample>& batch, double tau) {
    const std::size_t b = batch.size();
    Matrix i2t(b, std::vector<double>(b)), t2i(b, std::vector<double>(b));
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = 0; j < b; ++j) {
            i2t[i][j] = naive_s_i2t(batch[i].image_local, batch[j].text_local, batch[j].mask);
            t2i[i][j] = naive_s_t2i(batch[j].image_local, batch[i].text_local, batch[i].mask);
        }
    }
    return 0.5 * (naive_direction_loss(i2t, tau) + naive_direction_loss(t2i, tau));
}

// ---- generators ---------------------------------------------------------

inline std::vector<float> random_unit(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> normal;
    std::vector<double> v(dim);
    double sq = 0.0;
    for (auto& x : v) {
        x = normal(rng);
        sq += x * x;
    }
    std::vector<float> out(dim);
    for (std::size_t k = 0; k < dim; ++k) out[k] = static_cast<float>(v[k] / std::sqrt(sq));
    return out;
}

inline LocalEmbeddingSet random_local(std::mt19937_64& rng, std::size_t rows, std::size_t dim) {
    std::vector<float> data;
    for (std::size_t i = 0; i < rows; ++i) {
        auto r = random_unit(rng, dim);
        data.insert(data.end(), r.begin(), r.end());
    }
    return LocalEmbeddingSet(rows, dim, std::move(data));
}

inline LocalEmbeddingSet rows_of(const std::vector<std::vector<float>>& rows) { return LocalEmbeddingSet(rows); }

inline std::vector<float> axis(std::size_t dim, std::size_t k, float sign = 1.0f) {
    std::vector<float> v(dim, 0.0f);
    v[k] = sign;
    return v;
}

// Random mask over `rows` tokens with at least one 1.
inline std::vector<std::uint8_t> random_mask(std::mt19937_64& rng, std::size_t rows) {
    std::vector<std::uint8_t> m(rows);
    for (auto& b : m) b = static_cast<std::uint8_t>(rng() & 1u);
    m[rng() % rows] = 1;
    return m;
}

// Prefix-order codepoints of a random well-formed IDS tree.
inline void grow_ids(std::mt19937_64& rng, int depth, std::u32string& out) {
    static constexpr char32_t binary[] = {0x2FF0, 0x2FF1, 0x2FF4, 0x2FF5, 0x2FF6,
                                          0x2FF7, 0x2FF8, 0x2FF9, 0x2FFA, 0x2FFB};
    static constexpr char32_t ternary[] = {0x2FF2, 0x2FF3};
    const bool leaf = depth >= 3 || (rng() % 100) < 45;
    if (leaf) {
        out.push_back(static_cast<char32_t>(0x4E00 + rng() % 20000));
        return;
    }
    const bool three = (rng() % 10) == 0;
    out.push_back(three ? ternary[rng() % 2] : binary[rng() % 10]);
    for (int c = 0; c < (three ? 3 : 2); ++c) grow_ids(rng, depth + 1, out);
}

inline std::u32string random_well_formed_ids(std::mt19937_64& rng) {
    std::u32string s;
    grow_ids(rng, 0, s);
    return s;
}

inline std::string utf8_of(const std::u32string& s) {
    std::string out;
    for (char32_t cp : s) {
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }
    return out;
}

inline Candidate make_candidate(std::string label, std::string_view ids, std::vector<float> global,
                                const std::vector<std::vector<float>>& local) {
    Candidate c;
    c.label = std::move(label);
    c.ids = parse_ids(ids);
    c.global = GlobalEmbedding(std::move(global));
    c.local = LocalEmbeddingSet(local);
    return c;
}

}  // namespace glyphrank::testing
