#include "glyphrank/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "glyphrank/error.hpp"
#include "glyphrank/utf8.hpp"

namespace glyphrank {

namespace {

constexpr char32_t kBinaryOperators[] = {0x2FF0, 0x2FF1, 0x2FF4, 0x2FF5, 0x2FF6,
                                         0x2FF7, 0x2FF8, 0x2FF9, 0x2FFA, 0x2FFB};
constexpr char32_t kTernaryOperators[] = {0x2FF2, 0x2FF3};
constexpr std::size_t kMaxDrawAttempts = 10000;

using Rng = std::mt19937_64;

std::vector<double> gaussian(Rng& rng, std::size_t dim, double stddev) {
    std::vector<double> v(dim, 0.0);
    if (stddev == 0.0) return v;
    std::normal_distribution<double> normal(0.0, stddev);
    for (double& x : v) x = normal(rng);
    return v;
}

std::vector<float> to_unit_float(const std::vector<double>& v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    const double inv = 1.0 / std::sqrt(sq);
    std::vector<float> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] * inv);
    return out;
}

std::vector<float> random_unit(Rng& rng, std::size_t dim) { return to_unit_float(gaussian(rng, dim, 1.0)); }

// Prefix-order token list of a random tree with `ops` operators; radical
// tokens are encoded as their radical number, operators as their codepoint.
struct Token {
    bool is_operator;
    std::size_t value;
};

void grow(Rng& rng, std::size_t ops, std::size_t n_radicals, std::vector<Token>& out) {
    if (ops == 0) {
        out.push_back({false, std::uniform_int_distribution<std::size_t>(0, n_radicals - 1)(rng)});
        return;
    }
    const bool ternary = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < 0.1;
    const std::size_t arity = ternary ? 3 : 2;
    const char32_t op = ternary ? kTernaryOperators[rng() % std::size(kTernaryOperators)]
                                : kBinaryOperators[rng() % std::size(kBinaryOperators)];
    out.push_back({true, op});
    // Spread the remaining operators over the children.
    std::vector<std::size_t> child_ops(arity, 0);
    for (std::size_t i = 0; i + 1 < ops; ++i) child_ops[rng() % arity] += 1;
    for (std::size_t c : child_ops) grow(rng, c, n_radicals, out);
}

std::vector<double> mean_of(const std::vector<std::vector<float>>& protos, const std::vector<std::size_t>& radicals) {
    std::vector<double> mean(protos.front().size(), 0.0);
    for (std::size_t r : radicals) {
        for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += protos[r][k];
    }
    for (double& x : mean) x /= static_cast<double>(radicals.size());
    return mean;
}

}  // namespace

void SynthParams::validate() const {
    if (n_radicals < 2 || n_radicals > kSynthMaxRadicals) {
        throw Error(ErrorCode::InvalidParams, "n_radicals must be in [2, " + std::to_string(kSynthMaxRadicals) + "]");
    }
    if (n_candidates < 1 || n_candidates > kSynthMaxCandidates) {
        throw Error(ErrorCode::InvalidParams,
                    "n_candidates must be in [1, " + std::to_string(kSynthMaxCandidates) + "]");
    }
    if (dim < 4) throw Error(ErrorCode::InvalidParams, "dim must be >= 4");
    if (n_patches < 1 || n_patches > 65535) throw Error(ErrorCode::InvalidParams, "n_patches must be in [1, 65535]");
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw Error(ErrorCode::InvalidParams, "noise must be >= 0");
    if (!(token_jitter >= 0.0) || !std::isfinite(token_jitter)) {
        throw Error(ErrorCode::InvalidParams, "token_jitter must be >= 0");
    }
}

SynthData synth_generate(const SynthParams& params) {
    params.validate();
    Rng rng(params.seed);
    const std::size_t dim = params.dim;

    std::vector<std::vector<float>> protos;
    protos.reserve(params.n_radicals);
    for (std::size_t r = 0; r < params.n_radicals; ++r) protos.push_back(random_unit(rng, dim));

    std::vector<Candidate> candidates;
    std::vector<std::vector<std::size_t>> candidate_radicals;
    std::set<std::vector<std::size_t>> seen_multisets;
    candidates.reserve(params.n_candidates);
    std::uniform_int_distribution<std::size_t> op_count(1, 3);

    for (std::size_t j = 0; j < params.n_candidates; ++j) {
        std::vector<Token> tree;
        std::vector<std::size_t> radicals;
        bool fresh = false;
        for (std::size_t attempt = 0; attempt < kMaxDrawAttempts && !fresh; ++attempt) {
            tree.clear();
            grow(rng, op_count(rng), params.n_radicals, tree);
            radicals.clear();
            for (const auto& t : tree) {
                if (!t.is_operator) radicals.push_back(t.value);
            }
            auto key = radicals;
            std::sort(key.begin(), key.end());
            fresh = seen_multisets.insert(std::move(key)).second;
        }
        if (!fresh) {
            throw Error(ErrorCode::InvalidParams, "cannot draw " + std::to_string(params.n_candidates) +
                                                      " distinct radical combinations from " +
                                                      std::to_string(params.n_radicals) + " radicals");
        }

        std::vector<IdsToken> tokens;
        std::vector<float> local;
        local.reserve(tree.size() * dim);
        for (const auto& t : tree) {
            std::vector<float> row;
            if (t.is_operator) {
                tokens.push_back(classify_token(static_cast<char32_t>(t.value)));
                row = random_unit(rng, dim);
            } else {
                tokens.push_back(classify_token(kSynthRadicalBase + static_cast<char32_t>(t.value)));
                auto jitter = gaussian(rng, dim, params.token_jitter);
                for (std::size_t k = 0; k < dim; ++k) jitter[k] += protos[t.value][k];
                row = to_unit_float(jitter);
            }
            local.insert(local.end(), row.begin(), row.end());
        }

        Candidate c;
        c.label = utf8::encode(kSynthLabelBase + static_cast<char32_t>(j));
        c.ids = IdsSequence(std::move(tokens));
        c.global = GlobalEmbedding(to_unit_float(mean_of(protos, radicals)));
        c.local = LocalEmbeddingSet(tree.size(), dim, std::move(local));
        candidates.push_back(std::move(c));
        candidate_radicals.push_back(std::move(radicals));
    }

    const std::size_t n_queries = params.n_queries == 0 ? params.n_candidates : params.n_queries;
    std::uniform_int_distribution<std::size_t> pick(0, params.n_candidates - 1);
    std::vector<QuerySample> queries;
    queries.reserve(n_queries);
    for (std::size_t q = 0; q < n_queries; ++q) {
        const std::size_t src = pick(rng);
        const auto& radicals = candidate_radicals[src];
        std::vector<float> patches;
        patches.reserve(params.n_patches * dim);
        for (std::size_t n = 0; n < params.n_patches; ++n) {
            auto v = gaussian(rng, dim, params.noise);
            const auto& proto = protos[radicals[n % radicals.size()]];
            for (std::size_t k = 0; k < dim; ++k) v[k] += proto[k];
            auto row = to_unit_float(v);
            patches.insert(patches.end(), row.begin(), row.end());
        }
        auto global = mean_of(protos, radicals);
        if (params.noise > 0.0) {
            const auto g_noise = gaussian(rng, dim, params.noise);
            for (std::size_t k = 0; k < dim; ++k) global[k] += g_noise[k];
        }

        QuerySample sample;
        sample.id = "q" + std::to_string(q);
        sample.global = GlobalEmbedding(to_unit_float(global));
        sample.local = LocalEmbeddingSet(params.n_patches, dim, std::move(patches));
        sample.truth = candidates[src].label;
        queries.push_back(std::move(sample));
    }

    return {CandidateIndex(std::move(candidates)), std::move(queries)};
}

}  // namespace glyphrank
