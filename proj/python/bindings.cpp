#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "glyphrank/error.hpp"
#include "glyphrank/eval.hpp"
#include "glyphrank/ids.hpp"
#include "glyphrank/index_io.hpp"
#include "glyphrank/inference.hpp"
#include "glyphrank/losses.hpp"
#include "glyphrank/similarity.hpp"
#include "glyphrank/synth.hpp"

namespace py = pybind11;
using namespace glyphrank;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

GlobalEmbedding to_global(const FloatArray& a) {
    if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
    return GlobalEmbedding(std::vector<float>(a.data(), a.data() + a.size()));
}

LocalEmbeddingSet to_local(const FloatArray& a) {
    if (a.ndim() != 2) throw py::value_error("expected a 2-D (rows, dim) array");
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto dim = static_cast<std::size_t>(a.shape(1));
    return LocalEmbeddingSet(rows, dim, std::vector<float>(a.data(), a.data() + a.size()));
}

py::array_t<float> from_global(const GlobalEmbedding& g) {
    const auto v = g.values();
    return py::array_t<float>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<float> from_local(const LocalEmbeddingSet& m) {
    py::array_t<float> out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.dim())});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

InferenceConfig make_config(std::size_t k, double tau_g, double tau_l) {
    InferenceConfig cfg;
    cfg.k = k;
    cfg.tau_g = tau_g;
    cfg.tau_l = tau_l;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Python bindings for the glyphrank retrieval engine";

    static py::exception<Error> error_type(m, "GlyphrankError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error_type, e.what());
        }
    });

    // ---- IDS ----
    py::enum_<TokenKind>(m, "TokenKind").value("Radical", TokenKind::Radical).value("Operator", TokenKind::Operator);

    py::class_<IdsToken>(m, "IdsToken")
        .def_property_readonly("codepoint", [](const IdsToken& t) { return static_cast<std::uint32_t>(t.codepoint); })
        .def_readonly("kind", &IdsToken::kind)
        .def_readonly("arity", &IdsToken::arity)
        .def("__repr__", [](const IdsToken& t) {
            return "IdsToken(U+" + py::str("{:04X}").format(static_cast<std::uint32_t>(t.codepoint)).cast<std::string>() +
                   (t.is_radical() ? ", Radical)" : ", Operator)");
        });

    py::class_<IdsSequence>(m, "IdsSequence")
        .def_property_readonly("tokens", &IdsSequence::tokens)
        .def_property_readonly("mask", &IdsSequence::mask)
        .def("__len__", &IdsSequence::size)
        .def("__str__", &IdsSequence::to_string);

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("ok", &ValidationReport::ok)
        .def_readonly("position", &ValidationReport::position)
        .def_readonly("reason", &ValidationReport::reason);

    m.def(
        "classify_token",
        [](std::uint32_t cp, bool extended) { return classify_token(static_cast<char32_t>(cp), {extended}); },
        py::arg("codepoint"), py::arg("extended_operators") = false);
    m.def(
        "parse_ids",
        [](const std::string& text, bool extended, std::size_t max_length) {
            return parse_ids(text, IdsConfig{extended, max_length});
        },
        py::arg("text"), py::arg("extended_operators") = false, py::arg("max_length") = IdsConfig::kDefaultMaxLength);
    m.def("validate_ids", &validate_ids, py::arg("seq"));

    // ---- embeddings ----
    py::class_<Candidate>(m, "Candidate")
        .def_readonly("label", &Candidate::label)
        .def_readonly("ids", &Candidate::ids)
        .def_property_readonly("global_embedding", [](const Candidate& c) { return from_global(c.global); })
        .def_property_readonly("local_embedding", [](const Candidate& c) { return from_local(c.local); });

    py::class_<CandidateIndex>(m, "CandidateIndex")
        .def_property_readonly("dim", &CandidateIndex::dim)
        .def("__len__", &CandidateIndex::size)
        .def(
            "__getitem__",
            [](const CandidateIndex& idx, std::size_t i) -> const Candidate& {
                if (i >= idx.size()) throw py::index_error();
                return idx[i];
            },
            py::return_value_policy::reference_internal)
        .def("find", &CandidateIndex::find);

    py::class_<QuerySample>(m, "QuerySample")
        .def(py::init([](std::string id, const FloatArray& global, const FloatArray& local,
                         std::optional<std::string> truth) {
                 QuerySample q{std::move(id), to_global(global), to_local(local), std::move(truth)};
                 q.normalize();
                 return q;
             }),
             py::arg("id"), py::arg("global_embedding"), py::arg("local_embedding"), py::arg("truth") = py::none())
        .def_readonly("id", &QuerySample::id)
        .def_readonly("truth", &QuerySample::truth)
        .def_property_readonly("global_embedding", [](const QuerySample& q) { return from_global(q.global); })
        .def_property_readonly("local_embedding", [](const QuerySample& q) { return from_local(q.local); });

    m.def("load_index", [](const std::filesystem::path& p) { return io::load_index(p); }, py::arg("path"));
    m.def("save_index", &io::save_index, py::arg("index"), py::arg("path"));
    m.def("load_queries", &io::load_queries, py::arg("path"));
    m.def(
        "save_queries",
        [](const std::vector<QuerySample>& q, const std::filesystem::path& p) { io::save_queries(q, p); },
        py::arg("queries"), py::arg("path"));

    m.def(
        "synth_generate",
        [](std::uint64_t seed, std::size_t n_radicals, std::size_t n_candidates, std::size_t dim,
           std::size_t n_patches, double noise, std::size_t n_queries) {
            SynthParams p;
            p.seed = seed;
            p.n_radicals = n_radicals;
            p.n_candidates = n_candidates;
            p.dim = dim;
            p.n_patches = n_patches;
            p.noise = noise;
            p.n_queries = n_queries;
            auto data = synth_generate(p);
            return py::make_tuple(std::move(data.index), std::move(data.queries));
        },
        py::arg("seed"), py::arg("n_radicals"), py::arg("n_candidates"), py::arg("dim"), py::arg("n_patches"),
        py::arg("noise"), py::arg("n_queries") = 0);

    // ---- similarity ----
    m.def(
        "cosine", [](const FloatArray& u, const FloatArray& v) { return cosine(to_global(u), to_global(v)); },
        py::arg("u"), py::arg("v"));
    m.def(
        "s_i2t",
        [](const FloatArray& patches, const FloatArray& tokens, const Mask& mask) {
            return s_i2t(to_local(patches), to_local(tokens), mask);
        },
        py::arg("patches"), py::arg("tokens"), py::arg("mask"));
    m.def(
        "s_t2i",
        [](const FloatArray& patches, const FloatArray& tokens, const Mask& mask) {
            return s_t2i(to_local(patches), to_local(tokens), mask);
        },
        py::arg("patches"), py::arg("tokens"), py::arg("mask"));
    m.def(
        "response_map",
        [](const FloatArray& patches, const FloatArray& tokens, std::size_t token) {
            return response_map(to_local(patches), to_local(tokens), token).values;
        },
        py::arg("patches"), py::arg("tokens"), py::arg("token_index"));

    // ---- losses ----
    py::class_<BatchSample>(m, "BatchSample")
        .def(py::init([](const FloatArray& image_global, const FloatArray& text_global, const FloatArray& image_local,
                         const FloatArray& text_local, Mask mask) {
                 BatchSample s{to_global(image_global), to_global(text_global), to_local(image_local),
                               to_local(text_local), std::move(mask)};
                 s.image_global.normalize();
                 s.text_global.normalize();
                 s.image_local.normalize();
                 s.text_local.normalize();
                 return s;
             }),
             py::arg("image_global"), py::arg("text_global"), py::arg("image_local"), py::arg("text_local"),
             py::arg("mask"));

    py::class_<CurriculumSchedule>(m, "CurriculumSchedule")
        .def(py::init([](int total, int warmup, double alpha, double beta) {
                 CurriculumSchedule s{total, warmup, alpha, beta};
                 s.validate();
                 return s;
             }),
             py::arg("total_epochs"), py::arg("warmup_epochs"), py::arg("alpha") = CurriculumSchedule::kDefaultAlpha,
             py::arg("beta") = CurriculumSchedule::kDefaultBeta)
        .def_static("with_warmup_fraction", &CurriculumSchedule::with_warmup_fraction, py::arg("total_epochs"),
                    py::arg("fraction") = CurriculumSchedule::kWarmupFraction,
                    py::arg("alpha") = CurriculumSchedule::kDefaultAlpha,
                    py::arg("beta") = CurriculumSchedule::kDefaultBeta)
        .def_readonly("total_epochs", &CurriculumSchedule::total_epochs)
        .def_readonly("warmup_epochs", &CurriculumSchedule::warmup_epochs)
        .def_readonly("alpha", &CurriculumSchedule::alpha)
        .def_readonly("beta", &CurriculumSchedule::beta);

    m.def(
        "global_loss", [](const std::vector<BatchSample>& b, double tau) { return global_loss(b, tau); },
        py::arg("batch"), py::arg("tau_g"));
    m.def(
        "local_loss", [](const std::vector<BatchSample>& b, double tau) { return local_loss(b, tau); },
        py::arg("batch"), py::arg("tau_l"));
    m.def("lambda1", &lambda1, py::arg("t"), py::arg("schedule"));
    m.def("lambda2", &lambda2, py::arg("t"), py::arg("schedule"));
    m.def(
        "total_loss",
        [](const std::vector<BatchSample>& b, int t, const CurriculumSchedule& s, double tau_g, double tau_l) {
            const auto r = total_loss(b, t, s, tau_g, tau_l);
            py::dict d;
            d["total"] = r.total;
            d["global"] = r.global;
            d["local"] = r.local;
            d["l1"] = r.l1;
            d["l2"] = r.l2;
            return d;
        },
        py::arg("batch"), py::arg("t"), py::arg("schedule"), py::arg("tau_g"), py::arg("tau_l"));

    // ---- inference ----
    py::class_<RankedEntry>(m, "RankedEntry")
        .def_readonly("candidate", &RankedEntry::candidate)
        .def_property_readonly("label", [](const RankedEntry& e) { return std::string(e.label); })
        .def_readonly("coarse_rank", &RankedEntry::coarse_rank)
        .def_readonly("s_global", &RankedEntry::s_global)
        .def_readonly("s_local", &RankedEntry::s_local)
        .def_readonly("p_global", &RankedEntry::p_global)
        .def_readonly("p_local", &RankedEntry::p_local)
        .def_readonly("s_final", &RankedEntry::s_final);

    py::class_<RankingResult>(m, "RankingResult")
        .def_readonly("k", &RankingResult::k)
        .def_readonly("entries", &RankingResult::entries)
        .def_property_readonly("top1", [](const RankingResult& r) { return std::string(r.top1()); });

    m.def("select_topk", [](const std::vector<double>& s, std::size_t k) { return select_topk(s, k); },
          py::arg("scores"), py::arg("k"));
    m.def("normalize_topk", [](const std::vector<double>& s, double tau) { return normalize_topk(s, tau); },
          py::arg("scores"), py::arg("tau"));
    m.def("fuse", [](const std::vector<double>& a, const std::vector<double>& b) { return fuse(a, b); },
          py::arg("p_global"), py::arg("p_local"));
    m.def(
        "infer",
        [](const QuerySample& q, const CandidateIndex& idx, std::size_t k, double tau_g, double tau_l) {
            return infer(q, idx, make_config(k, tau_g, tau_l));
        },
        py::arg("query"), py::arg("index"), py::arg("k") = InferenceConfig::kDefaultK,
        py::arg("tau_g") = InferenceConfig::kDefaultTemperature,
        py::arg("tau_l") = InferenceConfig::kDefaultTemperature, py::keep_alive<0, 2>());
    m.def(
        "infer_exhaustive",
        [](const QuerySample& q, const CandidateIndex& idx, double tau_g, double tau_l) {
            return infer_exhaustive(q, idx, make_config(1, tau_g, tau_l));
        },
        py::arg("query"), py::arg("index"), py::arg("tau_g") = InferenceConfig::kDefaultTemperature,
        py::arg("tau_l") = InferenceConfig::kDefaultTemperature, py::keep_alive<0, 2>());

    // ---- evaluation ----
    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("k", &SweepRow::k)
        .def_readonly("recall_at_k", &SweepRow::recall_at_k)
        .def_readonly("top1_acc", &SweepRow::top1_acc)
        .def_readonly("latency_ms", &SweepRow::latency_ms)
        .def_readonly("latency_p95_ms", &SweepRow::latency_p95_ms);

    m.def(
        "recall_at_k",
        [](const std::vector<RankingResult>& r, const std::vector<std::string>& truths, std::size_t k) {
            return recall_at_k(r, truths, k);
        },
        py::arg("results"), py::arg("truths"), py::arg("k"));
    m.def(
        "top1_accuracy",
        [](const std::vector<RankingResult>& r, const std::vector<std::string>& truths) {
            return top1_accuracy(r, truths);
        },
        py::arg("results"), py::arg("truths"));
    m.def(
        "sweep_k",
        [](const CandidateIndex& idx, const std::vector<QuerySample>& queries, const std::vector<std::size_t>& ks,
           double tau_g, double tau_l) {
            py::gil_scoped_release release;
            return sweep_k(idx, queries, ks, make_config(1, tau_g, tau_l));
        },
        py::arg("index"), py::arg("queries"), py::arg("k_values"),
        py::arg("tau_g") = InferenceConfig::kDefaultTemperature,
        py::arg("tau_l") = InferenceConfig::kDefaultTemperature);
}
