#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "glyphrank/error.hpp"
#include "glyphrank/eval.hpp"
#include "glyphrank/ids.hpp"
#include "glyphrank/index_io.hpp"
#include "glyphrank/inference.hpp"
#include "glyphrank/losses.hpp"
#include "glyphrank/similarity.hpp"
#include "glyphrank/synth.hpp"
#include "glyphrank/utf8.hpp"

namespace glyphrank::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

bool is_jsonl(const fs::path& p) { return p.extension() == ".jsonl"; }

CandidateIndex read_index_file(const fs::path& path, const IdsConfig& cfg) {
    if (!is_jsonl(path)) return io::load_index(path, cfg);
    auto in = io::open_input(path, false);
    return io::read_index_jsonl(in, cfg);
}

std::vector<QuerySample> read_queries_file(const fs::path& path) {
    if (!is_jsonl(path)) return io::load_queries(path);
    auto in = io::open_input(path, false);
    return io::read_queries_jsonl(in);
}

void write_index_file(const CandidateIndex& index, const fs::path& path) {
    if (!is_jsonl(path)) return io::save_index(index, path);
    auto out = io::open_output(path, false);
    io::write_index_jsonl(index, out);
    if (!out.flush()) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

void write_queries_file(std::span<const QuerySample> queries, const fs::path& path) {
    if (!is_jsonl(path)) return io::save_queries(queries, path);
    auto out = io::open_output(path, false);
    io::write_queries_jsonl(queries, out);
    if (!out.flush()) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::string codepoint_name(char32_t cp) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(cp));
    return buf;
}

json describe_ids(const IdsSequence& seq) {
    json tokens = json::array();
    for (const auto& t : seq.tokens()) {
        tokens.push_back({{"codepoint", codepoint_name(t.codepoint)},
                          {"char", utf8::encode(t.codepoint)},
                          {"kind", t.is_radical() ? "radical" : "operator"},
                          {"arity", t.arity}});
    }
    const auto report = validate_ids(seq);
    json out = {{"ids", seq.to_string()}, {"tokens", tokens}, {"mask", seq.mask()}, {"valid", report.ok}};
    if (!report.ok) out["violation"] = {{"position", *report.position}, {"reason", report.reason}};
    return out;
}

std::vector<std::size_t> parse_k_list(const std::string& text, std::size_t full) {
    std::vector<std::size_t> ks;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "full") {
            ks.push_back(full);
            continue;
        }
        try {
            std::size_t used = 0;
            const long v = std::stol(item, &used);
            if (used != item.size() || v < 1) throw std::invalid_argument(item);
            ks.push_back(static_cast<std::size_t>(v));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidParams, "bad k value '" + item + "'");
        }
    }
    if (ks.empty()) throw Error(ErrorCode::InvalidParams, "empty k list");
    return ks;
}

const QuerySample& find_query(std::span<const QuerySample> queries, const std::string& id) {
    for (const auto& q : queries) {
        if (q.id == id) return q;
    }
    throw Error(ErrorCode::UnknownLabel, "no query with id '" + id + "'");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Zero-shot ideographic character retrieval engine"};
    app.require_subcommand(1);

    bool extended_ops = false;
    app.add_flag("--extended-operators", extended_ops, "Treat U+2FFC..U+2FFF as structural operators");

    // parse-ids
    auto* parse_cmd = app.add_subcommand("parse-ids", "Parse an IDS string or an IDS dictionary file");
    std::string parse_input;
    parse_cmd->add_option("input", parse_input, "IDS string, or path to a <char>\\t<IDS> file")->required();

    // build-index
    auto* build_cmd = app.add_subcommand("build-index", "Join an IDS dictionary with embedding records");
    std::string dict_path, embeddings_path, build_out;
    build_cmd->add_option("--dict", dict_path)->required();
    build_cmd->add_option("--embeddings", embeddings_path)->required();
    build_cmd->add_option("--out", build_out, "GLIX file (.jsonl for the debug format)")->required();

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic index and query set");
    SynthParams synth;
    std::string synth_index_out, synth_queries_out;
    synth_cmd->add_option("--seed", synth.seed)->required();
    synth_cmd->add_option("--radicals", synth.n_radicals)->required();
    synth_cmd->add_option("--candidates", synth.n_candidates)->required();
    synth_cmd->add_option("--dim", synth.dim)->required();
    synth_cmd->add_option("--patches", synth.n_patches)->required();
    synth_cmd->add_option("--noise", synth.noise)->required();
    synth_cmd->add_option("--queries", synth.n_queries, "Query count (default: one per candidate)");
    synth_cmd->add_option("--token-jitter", synth.token_jitter)->capture_default_str();
    synth_cmd->add_option("--out-index", synth_index_out)->required();
    synth_cmd->add_option("--out-queries", synth_queries_out)->required();

    // query / evaluate / sweep-k share these
    std::string index_path, queries_path;
    InferenceConfig infer_cfg;
    const auto add_inference_options = [&](CLI::App* cmd, bool with_k) {
        cmd->add_option("--index", index_path)->required();
        cmd->add_option("--queries", queries_path)->required();
        if (with_k) cmd->add_option("--k", infer_cfg.k)->capture_default_str();
        cmd->add_option("--tau-g", infer_cfg.tau_g)->capture_default_str();
        cmd->add_option("--tau-l", infer_cfg.tau_l)->capture_default_str();
    };

    auto* query_cmd = app.add_subcommand("query", "Rank every query against the index");
    std::string query_out;
    std::size_t max_rows = static_cast<std::size_t>(-1);
    add_inference_options(query_cmd, true);
    query_cmd->add_option("--out", query_out, "CSV output")->required();
    query_cmd->add_option("--max-rows", max_rows, "Rows per query (default: all candidates)");

    auto* eval_cmd = app.add_subcommand("evaluate", "Top-1 accuracy and Recall@K");
    add_inference_options(eval_cmd, true);

    auto* sweep_cmd = app.add_subcommand("sweep-k", "Recall / accuracy / latency over several K");
    std::string k_list = "10,30,50,100,500,full";
    std::string sweep_out;
    bool parallel = false;
    add_inference_options(sweep_cmd, false);
    sweep_cmd->add_option("--k-list", k_list)->capture_default_str();
    sweep_cmd->add_option("--out", sweep_out, "CSV output")->required();
    sweep_cmd->add_flag("--parallel", parallel, "Throughput mode over GLYPHRANK_THREADS workers");

    // loss-eval
    auto* loss_cmd = app.add_subcommand("loss-eval", "Reference loss values for a JSONL batch");
    std::string batch_path;
    int epoch = 0;
    int total_epochs = 50;
    int warmup_epochs = -1;
    double alpha = CurriculumSchedule::kDefaultAlpha;
    double beta = CurriculumSchedule::kDefaultBeta;
    double loss_tau_g = InferenceConfig::kDefaultTemperature;
    double loss_tau_l = InferenceConfig::kDefaultTemperature;
    loss_cmd->add_option("--batch", batch_path)->required();
    loss_cmd->add_option("--epoch", epoch)->capture_default_str();
    loss_cmd->add_option("--total-epochs", total_epochs)->capture_default_str();
    loss_cmd->add_option("--warmup-epochs", warmup_epochs, "Default: ceil(25% of total)");
    loss_cmd->add_option("--alpha", alpha)->capture_default_str();
    loss_cmd->add_option("--beta", beta)->capture_default_str();
    loss_cmd->add_option("--tau-g", loss_tau_g)->capture_default_str();
    loss_cmd->add_option("--tau-l", loss_tau_l)->capture_default_str();

    // response-map
    auto* map_cmd = app.add_subcommand("response-map", "Export one token's response over a query's patches");
    std::string map_query, map_label, map_out;
    std::size_t map_token = 0;
    map_cmd->add_option("--index", index_path)->required();
    map_cmd->add_option("--queries", queries_path)->required();
    map_cmd->add_option("--query", map_query, "Query id")->required();
    map_cmd->add_option("--label", map_label, "Candidate label")->required();
    map_cmd->add_option("--token", map_token, "Token position within the candidate IDS")->required();
    map_cmd->add_option("--out", map_out, "CSV output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitValidation;
    }

    IdsConfig ids_cfg;
    ids_cfg.extended_operators = extended_ops;

    try {
        if (*parse_cmd) {
            if (fs::is_regular_file(parse_input)) {
                const auto dict = IdsDictionary::load(parse_input);
                for (const auto& w : dict.warnings()) err << "warning: " << w << "\n";
                for (const auto& ch : dict.characters()) {
                    auto j = describe_ids(parse_ids(*dict.find(ch), ids_cfg));
                    j["character"] = ch;
                    out << j.dump() << "\n";
                }
            } else {
                out << describe_ids(parse_ids(parse_input, ids_cfg)).dump() << "\n";
            }
        } else if (*build_cmd) {
            const auto dict = IdsDictionary::load(dict_path);
            for (const auto& w : dict.warnings()) err << "warning: " << w << "\n";
            auto in = io::open_input(embeddings_path, false);
            const auto index = io::build_index(io::read_embedding_records_jsonl(in), dict, ids_cfg);
            write_index_file(index, build_out);
            out << json{{"candidates", index.size()}, {"dim", index.dim()}}.dump() << "\n";
        } else if (*synth_cmd) {
            const auto data = synth_generate(synth);
            write_index_file(data.index, synth_index_out);
            write_queries_file(data.queries, synth_queries_out);
            out << json{{"candidates", data.index.size()}, {"queries", data.queries.size()}, {"dim", synth.dim}}
                       .dump()
                << "\n";
        } else if (*query_cmd) {
            const auto index = read_index_file(index_path, ids_cfg);
            const auto queries = read_queries_file(queries_path);
            const auto results = infer_batch(queries, index, infer_cfg);
            auto csv = io::open_output(query_out, false);
            write_ranking_csv_header(csv);
            for (std::size_t i = 0; i < queries.size(); ++i) {
                write_ranking_csv(queries[i].id, results[i], csv, max_rows);
            }
            if (!csv.flush()) throw Error(ErrorCode::Io, "write failed for " + query_out);
        } else if (*eval_cmd) {
            const auto index = read_index_file(index_path, ids_cfg);
            const auto queries = read_queries_file(queries_path);
            const auto truths = truths_of(queries);
            const auto results = infer_batch(queries, index, infer_cfg);
            const std::size_t k = std::min(infer_cfg.k, index.size());
            out << json{{"queries", queries.size()},
                        {"k", k},
                        {"top1_acc", top1_accuracy(results, truths)},
                        {"recall_at_k", recall_at_k(results, truths, k)}}
                       .dump()
                << "\n";
        } else if (*sweep_cmd) {
            const auto index = read_index_file(index_path, ids_cfg);
            const auto queries = read_queries_file(queries_path);
            const auto ks = parse_k_list(k_list, index.size());
            SweepOptions opts;
            if (parallel) {
                opts.mode = TimingMode::Throughput;
                opts.threads = default_thread_count();
            }
            const auto rows = sweep_k(index, queries, ks, infer_cfg, opts);
            auto csv = io::open_output(sweep_out, false);
            write_sweep_csv(rows, csv);
            if (!csv.flush()) throw Error(ErrorCode::Io, "write failed for " + sweep_out);
            write_sweep_csv(rows, out);
        } else if (*loss_cmd) {
            auto in = io::open_input(batch_path, false);
            const auto batch = io::read_batch_jsonl(in, ids_cfg);
            CurriculumSchedule sched = warmup_epochs < 0
                                           ? CurriculumSchedule::with_warmup_fraction(total_epochs,
                                                                                      CurriculumSchedule::kWarmupFraction,
                                                                                      alpha, beta)
                                           : CurriculumSchedule{total_epochs, warmup_epochs, alpha, beta};
            const auto loss = total_loss(batch, epoch, sched, loss_tau_g, loss_tau_l);
            out << json{{"total", loss.total},
                        {"global", loss.global},
                        {"local", loss.local},
                        {"l1", loss.l1},
                        {"l2", loss.l2}}
                       .dump()
                << "\n";
        } else if (*map_cmd) {
            const auto index = read_index_file(index_path, ids_cfg);
            const auto queries = read_queries_file(queries_path);
            const auto& query = find_query(queries, map_query);
            const auto pos = index.find(map_label);
            if (!pos) throw Error(ErrorCode::UnknownLabel, "no candidate labelled '" + map_label + "'");
            const auto map = response_map(query.local, index[*pos].local, map_token);
            auto csv = io::open_output(map_out, false);
            write_response_map_csv(map, csv);
            if (!csv.flush()) throw Error(ErrorCode::Io, "write failed for " + map_out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::Io ? kExitIo : kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

}  // namespace glyphrank::cli
