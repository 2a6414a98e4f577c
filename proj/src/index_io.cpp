#include "glyphrank/index_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "glyphrank/error.hpp"

namespace glyphrank::io {

namespace {

using json = nlohmann::json;

void put_u16(std::ostream& out, std::uint16_t v) {
    const char b[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
    out.write(b, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                       static_cast<char>((v >> 16) & 0xFF), static_cast<char>(v >> 24)};
    out.write(b, 4);
}

void put_floats(std::ostream& out, std::span<const float> values) {
    for (float f : values) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

void put_string(std::ostream& out, const std::string& s, std::string_view what) {
    if (s.size() > std::numeric_limits<std::uint16_t>::max()) {
        throw Error(ErrorCode::InvalidParams, std::string(what) + " longer than 65535 bytes");
    }
    put_u16(out, static_cast<std::uint16_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint16_t checked_u16(std::size_t v, std::string_view what) {
    if (v > std::numeric_limits<std::uint16_t>::max()) {
        throw Error(ErrorCode::InvalidParams, std::string(what) + " exceeds 65535");
    }
    return static_cast<std::uint16_t>(v);
}

void put_header(std::ostream& out, const char (&magic)[4], std::size_t dim, std::size_t count) {
    out.write(magic, 4);
    put_u32(out, kFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(dim));
    put_u32(out, static_cast<std::uint32_t>(count));
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    void bytes(char* dst, std::size_t n, std::optional<std::size_t> record) {
        in_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            throw Error(ErrorCode::Truncated, "unexpected end of file", record);
        }
    }

    std::uint16_t u16(std::optional<std::size_t> record) {
        unsigned char b[2];
        bytes(reinterpret_cast<char*>(b), 2, record);
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }

    std::uint32_t u32(std::optional<std::size_t> record) {
        unsigned char b[4];
        bytes(reinterpret_cast<char*>(b), 4, record);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
    }

    std::string string(std::size_t record) {
        const auto len = u16(record);
        std::string s(len, '\0');
        bytes(s.data(), len, record);
        return s;
    }

    std::vector<float> floats(std::size_t n, std::size_t record) {
        std::vector<float> v(n);
        for (auto& f : v) f = std::bit_cast<float>(u32(record));
        return v;
    }

    bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

private:
    std::istream& in_;
};

struct Header {
    std::uint32_t dim = 0;
    std::uint32_t count = 0;
};

Header read_header(Reader& r, const char (&magic)[4]) {
    char got[4] = {};
    try {
        r.bytes(got, 4, std::nullopt);
    } catch (const Error&) {
        throw Error(ErrorCode::BadMagic, "file too short for a header");
    }
    if (std::memcmp(got, magic, 4) != 0) {
        throw Error(ErrorCode::BadMagic, "expected magic '" + std::string(magic, 4) + "'");
    }
    const auto version = r.u32(std::nullopt);
    if (version != kFormatVersion) {
        throw Error(ErrorCode::VersionMismatch,
                    "format version " + std::to_string(version) + ", supported " + std::to_string(kFormatVersion));
    }
    Header h;
    h.dim = r.u32(std::nullopt);
    h.count = r.u32(std::nullopt);
    if (h.dim == 0) throw Error(ErrorCode::DimMismatch, "header dim is 0");
    return h;
}

IdsSequence parse_record_ids(const std::string& text, const IdsConfig& cfg, std::size_t record) {
    try {
        return parse_ids(text, cfg);
    } catch (const Error& e) {
        throw Error(e.code(), e.what(), record);
    }
}

void expect_end(Reader& r) {
    if (!r.at_end()) throw Error(ErrorCode::Malformed, "unexpected trailing data after last record");
}

}  // namespace

std::ofstream open_output(const std::filesystem::path& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_input(const std::filesystem::path& path, bool binary) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return in;
}

void write_index(const CandidateIndex& index, std::ostream& out) {
    put_header(out, kIndexMagic, index.dim(), index.size());
    for (const auto& c : index) {
        put_string(out, c.label, "label");
        put_string(out, c.ids.to_string(), "IDS");
        put_u16(out, checked_u16(c.local.rows(), "token count"));
        put_floats(out, c.global.values());
        put_floats(out, c.local.data());
    }
}

CandidateIndex read_index(std::istream& in, const IdsConfig& cfg) {
    Reader r(in);
    const auto header = read_header(r, kIndexMagic);
    std::vector<Candidate> candidates;
    candidates.reserve(header.count);
    for (std::size_t i = 0; i < header.count; ++i) {
        Candidate c;
        c.label = r.string(i);
        const auto ids_text = r.string(i);
        const auto rows = r.u16(i);
        c.global = GlobalEmbedding(r.floats(header.dim, i));
        c.local = LocalEmbeddingSet(rows, header.dim, r.floats(std::size_t{rows} * header.dim, i));
        c.ids = parse_record_ids(ids_text, cfg, i);
        candidates.push_back(std::move(c));
    }
    expect_end(r);
    return CandidateIndex(std::move(candidates));
}

void save_index(const CandidateIndex& index, const std::filesystem::path& path) {
    auto out = open_output(path, true);
    write_index(index, out);
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

CandidateIndex load_index(const std::filesystem::path& path, const IdsConfig& cfg) {
    auto in = open_input(path, true);
    return read_index(in, cfg);
}

void write_queries(std::span<const QuerySample> queries, std::ostream& out) {
    const std::size_t dim = queries.empty() ? 0 : queries.front().dim();
    put_header(out, kQueryMagic, dim, queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const auto& q = queries[i];
        if (q.dim() != dim || q.local.dim() != dim) {
            throw Error(ErrorCode::DimMismatch, "query '" + q.id + "' has a different dim", i);
        }
        put_string(out, q.id, "query id");
        put_string(out, q.truth.value_or(std::string{}), "truth label");
        put_u16(out, checked_u16(q.local.rows(), "patch count"));
        put_floats(out, q.global.values());
        put_floats(out, q.local.data());
    }
}

std::vector<QuerySample> read_queries(std::istream& in) {
    Reader r(in);
    char got[4] = {};
    try {
        r.bytes(got, 4, std::nullopt);
    } catch (const Error&) {
        throw Error(ErrorCode::BadMagic, "file too short for a header");
    }
    if (std::memcmp(got, kQueryMagic, 4) != 0) throw Error(ErrorCode::BadMagic, "expected magic 'GLQY'");
    const auto version = r.u32(std::nullopt);
    if (version != kFormatVersion) {
        throw Error(ErrorCode::VersionMismatch, "format version " + std::to_string(version));
    }
    const auto dim = r.u32(std::nullopt);
    const auto count = r.u32(std::nullopt);
    if (dim == 0 && count > 0) throw Error(ErrorCode::DimMismatch, "header dim is 0");
    std::vector<QuerySample> queries;
    queries.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        QuerySample q;
        q.id = r.string(i);
        auto truth = r.string(i);
        if (!truth.empty()) q.truth = std::move(truth);
        const auto patches = r.u16(i);
        q.global = GlobalEmbedding(r.floats(dim, i));
        q.local = LocalEmbeddingSet(patches, dim, r.floats(std::size_t{patches} * dim, i));
        q.normalize(i);
        queries.push_back(std::move(q));
    }
    expect_end(r);
    return queries;
}

void save_queries(std::span<const QuerySample> queries, const std::filesystem::path& path) {
    auto out = open_output(path, true);
    write_queries(queries, out);
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::vector<QuerySample> load_queries(const std::filesystem::path& path) {
    auto in = open_input(path, true);
    return read_queries(in);
}

// ---- JSON Lines ---------------------------------------------------------

std::string format_float(float value) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) throw Error(ErrorCode::InvalidParams, "cannot format float");
    return std::string(buf.data(), end);
}

namespace {

void append_array(std::string& out, std::span<const float> values) {
    out.push_back('[');
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out.push_back(',');
        out += format_float(values[i]);
    }
    out.push_back(']');
}

void append_matrix(std::string& out, const LocalEmbeddingSet& m) {
    out.push_back('[');
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (i) out.push_back(',');
        append_array(out, m.row(i));
    }
    out.push_back(']');
}

std::string quote(const std::string& s) { return json(s).dump(); }

json parse_line(const std::string& line, std::size_t record) {
    try {
        auto j = json::parse(line);
        if (!j.is_object()) throw Error(ErrorCode::Malformed, "record is not a JSON object", record);
        return j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Malformed, std::string("invalid JSON: ") + e.what(), record);
    }
}

template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t record = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        fn(parse_line(line, record), record);
        ++record;
    }
}

std::string get_string(const json& j, const char* key, std::size_t record) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
        throw Error(ErrorCode::Malformed, std::string("missing string field '") + key + "'", record);
    }
    return it->get<std::string>();
}

std::vector<float> get_vector(const json& j, std::size_t record) {
    if (!j.is_array()) throw Error(ErrorCode::Malformed, "expected an array of numbers", record);
    std::vector<float> v;
    v.reserve(j.size());
    for (const auto& x : j) {
        if (!x.is_number()) throw Error(ErrorCode::Malformed, "expected a number", record);
        v.push_back(static_cast<float>(x.get<double>()));
    }
    return v;
}

GlobalEmbedding get_global(const json& j, const char* key, std::size_t record) {
    auto it = j.find(key);
    if (it == j.end()) throw Error(ErrorCode::Malformed, std::string("missing field '") + key + "'", record);
    return GlobalEmbedding(get_vector(*it, record));
}

LocalEmbeddingSet get_local(const json& j, const char* key, std::size_t dim, std::size_t record) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_array()) {
        throw Error(ErrorCode::Malformed, std::string("missing matrix field '") + key + "'", record);
    }
    std::vector<float> data;
    data.reserve(it->size() * dim);
    for (const auto& row : *it) {
        auto v = get_vector(row, record);
        if (v.size() != dim) {
            throw Error(ErrorCode::DimMismatch,
                        std::string("row of '") + key + "' has dim " + std::to_string(v.size()) + ", expected " +
                            std::to_string(dim),
                        record);
        }
        data.insert(data.end(), v.begin(), v.end());
    }
    return LocalEmbeddingSet(it->size(), dim, std::move(data));
}

}  // namespace

void write_index_jsonl(const CandidateIndex& index, std::ostream& out) {
    std::string line;
    for (const auto& c : index) {
        line = "{\"label\":" + quote(c.label) + ",\"ids\":" + quote(c.ids.to_string()) + ",\"global\":";
        append_array(line, c.global.values());
        line += ",\"local\":";
        append_matrix(line, c.local);
        line += "}\n";
        out << line;
    }
}

CandidateIndex read_index_jsonl(std::istream& in, const IdsConfig& cfg) {
    std::vector<Candidate> candidates;
    std::size_t dim = 0;
    for_each_line(in, [&](const json& j, std::size_t record) {
        Candidate c;
        c.label = get_string(j, "label", record);
        c.ids = parse_record_ids(get_string(j, "ids", record), cfg, record);
        c.global = get_global(j, "global", record);
        if (record == 0) dim = c.global.dim();
        if (c.global.dim() != dim) {
            throw Error(ErrorCode::DimMismatch, "global dim " + std::to_string(c.global.dim()) + " != " +
                                                    std::to_string(dim), record);
        }
        c.local = get_local(j, "local", dim, record);
        candidates.push_back(std::move(c));
    });
    return CandidateIndex(std::move(candidates));
}

void write_queries_jsonl(std::span<const QuerySample> queries, std::ostream& out) {
    std::string line;
    for (const auto& q : queries) {
        line = "{\"id\":" + quote(q.id) + ",\"truth\":" + (q.truth ? quote(*q.truth) : std::string("null")) +
               ",\"global\":";
        append_array(line, q.global.values());
        line += ",\"local\":";
        append_matrix(line, q.local);
        line += "}\n";
        out << line;
    }
}

std::vector<QuerySample> read_queries_jsonl(std::istream& in) {
    std::vector<QuerySample> queries;
    for_each_line(in, [&](const json& j, std::size_t record) {
        QuerySample q;
        q.id = get_string(j, "id", record);
        if (auto it = j.find("truth"); it != j.end() && it->is_string() && !it->get<std::string>().empty()) {
            q.truth = it->get<std::string>();
        }
        q.global = get_global(j, "global", record);
        if (!queries.empty() && q.global.dim() != queries.front().dim()) {
            throw Error(ErrorCode::DimMismatch, "query dims differ", record);
        }
        q.local = get_local(j, "local", q.global.dim(), record);
        q.normalize(record);
        queries.push_back(std::move(q));
    });
    return queries;
}

std::vector<EmbeddingRecord> read_embedding_records_jsonl(std::istream& in) {
    std::vector<EmbeddingRecord> records;
    for_each_line(in, [&](const json& j, std::size_t record) {
        EmbeddingRecord r;
        r.label = get_string(j, "label", record);
        if (auto it = j.find("ids"); it != j.end() && it->is_string()) r.ids = it->get<std::string>();
        r.global = get_global(j, "global", record);
        r.local = get_local(j, "local", r.global.dim(), record);
        records.push_back(std::move(r));
    });
    return records;
}

std::vector<BatchSample> read_batch_jsonl(std::istream& in, const IdsConfig& cfg) {
    std::vector<BatchSample> batch;
    for_each_line(in, [&](const json& j, std::size_t record) {
        BatchSample s;
        const auto ids = parse_record_ids(get_string(j, "ids", record), cfg, record);
        s.mask = ids.mask();
        s.text_global = get_global(j, "global", record);
        s.image_global = get_global(j, "image_global", record);
        const std::size_t dim = s.text_global.dim();
        if (s.image_global.dim() != dim) throw Error(ErrorCode::DimMismatch, "image/text dims differ", record);
        s.text_local = get_local(j, "local", dim, record);
        s.image_local = get_local(j, "image_local", dim, record);
        if (s.text_local.rows() != ids.size()) {
            throw Error(ErrorCode::RowMismatch, "local rows do not match IDS length", record);
        }
        if (ids.radical_count() == 0) throw Error(ErrorCode::NoRadical, "IDS has no radical token", record);
        if (!batch.empty() && dim != batch.front().text_global.dim()) {
            throw Error(ErrorCode::DimMismatch, "batch dims differ", record);
        }
        s.text_global.normalize(record);
        s.image_global.normalize(record);
        s.text_local.normalize(record);
        s.image_local.normalize(record);
        batch.push_back(std::move(s));
    });
    return batch;
}

CandidateIndex build_index(std::vector<EmbeddingRecord> records, const IdsDictionary& dict, const IdsConfig& cfg) {
    std::vector<Candidate> candidates;
    candidates.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto& r = records[i];
        const std::string* ids = dict.find(r.label);
        if (!ids && r.ids.empty()) {
            throw Error(ErrorCode::MissingIds, "no IDS entry for '" + r.label + "'", i);
        }
        Candidate c;
        c.label = std::move(r.label);
        c.ids = parse_record_ids(ids ? *ids : r.ids, cfg, i);
        c.global = std::move(r.global);
        c.local = std::move(r.local);
        candidates.push_back(std::move(c));
    }
    return CandidateIndex(std::move(candidates));
}

}  // namespace glyphrank::io
