#include "glyphrank/ids.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "glyphrank/error.hpp"
#include "glyphrank/utf8.hpp"

namespace glyphrank {

namespace {

constexpr char32_t kFirstIdc = 0x2FF0;
constexpr char32_t kLastIdc = 0x2FFB;
constexpr char32_t kLastExtendedIdc = 0x2FFF;

int operator_arity(char32_t cp) noexcept {
    switch (cp) {
    case 0x2FF2:
    case 0x2FF3:
        return 3;
    case 0x2FFE:
    case 0x2FFF:
        return 1;
    default:
        return 2;
    }
}

}  // namespace

IdsSequence::IdsSequence(std::vector<IdsToken> tokens) : tokens_(std::move(tokens)), mask_(build_mask(tokens_)) {}

std::size_t IdsSequence::radical_count() const noexcept {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

std::string IdsSequence::to_string() const {
    std::string out;
    for (const auto& tok : tokens_) utf8::append(out, tok.codepoint);
    return out;
}

bool is_operator(char32_t cp, const IdsConfig& cfg) noexcept {
    const char32_t last = cfg.extended_operators ? kLastExtendedIdc : kLastIdc;
    return cp >= kFirstIdc && cp <= last;
}

IdsToken classify_token(char32_t cp, const IdsConfig& cfg) {
    if (is_operator(cp, cfg)) return {cp, TokenKind::Operator, operator_arity(cp)};
    return {cp, TokenKind::Radical, 0};
}

IdsSequence parse_ids(std::string_view text, const IdsConfig& cfg) {
    const auto body = utf8::trim(text);
    if (body.empty()) throw Error(ErrorCode::EmptyInput, "IDS text is empty");
    const auto cps = utf8::decode(body);
    if (cps.size() > cfg.max_length) {
        throw Error(ErrorCode::TooLong, "IDS has " + std::to_string(cps.size()) + " tokens, limit is " +
                                            std::to_string(cfg.max_length));
    }
    std::vector<IdsToken> tokens;
    tokens.reserve(cps.size());
    for (char32_t cp : cps) tokens.push_back(classify_token(cp, cfg));
    return IdsSequence(std::move(tokens));
}

Mask build_mask(std::span<const IdsToken> tokens) {
    Mask mask(tokens.size());
    std::transform(tokens.begin(), tokens.end(), mask.begin(),
                   [](const IdsToken& t) { return static_cast<std::uint8_t>(t.is_radical() ? 1 : 0); });
    return mask;
}

ValidationReport validate_ids(const IdsSequence& seq) {
    // Number of operands still owed; a complete expression brings it to 0.
    long needed = 1;
    const auto& tokens = seq.tokens();
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (needed == 0) {
            return {false, i, "unexpected token after a complete expression"};
        }
        needed += tokens[i].is_radical() ? -1 : tokens[i].arity - 1;
    }
    if (needed != 0) {
        return {false, tokens.size(), "missing " + std::to_string(needed) + " operand(s) at end"};
    }
    return {};
}

void IdsDictionary::insert(std::string character, std::string ids) {
    auto [it, inserted] = entries_.try_emplace(character, ids);
    if (inserted) {
        order_.push_back(std::move(character));
    } else {
        warnings_.push_back("duplicate entry for '" + character + "': keeping last (" + ids + ")");
        it->second = std::move(ids);
    }
}

const std::string* IdsDictionary::find(std::string_view character) const {
    auto it = entries_.find(std::string(character));
    return it == entries_.end() ? nullptr : &it->second;
}

IdsDictionary IdsDictionary::parse(std::istream& in) {
    IdsDictionary dict;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw Error(ErrorCode::MissingIds, "line " + std::to_string(lineno) + " has no tab separator",
                        lineno);
        }
        std::string character = line.substr(0, tab);
        std::string ids{utf8::trim(std::string_view(line).substr(tab + 1))};
        if (character.empty() || ids.empty()) {
            throw Error(ErrorCode::MissingIds, "line " + std::to_string(lineno) + " is missing a field", lineno);
        }
        utf8::decode(character);
        dict.insert(std::move(character), std::move(ids));
    }
    return dict;
}

IdsDictionary IdsDictionary::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open IDS dictionary " + path.string());
    return parse(in);
}

}  // namespace glyphrank
