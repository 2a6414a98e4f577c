#pragma once

// Ideographic Description Sequences as flat token lists.
//
// A sequence is kept in the linear order it was written in; tree structure
// only matters to validate_ids(), which checks that the operator arities form
// a well-formed prefix expression. Every token carries a mask bit: 1 for a
// radical (a visual component), 0 for a structural operator. Local similarity
// aggregates over mask-1 tokens only.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace glyphrank {

enum class TokenKind : std::uint8_t { Radical, Operator };

struct IdsToken {
    char32_t codepoint = 0;
    TokenKind kind = TokenKind::Radical;
    int arity = 0;

    bool is_radical() const noexcept { return kind == TokenKind::Radical; }
    friend bool operator==(const IdsToken&, const IdsToken&) = default;
};

struct IdsConfig {
    static constexpr std::size_t kDefaultMaxLength = 32;

    // Adds U+2FFC..U+2FFF to the operator set. U+2FFE and U+2FFF are unary.
    bool extended_operators = false;
    std::size_t max_length = kDefaultMaxLength;
};

using Mask = std::vector<std::uint8_t>;

class IdsSequence {
public:
    IdsSequence() = default;
    explicit IdsSequence(std::vector<IdsToken> tokens);

    const std::vector<IdsToken>& tokens() const noexcept { return tokens_; }
    const Mask& mask() const noexcept { return mask_; }
    std::size_t size() const noexcept { return tokens_.size(); }
    bool empty() const noexcept { return tokens_.empty(); }
    std::size_t radical_count() const noexcept;

    // Concatenated UTF-8 of the token codepoints.
    std::string to_string() const;

    friend bool operator==(const IdsSequence&, const IdsSequence&) = default;

private:
    std::vector<IdsToken> tokens_;
    Mask mask_;
};

bool is_operator(char32_t cp, const IdsConfig& cfg = {}) noexcept;

IdsToken classify_token(char32_t cp, const IdsConfig& cfg = {});

// Throws EmptyInput for blank text, TooLong past cfg.max_length, InvalidUtf8.
IdsSequence parse_ids(std::string_view text, const IdsConfig& cfg = {});

Mask build_mask(std::span<const IdsToken> tokens);

struct ValidationReport {
    bool ok = true;
    // Token position of the first violation; equals size() when operands are
    // missing at the end.
    std::optional<std::size_t> position;
    std::string reason;
};

ValidationReport validate_ids(const IdsSequence& seq);

/// Character -> IDS string table read from `<character>\t<IDS>` lines.
/// `#` starts a comment line, blank lines are skipped, and a duplicated
/// character keeps its last entry (a warning is recorded).
class IdsDictionary {
public:
    void insert(std::string character, std::string ids);

    const std::string* find(std::string_view character) const;
    std::size_t size() const noexcept { return order_.size(); }
    // Characters in first-seen order.
    const std::vector<std::string>& characters() const noexcept { return order_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    static IdsDictionary parse(std::istream& in);
    static IdsDictionary load(const std::filesystem::path& path);

private:
    std::unordered_map<std::string, std::string> entries_;
    std::vector<std::string> order_;
    std::vector<std::string> warnings_;
};

}  // namespace glyphrank
