#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace glyphrank::utf8 {

/// Strict decoder: rejects overlong forms, surrogates and values past U+10FFFF.
/// Throws Error{InvalidUtf8} with the byte offset of the bad sequence.
std::vector<char32_t> decode(std::string_view text);

void append(std::string& out, char32_t cp);
std::string encode(const std::vector<char32_t>& cps);
std::string encode(char32_t cp);

bool is_scalar_value(char32_t cp) noexcept;

// Strips Unicode White_Space characters from both ends.
std::string_view trim(std::string_view text);

}  // namespace glyphrank::utf8
