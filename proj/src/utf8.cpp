#include "glyphrank/utf8.hpp"

#include "glyphrank/error.hpp"

namespace glyphrank::utf8 {

bool is_scalar_value(char32_t cp) noexcept {
    return cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF);
}

std::vector<char32_t> decode(std::string_view text) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    std::size_t i = 0;
    const auto bad = [&](std::size_t at) {
        return Error(ErrorCode::InvalidUtf8, "malformed UTF-8 at byte " + std::to_string(at));
    };
    while (i < text.size()) {
        const auto lead = static_cast<unsigned char>(text[i]);
        std::size_t len = 0;
        char32_t cp = 0;
        char32_t min = 0;
        if (lead < 0x80) {
            out.push_back(lead);
            ++i;
            continue;
        } else if ((lead & 0xE0) == 0xC0) {
            len = 2;
            cp = lead & 0x1F;
            min = 0x80;
        } else if ((lead & 0xF0) == 0xE0) {
            len = 3;
            cp = lead & 0x0F;
            min = 0x800;
        } else if ((lead & 0xF8) == 0xF0) {
            len = 4;
            cp = lead & 0x07;
            min = 0x10000;
        } else {
            throw bad(i);
        }
        if (i + len > text.size()) throw bad(i);
        for (std::size_t k = 1; k < len; ++k) {
            const auto cont = static_cast<unsigned char>(text[i + k]);
            if ((cont & 0xC0) != 0x80) throw bad(i);
            cp = (cp << 6) | (cont & 0x3F);
        }
        if (cp < min || !is_scalar_value(cp)) throw bad(i);
        out.push_back(cp);
        i += len;
    }
    return out;
}

void append(std::string& out, char32_t cp) {
    if (!is_scalar_value(cp)) {
        throw Error(ErrorCode::InvalidUtf8, "not a Unicode scalar value");
    }
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string encode(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size() * 3);
    for (char32_t cp : cps) append(out, cp);
    return out;
}

std::string encode(char32_t cp) {
    std::string out;
    append(out, cp);
    return out;
}

namespace {

// Length in bytes of a White_Space character starting at `s`, 0 if none.
std::size_t whitespace_len(std::string_view s) {
    if (s.empty()) return 0;
    const auto c = static_cast<unsigned char>(s[0]);
    if (c == ' ' || (c >= 0x09 && c <= 0x0D)) return 1;
    // Multi-byte White_Space: U+0085, U+00A0, U+1680, U+2000..U+200A,
    // U+2028, U+2029, U+202F, U+205F, U+3000.
    static constexpr std::string_view multi[] = {
        "\xC2\x85", "\xC2\xA0", "\xE1\x9A\x80", "\xE2\x80\x80", "\xE2\x80\x81",
        "\xE2\x80\x82", "\xE2\x80\x83", "\xE2\x80\x84", "\xE2\x80\x85", "\xE2\x80\x86",
        "\xE2\x80\x87", "\xE2\x80\x88", "\xE2\x80\x89", "\xE2\x80\x8A", "\xE2\x80\xA8",
        "\xE2\x80\xA9", "\xE2\x80\xAF", "\xE2\x81\x9F", "\xE3\x80\x80",
    };
    for (auto w : multi) {
        if (s.substr(0, w.size()) == w) return w.size();
    }
    return 0;
}

std::size_t trailing_whitespace_len(std::string_view s) {
    for (std::size_t back = 1; back <= 3 && back <= s.size(); ++back) {
        auto tail = s.substr(s.size() - back);
        if (whitespace_len(tail) == back) return back;
    }
    return 0;
}

}  // namespace

std::string_view trim(std::string_view text) {
    while (auto n = whitespace_len(text)) text.remove_prefix(n);
    while (auto n = trailing_whitespace_len(text)) text.remove_suffix(n);
    return text;
}

}  // namespace glyphrank::utf8
