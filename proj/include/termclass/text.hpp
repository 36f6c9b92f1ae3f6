#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace termclass::text {

// Decodes UTF-8 into Unicode scalar values. Malformed bytes decode to U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);

// Case mapping covers ASCII, Latin-1, Greek and basic Cyrillic. Everything
// else is treated as caseless.
bool is_upper(char32_t c);
bool is_lower(char32_t c);
char32_t to_lower(char32_t c);

std::u32string lower(std::u32string_view s);
std::string lower(std::string_view s);

// Splits on ASCII whitespace. Punctuation stays attached to its token.
std::vector<std::string> split_whitespace(std::string_view s);

std::string trim(std::string_view s);

// Lowercase, trimmed, internal whitespace runs collapsed to one space.
std::string normalize_key(std::string_view s);

}  // namespace termclass::text
