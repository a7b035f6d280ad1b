#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace cedar {

// Decodes strict UTF-8 (no overlongs, no surrogates). nullopt on any error.
std::optional<std::u32string> decode_utf8(std::string_view s);

// Byte offset of the first invalid sequence, or npos.
std::size_t first_invalid_utf8(std::string_view s);

void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(std::u32string_view s);

bool is_scalar_value(char32_t cp);

}  // namespace cedar
