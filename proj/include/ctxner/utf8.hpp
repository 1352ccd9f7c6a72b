#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ctxner::utf8 {

struct Decoded {
  char32_t code_point;
  std::size_t length;  // bytes consumed
};

// Decodes one code point at `pos`. Returns nothing on an invalid or
// truncated sequence (including overlongs and surrogates).
std::optional<Decoded> decode(std::string_view text, std::size_t pos);

// Byte offset of the first invalid sequence, or nothing if `text` is valid.
std::optional<std::size_t> first_invalid(std::string_view text);

void append(std::string& out, char32_t code_point);

bool is_lowercase(char32_t cp);
bool is_uppercase(char32_t cp);
bool is_space(char32_t cp);

}  // namespace ctxner::utf8
