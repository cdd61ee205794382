#pragma once

#include <string>
#include <string_view>

namespace diana::utf8 {

// Decodes the code point starting at `pos` and advances `pos` past it.
// Invalid sequences decode as U+FFFD and consume one byte.
char32_t Next(std::string_view text, std::size_t& pos);

void Append(char32_t cp, std::string& out);

// Simple case folding for ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic. Other code points are returned unchanged.
char32_t ToLower(char32_t cp);
bool IsUpper(char32_t cp);

// Letters and digits. Non-ASCII code points count as word characters unless
// they fall in a known punctuation, symbol or space block.
bool IsWordChar(char32_t cp);

bool IsSpace(char32_t cp);

std::string Lowercase(std::string_view text);

// Trims ASCII whitespace and collapses interior runs to one space.
std::string CollapseWhitespace(std::string_view text);

std::string_view Trim(std::string_view text);

}  // namespace diana::utf8
