#pragma once

// UTF-8 and small text helpers shared by the parsers.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace morphotag::text {

// Decodes UTF-8 into code points; throws Error(Errc::Io) on malformed input.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view cps);
std::string encode_utf8(char32_t cp);

// Simple case folding for ASCII, Latin-1, Latin Extended-A and Cyrillic.
char32_t to_lower(char32_t cp) noexcept;
std::string to_lower(std::string_view s);

bool is_latin_letter(char32_t cp) noexcept;

// Splits on runs of spaces and tabs.
std::vector<std::string_view> split_ws(std::string_view line);
std::string_view trim(std::string_view s);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace morphotag::text
