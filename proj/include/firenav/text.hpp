#pragma once

// Small text and file helpers shared by the parsers.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "firenav/errors.hpp"

namespace firenav {

std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split_ws(std::string_view text);
std::string_view trim(std::string_view text);

// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);

template <typename T>
T parse_number(std::string_view token, std::size_t line, std::string_view what) {
  T value{};
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && token.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last)
    throw ParseError("bad " + std::string(what) + " '" + std::string(token) + "'", line);
  return value;
}

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace firenav
