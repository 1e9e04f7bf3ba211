#pragma once

// String helpers shared by every layer: answer canonicalization, word
// splitting, and case-insensitive search.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace madam {

namespace text_detail {

inline bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

inline char ascii_lower(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

inline bool is_article(std::string_view w) {
  return w == "a" || w == "an" || w == "the";
}

}  // namespace text_detail

inline std::string_view trim_view(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && text_detail::is_space(s[b])) ++b;
  while (e > b && text_detail::is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

inline std::string trim(std::string_view s) { return std::string(trim_view(s)); }

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), text_detail::ascii_lower);
  return out;
}

/// Whitespace-delimited words, in order.
inline std::vector<std::string_view> split_words(std::string_view s) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && text_detail::is_space(s[i])) ++i;
    std::size_t start = i;
    while (i < s.size() && !text_detail::is_space(s[i])) ++i;
    if (i > start) words.push_back(s.substr(start, i - start));
  }
  return words;
}

inline std::size_t word_count(std::string_view s) { return split_words(s).size(); }

template <typename Range>
std::string join(const Range& parts, std::string_view sep) {
  std::string out;
  bool first = true;
  for (const auto& p : parts) {
    if (!first) out += sep;
    out += p;
    first = false;
  }
  return out;
}

/// Canonical form used for every answer comparison: ASCII-lowercased,
/// ASCII punctuation removed, the articles a/an/the dropped as whole
/// words (unless nothing else is left), whitespace collapsed. Idempotent.
/// Bytes >= 0x80 pass through.
inline std::string canonicalize_answer(std::string_view raw) {
  std::string stripped;
  stripped.reserve(raw.size());
  for (char c : raw) {
    auto uc = static_cast<unsigned char>(c);
    if (uc < 0x80 && std::ispunct(uc)) continue;
    stripped.push_back(text_detail::ascii_lower(c));
  }
  const auto words = split_words(stripped);
  // an answer made only of articles ("A") keeps them
  const bool all_articles =
      std::all_of(words.begin(), words.end(), [](auto w) { return text_detail::is_article(w); });
  std::string out;
  for (auto w : words) {
    if (!all_articles && text_detail::is_article(w)) continue;
    if (!out.empty()) out.push_back(' ');
    out.append(w);
  }
  return out;
}

/// Position of the first case-insensitive (ASCII) occurrence of `needle`
/// in `hay` at or after `from`, or npos.
inline std::size_t ifind(std::string_view hay, std::string_view needle,
                         std::size_t from = 0) {
  if (needle.empty()) return from <= hay.size() ? from : std::string_view::npos;
  if (hay.size() < needle.size()) return std::string_view::npos;
  for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
    bool hit = true;
    for (std::size_t j = 0; j < needle.size(); ++j) {
      if (text_detail::ascii_lower(hay[i + j]) != text_detail::ascii_lower(needle[j])) {
        hit = false;
        break;
      }
    }
    if (hit) return i;
  }
  return std::string_view::npos;
}

inline bool icontains(std::string_view hay, std::string_view needle) {
  return ifind(hay, needle) != std::string_view::npos;
}

/// True when the canonical form of `answer` occurs inside the canonical
/// form of `passage`. An answer that canonicalizes to "" never matches.
inline bool contains_answer(std::string_view passage, std::string_view answer) {
  auto a = canonicalize_answer(answer);
  if (a.empty()) return false;
  return canonicalize_answer(passage).find(a) != std::string::npos;
}

/// Replaces every case-insensitive occurrence of `from` with `to`.
/// Returns the number of replacements.
inline std::size_t ireplace_all(std::string& s, std::string_view from, std::string_view to) {
  if (from.empty()) return 0;
  std::size_t count = 0;
  std::size_t pos = 0;
  while ((pos = ifind(s, from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
    ++count;
  }
  return count;
}

}  // namespace madam
