#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Token-level helpers for free-form Fortran statement text. This is not a
// Fortran parser; it only knows enough to find identifiers, balanced
// parentheses and top-level separators without being fooled by strings.

namespace acc2dc::lex {

enum class TokenKind { Identifier, Number, String, Operator, LParen, RParen, Comma, Other };

struct Token {
  TokenKind kind = TokenKind::Other;
  std::string text;
  std::size_t offset = 0; ///< byte offset into the tokenized text

  std::size_t end() const { return offset + text.size(); }
  bool is(TokenKind k, std::string_view t) const;
  bool is_identifier() const { return kind == TokenKind::Identifier; }
};

std::vector<Token> tokenize(std::string_view text);

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::string remove_spaces(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

/// Byte offset of a `!` that starts a trailing comment, ignoring `!` inside
/// character literals.
std::optional<std::size_t> comment_start(std::string_view line);

/// `line` without its trailing comment and trailing whitespace.
std::string_view strip_comment(std::string_view line);

/// Splits on commas that are not nested in parentheses or strings. Parts are
/// trimmed. An empty input yields an empty list.
std::vector<std::string> split_top_level(std::string_view text, char separator = ',');

/// Index one past the `)` matching the `(` at `open`, or npos when unbalanced.
std::size_t match_paren(std::string_view text, std::size_t open);

/// Token index of the `)` matching the `(` token at `open`, or npos.
std::size_t match_paren(const std::vector<Token> &tokens, std::size_t open);

/// Position of the top-level `=` of an assignment statement (not `==`, `<=`,
/// `>=`, `/=`, `=>`), or npos.
std::size_t assignment_equals(std::string_view statement);

/// Every identifier in `text`, lowercased, in order of appearance.
std::vector<std::string> identifiers(std::string_view text);

} // namespace acc2dc::lex
