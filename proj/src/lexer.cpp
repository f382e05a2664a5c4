#include "acc2dc/lexer.hpp"

#include <cctype>

namespace acc2dc::lex {

bool Token::is(TokenKind k, std::string_view t) const {
  return kind == k && iequals(text, t);
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto &c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos)
    return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string remove_spaces(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (c != ' ' && c != '\t')
      out.push_back(c);
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size())
    return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

std::optional<std::size_t> comment_start(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quote) {
      if (c == quote) {
        if (i + 1 < line.size() && line[i + 1] == quote)
          ++i;
        else
          quote = 0;
      }
      continue;
    }
    if (c == '\'' || c == '"')
      quote = c;
    else if (c == '!')
      return i;
  }
  return std::nullopt;
}

std::string_view strip_comment(std::string_view line) {
  if (auto pos = comment_start(line))
    line = line.substr(0, *pos);
  auto e = line.find_last_not_of(" \t");
  return e == std::string_view::npos ? std::string_view{} : line.substr(0, e + 1);
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

/// Length of a dotted operator like `.and.` starting at `i`, or 0.
std::size_t dotted_operator(std::string_view s, std::size_t i) {
  if (s[i] != '.')
    return 0;
  std::size_t j = i + 1;
  while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j])))
    ++j;
  if (j > i + 1 && j < s.size() && s[j] == '.')
    return j - i + 1;
  return 0;
}

} // namespace

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == ' ' || c == '\t') {
      ++i;
      continue;
    }
    Token t;
    t.offset = i;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j]))
        ++j;
      t.kind = TokenKind::Identifier;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (digit(c) || (c == '.' && i + 1 < s.size() && digit(s[i + 1]))) {
      std::size_t j = i;
      while (j < s.size() && digit(s[j]))
        ++j;
      if (j < s.size() && s[j] == '.' && dotted_operator(s, j) == 0) {
        ++j;
        while (j < s.size() && digit(s[j]))
          ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E' || s[j] == 'd' || s[j] == 'D')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-'))
          ++k;
        if (k < s.size() && digit(s[k])) {
          j = k;
          while (j < s.size() && digit(s[j]))
            ++j;
        }
      }
      if (j < s.size() && s[j] == '_') { // kind suffix
        ++j;
        while (j < s.size() && ident_char(s[j]))
          ++j;
      }
      t.kind = TokenKind::Number;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (c == '\'' || c == '"') {
      std::size_t j = i + 1;
      while (j < s.size()) {
        if (s[j] == c) {
          if (j + 1 < s.size() && s[j + 1] == c) {
            j += 2;
            continue;
          }
          ++j;
          break;
        }
        ++j;
      }
      t.kind = TokenKind::String;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (c == '(') {
      t.kind = TokenKind::LParen;
      t.text = "(";
      ++i;
    } else if (c == ')') {
      t.kind = TokenKind::RParen;
      t.text = ")";
      ++i;
    } else if (c == ',') {
      t.kind = TokenKind::Comma;
      t.text = ",";
      ++i;
    } else if (auto n = dotted_operator(s, i)) {
      t.kind = TokenKind::Operator;
      t.text = std::string(s.substr(i, n));
      i += n;
    } else {
      static constexpr std::string_view two[] = {"**", "==", "/=", "<=", ">=", "=>", "::", "//"};
      t.kind = TokenKind::Operator;
      std::size_t len = 1;
      for (auto op : two)
        if (s.substr(i, 2) == op) {
          len = 2;
          break;
        }
      if (std::string_view("+-*/=<>:%").find(c) == std::string_view::npos)
        t.kind = TokenKind::Other;
      t.text = std::string(s.substr(i, len));
      i += len;
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<std::string> split_top_level(std::string_view text, char separator) {
  std::vector<std::string> parts;
  if (trim(text).empty())
    return parts;
  int depth = 0;
  char quote = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quote) {
      if (c == quote)
        quote = 0;
      continue;
    }
    if (c == '\'' || c == '"')
      quote = c;
    else if (c == '(' || c == '[')
      ++depth;
    else if (c == ')' || c == ']')
      --depth;
    else if (c == separator && depth == 0) {
      parts.emplace_back(trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  parts.emplace_back(trim(text.substr(start)));
  return parts;
}

std::size_t match_paren(std::string_view text, std::size_t open) {
  int depth = 0;
  char quote = 0;
  for (std::size_t i = open; i < text.size(); ++i) {
    char c = text[i];
    if (quote) {
      if (c == quote)
        quote = 0;
      continue;
    }
    if (c == '\'' || c == '"')
      quote = c;
    else if (c == '(')
      ++depth;
    else if (c == ')') {
      if (--depth == 0)
        return i + 1;
    }
  }
  return std::string_view::npos;
}

std::size_t match_paren(const std::vector<Token> &tokens, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < tokens.size(); ++i) {
    if (tokens[i].kind == TokenKind::LParen)
      ++depth;
    else if (tokens[i].kind == TokenKind::RParen && --depth == 0)
      return i;
  }
  return std::string_view::npos;
}

std::size_t assignment_equals(std::string_view statement) {
  int depth = 0;
  char quote = 0;
  for (std::size_t i = 0; i < statement.size(); ++i) {
    char c = statement[i];
    if (quote) {
      if (c == quote)
        quote = 0;
      continue;
    }
    if (c == '\'' || c == '"')
      quote = c;
    else if (c == '(')
      ++depth;
    else if (c == ')')
      --depth;
    else if (c == '=' && depth == 0) {
      char prev = i > 0 ? statement[i - 1] : ' ';
      char next = i + 1 < statement.size() ? statement[i + 1] : ' ';
      if (next == '=' || next == '>' || prev == '=' || prev == '<' || prev == '>' || prev == '/')
        continue;
      return i;
    }
  }
  return std::string_view::npos;
}

std::vector<std::string> identifiers(std::string_view text) {
  std::vector<std::string> out;
  for (const auto &t : tokenize(text))
    if (t.kind == TokenKind::Identifier)
      out.push_back(to_lower(t.text));
  return out;
}

} // namespace acc2dc::lex
