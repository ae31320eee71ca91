#include "zest/plan.hpp"

#include <algorithm>
#include <array>
#include <optional>

#include "lexer.hpp"
#include "zest/errors.hpp"

namespace zest {

namespace detail {

std::vector<Lexeme> lex(std::string_view text) {
  static constexpr std::array<std::string_view, 10> kMultiCharOps = {
      "<=>", "<=", ">=", "<>", "!=", "==", "||", "&&", "->", "::"};

  std::vector<Lexeme> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const char c = text[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_ident_start(c)) {
      while (i < n && is_ident_char(text[i])) ++i;
      // Keep an expression id glued to its identifier: l_suppkey#12.
      if (i + 1 < n && text[i] == '#' && is_digit(text[i + 1])) {
        ++i;
        while (i < n && is_digit(text[i])) ++i;
        if (i < n && text[i] == 'L' && (i + 1 == n || !is_ident_char(text[i + 1]))) ++i;
      }
      out.push_back({start, i - start, LexemeKind::identifier});
      continue;
    }
    if (is_digit(c)) {
      while (i < n && is_digit(text[i])) ++i;
      if (i + 1 < n && text[i] == '.' && is_digit(text[i + 1])) {
        ++i;
        while (i < n && is_digit(text[i])) ++i;
      }
      if (i < n && (text[i] == 'e' || text[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < n && (text[j] == '+' || text[j] == '-')) ++j;
        if (j < n && is_digit(text[j])) {
          i = j;
          while (i < n && is_digit(text[i])) ++i;
        }
      }
      // Type suffixes such as 5L, 1.0D, 10BD.
      std::size_t suffix = 0;
      while (i + suffix < n && suffix < 2 &&
             ((text[i + suffix] >= 'a' && text[i + suffix] <= 'z') ||
              (text[i + suffix] >= 'A' && text[i + suffix] <= 'Z'))) {
        ++suffix;
      }
      if (i + suffix >= n || !is_ident_char(text[i + suffix])) i += suffix;
      out.push_back({start, i - start, LexemeKind::number});
      continue;
    }
    if (c == '\'' || c == '"' || c == '`') {
      ++i;
      while (i < n && text[i] != c) {
        if (text[i] == '\\' && c != '`' && i + 1 < n) ++i;
        ++i;
      }
      if (i < n) ++i;
      out.push_back({start, i - start, c == '`' ? LexemeKind::identifier : LexemeKind::string});
      continue;
    }
    std::size_t len = 1;
    for (auto op : kMultiCharOps) {
      if (text.substr(i, op.size()) == op) {
        len = op.size();
        break;
      }
    }
    out.push_back({start, len, LexemeKind::punct});
    i += len;
  }
  return out;
}

std::string strip_expression_ids(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  char quote = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (quote != 0) {
      out.push_back(c);
      if (c == '\\' && quote != '`' && i + 1 < text.size()) {
        out.push_back(text[++i]);
      } else if (c == quote) {
        quote = 0;
      }
      ++i;
      continue;
    }
    if (c == '\'' || c == '"' || c == '`') {
      quote = c;
      out.push_back(c);
      ++i;
      continue;
    }
    if (c == '#' && i + 1 < text.size() && is_digit(text[i + 1])) {
      ++i;
      while (i < text.size() && is_digit(text[i])) ++i;
      // Long-typed attributes print as name#12L.
      if (i < text.size() && text[i] == 'L' && (i + 1 == text.size() || !is_ident_char(text[i + 1]))) ++i;
      continue;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

}  // namespace detail

namespace {

using detail::is_ident_char;
using detail::is_ident_start;
using detail::is_space;

struct SourceLine {
  std::size_t number;  // 1-based
  std::string_view text;
};

std::vector<SourceLine> content_lines(std::string_view text) {
  std::vector<SourceLine> lines;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const bool blank = std::all_of(line.begin(), line.end(), is_space);
    const auto first = line.find_first_not_of(" \t");
    const bool header = first != std::string_view::npos && line.substr(first, 2) == "==";
    if (!blank && !header) lines.push_back({number, line});
    if (end == text.size()) break;
    pos = end + 1;
  }
  return lines;
}

/// Width of a Spark tree prefix ("   ", ":  " columns followed by "+- " or
/// ":- "), or nullopt when the line carries no marker.
std::optional<std::size_t> spark_marker_depth(std::string_view line) {
  std::size_t depth = 0;
  for (std::size_t pos = 0;; pos += 3, ++depth) {
    auto rest = line.substr(pos);
    const auto head = rest.substr(0, 2);
    if ((head == "+-" || head == ":-") && (rest.size() == 2 || rest[2] == ' ')) return depth + 1;
    const auto group = rest.substr(0, 3);
    if (group != "   " && group != ":  ") return std::nullopt;
  }
}

/// Splits the attribute text of a node line into top-level items. Brackets
/// must balance; whitespace and commas at depth zero separate items.
std::vector<std::string> split_items(std::string_view rest, std::size_t line_no, std::size_t base_col) {
  std::vector<std::string> items;
  std::vector<char> stack;
  std::string current;
  char quote = 0;
  auto flush = [&] {
    if (!current.empty()) items.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const char c = rest[i];
    if (quote != 0) {
      current.push_back(c);
      if (c == '\\' && quote != '`' && i + 1 < rest.size()) {
        current.push_back(rest[++i]);
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    switch (c) {
      case '\'':
      case '"':
      case '`':
        quote = c;
        current.push_back(c);
        continue;
      case '(':
        stack.push_back(')');
        break;
      case '[':
        stack.push_back(']');
        break;
      case '{':
        stack.push_back('}');
        break;
      case ')':
      case ']':
      case '}':
        if (stack.empty() || stack.back() != c) {
          throw ParseError(std::string("unbalanced '") + c + "'", line_no, base_col + i);
        }
        stack.pop_back();
        break;
      default:
        break;
    }
    if (stack.empty() && (is_space(c) || c == ',')) {
      flush();
      continue;
    }
    current.push_back(c);
  }
  if (quote != 0) throw ParseError("unterminated quoted string", line_no, base_col + rest.size());
  if (!stack.empty()) {
    throw ParseError(std::string("missing '") + stack.back() + "'", line_no, base_col + rest.size());
  }
  flush();
  return items;
}

/// True when `item` is exactly one [...] group.
bool is_single_bracket_group(std::string_view item) {
  if (item.size() < 2 || item.front() != '[' || item.back() != ']') return false;
  int depth = 0;
  char quote = 0;
  for (std::size_t i = 0; i < item.size(); ++i) {
    const char c = item[i];
    if (quote != 0) {
      if (c == '\\' && quote != '`') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '\'' || c == '"' || c == '`') {
      quote = c;
    } else if (c == '(' || c == '[' || c == '{') {
      ++depth;
    } else if (c == ')' || c == ']' || c == '}') {
      --depth;
      if (depth == 0 && i + 1 != item.size()) return false;
    }
  }
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

/// Comma-separated elements of a bracket group's interior, at depth zero.
std::vector<std::string> split_bracket_elements(std::string_view inner) {
  std::vector<std::string> out;
  int depth = 0;
  char quote = 0;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    auto element = trim(inner.substr(start, end - start));
    if (!element.empty()) out.emplace_back(element);
  };
  for (std::size_t i = 0; i < inner.size(); ++i) {
    const char c = inner[i];
    if (quote != 0) {
      if (c == '\\' && quote != '`') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '\'' || c == '"' || c == '`') {
      quote = c;
    } else if (c == '(' || c == '[' || c == '{') {
      ++depth;
    } else if (c == ')' || c == ']' || c == '}') {
      --depth;
    } else if (c == ',' && depth == 0) {
      emit(i);
      start = i + 1;
    }
  }
  emit(inner.size());
  return out;
}

PlanNode parse_node_line(std::string_view body, std::size_t line_no, std::size_t col) {
  std::size_t i = 0;
  // Unresolved ('Project) and invalid (!Join) markers carry no plan content.
  while (i < body.size() && (body[i] == '\'' || body[i] == '!')) ++i;
  if (i >= body.size() || !is_ident_start(body[i])) {
    throw ParseError("expected an operator name", line_no, col + i);
  }
  const std::size_t op_start = i;
  while (i < body.size() && is_ident_char(body[i])) ++i;

  PlanNode node;
  node.op = std::string(body.substr(op_start, i - op_start));
  for (auto& item : split_items(body.substr(i), line_no, col + i)) {
    if (is_single_bracket_group(item)) {
      auto elements = split_bracket_elements(std::string_view(item).substr(1, item.size() - 2));
      for (auto& e : elements) node.attributes.push_back(std::move(e));
    } else {
      node.attributes.push_back(std::move(item));
    }
  }
  return node;
}

class TreeBuilder {
 public:
  void add(PlanNode node, std::size_t depth, bool clamp_depth, const SourceLine& line, std::size_t col) {
    if (stack_.empty()) {
      if (depth != 0) throw ParseError("first node must be the root", line.number, col);
      root_ = std::move(node);
      stack_.push_back(&root_);
      return;
    }
    if (depth == 0) throw ParseError("plan has more than one root", line.number, col);
    if (depth > stack_.size()) {
      if (!clamp_depth) throw ParseError("indentation skips a level", line.number, col);
      depth = stack_.size();
    }
    stack_.resize(depth);
    auto& siblings = stack_.back()->children;
    siblings.push_back(std::move(node));
    stack_.push_back(&siblings.back());
  }

  PlanNode take() { return std::move(root_); }

 private:
  PlanNode root_;
  std::vector<PlanNode*> stack_;
};

void render(const PlanNode& node, std::size_t depth, const CanonicalizeOptions& opts, std::string& out);

std::string render_attribute(std::string_view raw, const CanonicalizeOptions& opts) {
  const std::string text = opts.strip_node_ids ? detail::strip_expression_ids(raw) : std::string(raw);
  const auto lexemes = detail::lex(text);
  auto is_literal = [&](const detail::Lexeme& l) {
    return opts.strip_literals &&
           (l.kind == detail::LexemeKind::number || l.kind == detail::LexemeKind::string);
  };

  std::string out;
  if (opts.collapse_whitespace) {
    for (const auto& l : lexemes) {
      if (!out.empty()) out.push_back(' ');
      if (is_literal(l)) {
        out += kLiteralPlaceholder;
      } else {
        out += std::string_view(text).substr(l.pos, l.len);
      }
    }
  } else {
    std::size_t cursor = 0;
    for (const auto& l : lexemes) {
      if (!is_literal(l)) continue;
      out += std::string_view(text).substr(cursor, l.pos - cursor);
      out += kLiteralPlaceholder;
      cursor = l.pos + l.len;
    }
    out += std::string_view(text).substr(cursor);
    out = std::string(trim(out));
  }
  return out;
}

/// Wraps an attribute in [...] whenever re-parsing would otherwise split it
/// or unwrap it.
std::string protect_attribute(std::string attr) {
  bool needs_wrap = is_single_bracket_group(attr);
  int depth = 0;
  char quote = 0;
  for (std::size_t i = 0; i < attr.size() && !needs_wrap; ++i) {
    const char c = attr[i];
    if (quote != 0) {
      if (c == '\\' && quote != '`') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    if (c == '\'' || c == '"' || c == '`') {
      quote = c;
    } else if (c == '(' || c == '[' || c == '{') {
      ++depth;
    } else if (c == ')' || c == ']' || c == '}') {
      --depth;
    } else if (depth == 0 && (is_space(c) || c == ',')) {
      needs_wrap = true;
    }
  }
  if (needs_wrap) return "[" + attr + "]";
  return attr;
}

void render(const PlanNode& node, std::size_t depth, const CanonicalizeOptions& opts, std::string& out) {
  if (!out.empty()) out.push_back('\n');
  out.append(2 * depth, ' ');
  out += node.op;
  for (const auto& attr : node.attributes) {
    auto rendered = render_attribute(attr, opts);
    if (rendered.empty()) continue;
    out.push_back(' ');
    out += protect_attribute(std::move(rendered));
  }
  for (const auto& child : node.children) render(child, depth + 1, opts, out);
}

void collect_ops(const PlanNode& node, std::vector<std::string>& out) {
  out.push_back(node.op);
  for (const auto& child : node.children) collect_ops(child, out);
}

}  // namespace

LogicalPlan parse_plan(std::string_view text) {
  const auto lines = content_lines(text);
  if (lines.empty()) throw ParseError("empty plan", 1, 0);

  const bool spark_layout =
      std::any_of(lines.begin(), lines.end(), [](const SourceLine& l) { return spark_marker_depth(l.text).has_value(); });

  TreeBuilder builder;
  for (const auto& line : lines) {
    std::size_t depth = 0;
    std::size_t col = 0;
    if (spark_layout) {
      if (auto marker = spark_marker_depth(line.text)) {
        depth = *marker;
        col = std::min(3 * depth, line.text.size());
      } else if (is_space(line.text.front())) {
        throw ParseError("expected a '+- ' or ':- ' tree marker", line.number, 0);
      }
    } else {
      while (col < line.text.size() && line.text[col] == ' ') ++col;
      if (col < line.text.size() && line.text[col] == '\t') {
        throw ParseError("tab indentation is not supported", line.number, col);
      }
      if (col % 2 != 0) throw ParseError("indentation must be a multiple of two spaces", line.number, col);
      depth = col / 2;
    }
    auto body = line.text.substr(col);
    builder.add(parse_node_line(body, line.number, col), depth, spark_layout, line, col);
  }
  return LogicalPlan{builder.take(), std::string(text)};
}

std::string canonicalize(const LogicalPlan& plan, const CanonicalizeOptions& opts) {
  std::string out;
  render(plan.root, 0, opts, out);
  return out;
}

std::vector<std::string> tokenize(std::string_view canonical) {
  std::vector<std::string> tokens;
  for (const auto& l : detail::lex(canonical)) tokens.emplace_back(canonical.substr(l.pos, l.len));
  return tokens;
}

std::vector<std::string> operator_sequence(const LogicalPlan& plan) {
  std::vector<std::string> ops;
  collect_ops(plan.root, ops);
  return ops;
}

}  // namespace zest
