#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace zest {

/// One operator of a logical plan. Attributes keep the order they had in the
/// source line; bracketed lists are flattened into one attribute per element.
struct PlanNode {
  std::string op;
  std::vector<std::string> attributes;
  std::vector<PlanNode> children;

  bool operator==(const PlanNode&) const = default;
};

struct LogicalPlan {
  PlanNode root;
  std::string source_text;
};

struct CanonicalizeOptions {
  bool strip_node_ids = true;
  bool strip_literals = false;
  bool collapse_whitespace = true;

  bool operator==(const CanonicalizeOptions&) const = default;
};

/// Parses a plan dump. Two layouts are accepted:
///
///   * Spark tree strings, where children are introduced by "+- " or ":- "
///     markers and ancestors are drawn with ":  " / "   " columns. Lines that
///     start with "==" (section headers) are skipped, as are blank lines.
///   * One node per line, depth given by two-space indentation.
///
/// Throws ParseError on empty input, odd or tab indentation, depth jumps,
/// multiple roots or unbalanced brackets.
LogicalPlan parse_plan(std::string_view text);

/// Deterministic text form of the plan: one node per line, two spaces per
/// depth level, attributes separated by single spaces. The output parses back
/// with parse_plan and canonicalizing it again yields the same string.
std::string canonicalize(const LogicalPlan& plan, const CanonicalizeOptions& opts = {});

/// Splits on whitespace and punctuation. Identifiers, numbers (with type
/// suffixes such as 5L), quoted strings and multi-character comparison
/// operators stay whole.
std::vector<std::string> tokenize(std::string_view canonical);

/// Pre-order operator sequence, handy for tests and reports.
std::vector<std::string> operator_sequence(const LogicalPlan& plan);

/// Placeholder written in place of literals when strip_literals is on.
inline constexpr std::string_view kLiteralPlaceholder = "?";

}  // namespace zest
