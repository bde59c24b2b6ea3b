#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lpc {

using AtomId = std::uint32_t;

/// Signed reference to an atom. Ordered by atom first, positive before negative.
struct Literal {
  AtomId atom = 0;
  bool positive = true;

  constexpr Literal operator~() const { return {atom, !positive}; }
  /// Dense code 2*atom + (negative ? 1 : 0), usable as an array index.
  constexpr std::uint32_t code() const { return 2 * atom + (positive ? 0U : 1U); }

  friend constexpr auto operator<=>(const Literal& a, const Literal& b) {
    if (auto c = a.atom <=> b.atom; c != 0) return c;
    return b.positive <=> a.positive;
  }
  friend constexpr bool operator==(const Literal&, const Literal&) = default;
};

constexpr Literal pos(AtomId a) { return {a, true}; }
constexpr Literal neg(AtomId a) { return {a, false}; }

/// Normal rule `head :- pos_body, not neg_body.`; an absent head is a constraint.
struct Rule {
  std::optional<AtomId> head;
  std::vector<AtomId> pos_body;  // sorted, unique
  std::vector<AtomId> neg_body;  // sorted, unique

  bool is_constraint() const { return !head.has_value(); }
  bool is_fact() const { return head && pos_body.empty() && neg_body.empty(); }
  std::size_t body_size() const { return pos_body.size() + neg_body.size(); }

  friend bool operator==(const Rule&, const Rule&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Ground normal program. Atoms are interned with dense ids in first-occurrence order.
class Program {
 public:
  /// Returns the id of `name`, creating it if needed.
  AtomId intern(std::string_view name);
  std::optional<AtomId> find(std::string_view name) const;

  /// Adds a rule; bodies are sorted and deduplicated. Atom ids must exist.
  void add_rule(Rule rule);

  std::size_t atom_count() const { return names_.size(); }
  const std::string& name(AtomId a) const { return names_.at(a); }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Rule>& rules() const { return rules_; }

  /// Atoms occurring in some rule (ids of at(P), ascending).
  std::vector<AtomId> rule_atoms() const;

  /// Renders the program in the input grammar; `parse_program(print())` reproduces it.
  std::string print() const;
  std::string format(Literal l) const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, AtomId> index_;
  std::vector<Rule> rules_;
};

Program parse_program(std::string_view text);

/// Both polarities of every atom, in literal order.
std::vector<Literal> literals_of(const Program& p);

bool check_consistent(std::span<const Literal> literals);

/// Sorted, duplicate-free set of assumption literals. May be inconsistent;
/// consumers short-circuit to a zero count in that case.
class AssumptionSet {
 public:
  AssumptionSet() = default;
  explicit AssumptionSet(std::vector<Literal> literals);

  /// Parses "a,-b,c" (whitespace tolerated, empty string = no assumptions).
  /// Throws std::invalid_argument naming an unknown atom.
  static AssumptionSet parse(const Program& p, std::string_view text);
  static AssumptionSet parse(const std::vector<std::string>& atom_names, std::string_view text);

  const std::vector<Literal>& literals() const { return literals_; }
  bool empty() const { return literals_.empty(); }
  std::size_t size() const { return literals_.size(); }
  bool consistent() const { return check_consistent(literals_); }
  bool contains(Literal l) const;
  bool mentions(AtomId a) const { return contains(pos(a)) || contains(neg(a)); }

  AssumptionSet with(Literal l) const;
  AssumptionSet with(std::span<const Literal> ls) const;

  /// "a,-b" rendering with the given names.
  std::string format(const std::vector<std::string>& atom_names) const;

  friend bool operator==(const AssumptionSet&, const AssumptionSet&) = default;

 private:
  std::vector<Literal> literals_;
};

}  // namespace lpc
