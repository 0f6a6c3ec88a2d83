#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dkb/kb.hpp"
#include "dkb/ltlf.hpp"

namespace dkb {

/// Template catalogue. Init, End, Existence, Exactly and RespExistence have
/// dedicated alignment scores; Absence, Response and Precedence are scored
/// 1/0 by their LTLf reading.
enum class Template { Init, End, Existence, Absence, Exactly, RespExistence, Response, Precedence };

std::string_view template_name(Template t) noexcept;
/// Case-insensitive; also accepts `responded_existence`.
std::optional<Template> parse_template_name(std::string_view name) noexcept;
bool is_binary(Template t) noexcept;
bool has_count(Template t) noexcept;
/// True for the templates without a graded alignment expression.
bool is_boolean_scored(Template t) noexcept;

/// An instantiated template. The data predicate guards the activation
/// (the first argument).
struct DeclareConstraint {
  Template kind;
  std::string activation;
  std::optional<std::string> target;
  DataPredicate predicate;
  std::uint32_t n = 1;

  /// Throws std::invalid_argument unless the arity and n fit the template.
  void validate() const;
  /// `Template[args]` plus ` | predicate` when there is one; parses back.
  std::string to_string() const;

  friend bool operator==(const DeclareConstraint&, const DeclareConstraint&) = default;
};

struct DeclareModel {
  std::vector<DeclareConstraint> constraints;

  bool empty() const noexcept { return constraints.empty(); }
  std::size_t size() const noexcept { return constraints.size(); }
  /// Every activity mentioned, join targets included.
  std::set<std::string> labels() const;
};

/// One constraint per non-blank line, `Template[args] | predicate`,
/// `#` starts a comment. Throws SyntaxError / UnsupportedTemplate.
DeclareConstraint parse_constraint(std::string_view text, const ValueOrder& order = {},
                                   std::size_t line = 1);
DeclareModel parse_model(std::istream& in, const ValueOrder& order = {});
DeclareModel parse_model(const std::filesystem::path& path, const ValueOrder& order = {});

Formula to_ltlf(const DeclareConstraint& c);

bool model_sat(const DeclareModel& m, const Trace& trace, const KnowledgeBase& kb);

}  // namespace dkb
