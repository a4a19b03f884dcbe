#pragma once

#include <cstddef>
#include <filesystem>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "shotguard/text.hpp"

namespace shotguard {

/// Cue category name. The four built-in categories are provided as
/// constants; rule files may introduce new ones.
class CueCategory {
 public:
  CueCategory() = default;
  explicit CueCategory(std::string name);

  static CueCategory interaction_trigger() { return CueCategory("InteractionTrigger"); }
  static CueCategory credential_request() { return CueCategory("CredentialRequest"); }
  static CueCategory link_invitation() { return CueCategory("LinkInvitation"); }
  static CueCategory control_override() { return CueCategory("ControlOverride"); }

  const std::string& name() const noexcept { return name_; }
  friend auto operator<=>(const CueCategory&, const CueCategory&) = default;

 private:
  std::string name_;
};

struct PatternRule {
  std::string id;
  CueCategory category;
  std::string pattern;  // ECMAScript regex, matched case-insensitively
  std::string description;

  friend bool operator==(const PatternRule&, const PatternRule&) = default;
};

/// Validated, compiled rules. Immutable once built; safe to share.
class RuleSet {
 public:
  // Throws ConfigError naming the offending rule for duplicate ids, bad
  // category names, patterns that fail to compile or match the empty string.
  static RuleSet create(std::vector<PatternRule> rules);

  const std::vector<PatternRule>& rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return rules_.size(); }
  const std::regex& compiled(std::size_t i) const { return compiled_[i]; }
  std::vector<CueCategory> categories() const;

  // Copy of this set with one more rule appended.
  RuleSet with_rule(PatternRule rule) const;
  // Set holding only the rule with the given id.
  RuleSet only(std::string_view id) const;

 private:
  RuleSet() = default;
  std::vector<PatternRule> rules_;
  std::vector<std::regex> compiled_;
};

struct CueMatch {
  std::string rule_id;
  CueCategory category;
  std::string matched_span;  // substring of merged_text at `offset`
  std::size_t offset = 0;
  SourceView source_view = SourceView::original;

  friend bool operator==(const CueMatch&, const CueMatch&) = default;
};

/// Shipped rule set covering the four built-in categories.
const RuleSet& default_ruleset();

/// Rule file I/O. See docs/rule-format.md for the schema.
RuleSet parse_ruleset(std::string_view json_text);
RuleSet load_ruleset(const std::filesystem::path& path);
std::string ruleset_to_json(const RuleSet& rules);

/// Every match of every rule, rule-major, then fragment order, then position.
/// Rules run per fragment, so a span never straddles two fragments.
std::vector<CueMatch> match_patterns(const TextCandidateSet& candidates, const RuleSet& rules);

}  // namespace shotguard
