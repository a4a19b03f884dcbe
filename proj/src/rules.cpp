#include "shotguard/rules.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "shotguard/error.hpp"

namespace shotguard {
namespace {

using nlohmann::json;

constexpr std::string_view kFormat = "shotguard-rules";
constexpr int kVersion = 1;

bool valid_category_name(const std::string& name) {
  if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0]))) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::regex compile(const PatternRule& rule) {
  std::regex re;
  try {
    re = std::regex(rule.pattern, std::regex::ECMAScript | std::regex::icase |
                                      std::regex::optimize);
  } catch (const std::regex_error& e) {
    throw ConfigError("rule '" + rule.id + "': pattern does not compile: " + e.what());
  }
  if (std::regex_match(std::string{}, re)) {
    throw ConfigError("rule '" + rule.id + "': pattern matches the empty string");
  }
  return re;
}

// Lexical realisations of the four cue categories. Interaction triggers need
// directive context ("below", "this link", ...) so plain shop buttons such as
// "Buy now" or "Add to cart" stay silent.
// clang-format off
const std::vector<PatternRule> kDefaultRules = {
    {"it.click_target", CueCategory::interaction_trigger(),
     R"(\b(click|tap|press|hit)\b[^.\n]{0,40}?\b(link|button|below|here|icon|banner)\b)",
     "imperative click/tap aimed at a UI target"},
    {"it.agent_address", CueCategory::interaction_trigger(),
     R"(\b(agent|assistant|ai|bot)\b[^.\n]{0,30}?\b(click|press|select|submit|type|navigate|scroll)\b)",
     "instruction addressed to an automated agent"},
    {"it.urgent_action", CueCategory::interaction_trigger(),
     R"(\b(click|tap|select|press|download|install|proceed)\b[^.\n]{0,20}?\b(immediately|right away|before (continuing|proceeding))\b)",
     "action demanded with urgency"},
    {"it.open_target", CueCategory::interaction_trigger(),
     R"(\b(open|download|install|run)\s+(this|the following|the attached|the file|the app)\b)",
     "request to open or install a referenced artifact"},

    {"cr.enter_secret", CueCategory::credential_request(),
     R"(\b(enter|provide|type|input|submit|confirm|share|re-?enter)\b[^.\n]{0,40}?\b(password|passcode|pin code|credentials?|verification code|one[- ]time code|otp|security code|card number|cvv)\b)",
     "request to type a secret"},
    {"cr.secret_required", CueCategory::credential_request(),
     R"(\b(password|credentials?|verification code|security code|api key|card details)\b[^.\n]{0,20}?\b(required|needed|expired|must be)\b)",
     "claim that a secret is required"},
    {"cr.verify_account", CueCategory::credential_request(),
     R"(\bverify your (identity|account|login|credentials)\b)",
     "account verification lure"},
    {"cr.reauth", CueCategory::credential_request(),
     R"(\b(log ?in|sign ?in|re-?authenticate)\b[^.\n]{0,20}?\b(again|immediately|to verify|to confirm|to unlock)\b)",
     "forced re-authentication"},

    {"li.url_scheme", CueCategory::link_invitation(),
     R"(\b(https?://|www\.)[^\s]+)",
     "explicit URL"},
    {"li.visit_domain", CueCategory::link_invitation(),
     R"(\b(visit|go to|navigate to|head to|open)\s+[a-z0-9-]+(\.[a-z0-9-]+)+\b)",
     "navigation request to a domain-like token"},
    {"li.link_reference", CueCategory::link_invitation(),
     R"(\b(the|this|following|below|secure)\s+link\b)",
     "reference to a specific link"},

    {"co.ignore_previous", CueCategory::control_override(),
     R"(\b(ignore|disregard|forget|override)\b[^.\n]{0,30}?\b(previous|prior|above|earlier|all|original|user'?s?)\b[^.\n]{0,20}?\b(instructions?|tasks?|prompts?|rules?|directions?|requests?)\b)",
     "instruction displacement"},
    {"co.new_task", CueCategory::control_override(),
     R"(\byour (new|real|actual|only|updated) (task|goal|objective|instructions?|mission)\b)",
     "task reassignment"},
    {"co.must_now", CueCategory::control_override(),
     R"(\byou (must|should|need to) now\b)",
     "imperative re-direction"},
    {"co.instead", CueCategory::control_override(),
     R"(\binstead of\b[^.\n]{0,40}?\b(task|user|instructions?|request)\b)",
     "substitution of the user's goal"},
    {"co.authority", CueCategory::control_override(),
     R"(\b(system|admin|administrator|developer) (override|instruction|command)s?\b)",
     "impersonated authority"},
};
// clang-format on

std::string required_string(const json& rec, const char* key, const std::string& who) {
  if (!rec.contains(key) || !rec.at(key).is_string()) {
    throw ConfigError(who + ": missing or non-string field '" + key + "'");
  }
  return rec.at(key).get<std::string>();
}

}  // namespace

CueCategory::CueCategory(std::string name) : name_(std::move(name)) {}

RuleSet RuleSet::create(std::vector<PatternRule> rules) {
  RuleSet set;
  std::set<std::string> ids;
  for (auto& rule : rules) {
    if (rule.id.empty()) throw ConfigError("rule with empty id");
    if (!ids.insert(rule.id).second) throw ConfigError("rule '" + rule.id + "': duplicate id");
    if (!valid_category_name(rule.category.name())) {
      throw ConfigError("rule '" + rule.id + "': invalid category '" + rule.category.name() + "'");
    }
    set.compiled_.push_back(compile(rule));
    set.rules_.push_back(std::move(rule));
  }
  return set;
}

std::vector<CueCategory> RuleSet::categories() const {
  std::set<CueCategory> seen;
  for (const auto& r : rules_) seen.insert(r.category);
  return {seen.begin(), seen.end()};
}

RuleSet RuleSet::with_rule(PatternRule rule) const {
  auto rules = rules_;
  rules.push_back(std::move(rule));
  return create(std::move(rules));
}

RuleSet RuleSet::only(std::string_view id) const {
  for (const auto& r : rules_) {
    if (r.id == id) return create({r});
  }
  throw ConfigError("no rule with id '" + std::string(id) + "'");
}

const RuleSet& default_ruleset() {
  static const RuleSet set = RuleSet::create(kDefaultRules);
  return set;
}

RuleSet parse_ruleset(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("rule file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kFormat) {
    throw ConfigError("rule file must be an object with \"format\": \"shotguard-rules\"");
  }
  if (doc.value("version", 0) != kVersion) {
    throw ConfigError("unsupported rule file version");
  }
  if (!doc.contains("rules") || !doc.at("rules").is_array()) {
    throw ConfigError("rule file needs a \"rules\" array");
  }
  std::vector<PatternRule> rules;
  std::size_t index = 0;
  for (const auto& rec : doc.at("rules")) {
    const std::string who = "rule #" + std::to_string(index++);
    if (!rec.is_object()) throw ConfigError(who + ": not an object");
    PatternRule r;
    r.id = required_string(rec, "id", who);
    const std::string named = "rule '" + r.id + "'";
    r.category = CueCategory(required_string(rec, "category", named));
    r.pattern = required_string(rec, "pattern", named);
    r.description = rec.value("description", "");
    rules.push_back(std::move(r));
  }
  return RuleSet::create(std::move(rules));
}

RuleSet load_ruleset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read rule file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_ruleset(buf.str());
}

std::string ruleset_to_json(const RuleSet& rules) {
  nlohmann::ordered_json doc{{"format", kFormat}, {"version", kVersion}, {"rules", nlohmann::ordered_json::array()}};
  for (const auto& r : rules.rules()) {
    doc["rules"].push_back({{"id", r.id},
                            {"category", r.category.name()},
                            {"pattern", r.pattern},
                            {"description", r.description}});
  }
  return doc.dump(2) + "\n";
}

std::vector<CueMatch> match_patterns(const TextCandidateSet& candidates, const RuleSet& rules) {
  std::vector<CueMatch> out;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& rule = rules.rules()[i];
    const auto& re = rules.compiled(i);
    for (const auto& frag : candidates.fragments()) {
      const auto& text = frag.normalized;
      for (auto it = std::sregex_iterator(text.begin(), text.end(), re);
           it != std::sregex_iterator(); ++it) {
        if (it->length() == 0) continue;
        out.push_back(CueMatch{rule.id, rule.category, it->str(),
                               frag.offset + static_cast<std::size_t>(it->position()),
                               frag.source_view});
      }
    }
  }
  return out;
}

}  // namespace shotguard
