#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace homograph {

// Morphological feature bundle for one reading of a Hebrew surface form.
// Every field always carries a value; NA is an explicit value (index 0 of
// every enumeration), never an absence.

enum class Pos : std::uint8_t {
  NA,
  ACC,
  PRONOUN,
  PREPOSITION,
  NOUN,
  PROPER_NOUN,
  VERB,
  PARTICIPLE,
  ADJECTIVE,
  CARDINAL,
  CONJUNCTION,
  INTERJECTION,
  PREP_PLUS_PRONOUN,
  ACC_PLUS_PRONOUN,
  PREP_PLUS_NOUN,
};

enum class Gender : std::uint8_t { NA, M, F, MF };
enum class Number : std::uint8_t { NA, S, P };
enum class Person : std::uint8_t { NA, P1, P2, P3 };
enum class Status : std::uint8_t { NA, ABS, CONS, ABS_OR_CONS };
enum class Binyan : std::uint8_t { NA, PAAL, NIFAL, PIEL, PUAL, HIFIL, HUFAL, HITPAEL };
enum class Tense : std::uint8_t { NA, PAST, FUTURE, PRESENT, IMPERATIVE };
enum class Marker : std::uint8_t { NA, PRESENT, ABSENT };  // suffix / prefix
enum class Valence : std::uint8_t { NA, TRANSITIVE, INTRANSITIVE, BOTH };

/// The 13 features, in the fixed field order used everywhere (slot encoding
/// segments, lexicon serialization, slot ordering).
enum class Feature : int {
  Pos,
  Gender,
  Number,
  Person,
  Status,
  Binyan,
  Tense,
  Suffix,
  SufGender,
  SufPerson,
  SufNumber,
  Prefix,
  Valence,
};

inline constexpr int kFeatureCount = 13;

struct FeatureInfo {
  std::string_view name;
  std::span<const std::string_view> values;  // values[0] is always "NA"
};

/// Static metadata for feature `f` (name and value spellings).
const FeatureInfo& feature_info(Feature f);

struct MorphAnalysis {
  Pos pos = Pos::NA;
  Gender gender = Gender::NA;
  Number number = Number::NA;
  Person person = Person::NA;
  Status status = Status::NA;
  Binyan binyan = Binyan::NA;
  Tense tense = Tense::NA;
  Marker suffix = Marker::NA;
  Gender suf_gender = Gender::NA;
  Person suf_person = Person::NA;
  Number suf_number = Number::NA;
  Marker prefix = Marker::NA;
  Valence valence = Valence::NA;

  std::uint8_t value_index(Feature f) const;
  void set_value_index(Feature f, std::uint8_t idx);

  /// Field-order tuple of value indices; the canonical sort key for slot
  /// ordering (pos enumeration order, then lexicographic on the rest).
  std::array<std::uint8_t, kFeatureCount> key() const;

  bool operator==(const MorphAnalysis&) const = default;
};

/// Throws ValidationError if the bundle breaks a type invariant:
/// valence only on VERB/PARTICIPLE, suf_* only under suffix=PRESENT.
void validate(const MorphAnalysis& analysis);

/// Value spelling for `feature=value` round trips; rejects unknown spellings.
std::string_view value_name(Feature f, std::uint8_t idx);
std::uint8_t parse_value(Feature f, std::string_view text);
Feature parse_feature(std::string_view name);

/// Render as tab-free "feature=value" pairs, NA fields omitted, field order.
std::string format_analysis(const MorphAnalysis& analysis, char sep = ' ');

}  // namespace homograph
