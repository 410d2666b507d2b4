#include "homograph/morph.hpp"

#include "homograph/common.hpp"

#include <algorithm>

namespace homograph {

namespace {

constexpr std::string_view kPosValues[] = {
    "NA",          "ACC",          "PRONOUN",   "PREPOSITION",
    "NOUN",        "PROPER_NOUN",  "VERB",      "PARTICIPLE",
    "ADJECTIVE",   "CARDINAL",     "CONJUNCTION", "INTERJECTION",
    "PREP_PLUS_PRONOUN", "ACC_PLUS_PRONOUN", "PREP_PLUS_NOUN"};
constexpr std::string_view kGenderValues[] = {"NA", "M", "F", "MF"};
constexpr std::string_view kNumberValues[] = {"NA", "S", "P"};
constexpr std::string_view kPersonValues[] = {"NA", "1", "2", "3"};
constexpr std::string_view kStatusValues[] = {"NA", "ABS", "CONS", "ABS_OR_CONS"};
constexpr std::string_view kBinyanValues[] = {"NA",    "PAAL",  "NIFAL", "PIEL",
                                              "PUAL",  "HIFIL", "HUFAL", "HITPAEL"};
constexpr std::string_view kTenseValues[] = {"NA", "PAST", "FUTURE", "PRESENT", "IMPERATIVE"};
constexpr std::string_view kMarkerValues[] = {"NA", "PRESENT", "ABSENT"};
constexpr std::string_view kValenceValues[] = {"NA", "TRANSITIVE", "INTRANSITIVE", "BOTH"};

const std::array<FeatureInfo, kFeatureCount> kFeatures = {{
    {"pos", kPosValues},
    {"gender", kGenderValues},
    {"number", kNumberValues},
    {"person", kPersonValues},
    {"status", kStatusValues},
    {"binyan", kBinyanValues},
    {"tense", kTenseValues},
    {"suffix", kMarkerValues},
    {"suf_gender", kGenderValues},
    {"suf_person", kPersonValues},
    {"suf_number", kNumberValues},
    {"prefix", kMarkerValues},
    {"valence", kValenceValues},
}};

}  // namespace

const FeatureInfo& feature_info(Feature f) {
  return kFeatures[static_cast<int>(f)];
}

std::uint8_t MorphAnalysis::value_index(Feature f) const {
  switch (f) {
    case Feature::Pos: return static_cast<std::uint8_t>(pos);
    case Feature::Gender: return static_cast<std::uint8_t>(gender);
    case Feature::Number: return static_cast<std::uint8_t>(number);
    case Feature::Person: return static_cast<std::uint8_t>(person);
    case Feature::Status: return static_cast<std::uint8_t>(status);
    case Feature::Binyan: return static_cast<std::uint8_t>(binyan);
    case Feature::Tense: return static_cast<std::uint8_t>(tense);
    case Feature::Suffix: return static_cast<std::uint8_t>(suffix);
    case Feature::SufGender: return static_cast<std::uint8_t>(suf_gender);
    case Feature::SufPerson: return static_cast<std::uint8_t>(suf_person);
    case Feature::SufNumber: return static_cast<std::uint8_t>(suf_number);
    case Feature::Prefix: return static_cast<std::uint8_t>(prefix);
    case Feature::Valence: return static_cast<std::uint8_t>(valence);
  }
  throw std::logic_error("bad feature");
}

void MorphAnalysis::set_value_index(Feature f, std::uint8_t idx) {
  if (idx >= feature_info(f).values.size())
    throw ValidationError("value index out of range for feature " +
                          std::string(feature_info(f).name));
  switch (f) {
    case Feature::Pos: pos = static_cast<Pos>(idx); return;
    case Feature::Gender: gender = static_cast<Gender>(idx); return;
    case Feature::Number: number = static_cast<Number>(idx); return;
    case Feature::Person: person = static_cast<Person>(idx); return;
    case Feature::Status: status = static_cast<Status>(idx); return;
    case Feature::Binyan: binyan = static_cast<Binyan>(idx); return;
    case Feature::Tense: tense = static_cast<Tense>(idx); return;
    case Feature::Suffix: suffix = static_cast<Marker>(idx); return;
    case Feature::SufGender: suf_gender = static_cast<Gender>(idx); return;
    case Feature::SufPerson: suf_person = static_cast<Person>(idx); return;
    case Feature::SufNumber: suf_number = static_cast<Number>(idx); return;
    case Feature::Prefix: prefix = static_cast<Marker>(idx); return;
    case Feature::Valence: valence = static_cast<Valence>(idx); return;
  }
  throw std::logic_error("bad feature");
}

std::array<std::uint8_t, kFeatureCount> MorphAnalysis::key() const {
  std::array<std::uint8_t, kFeatureCount> k{};
  for (int f = 0; f < kFeatureCount; ++f)
    k[f] = value_index(static_cast<Feature>(f));
  return k;
}

void validate(const MorphAnalysis& a) {
  if (a.valence != Valence::NA && a.pos != Pos::VERB && a.pos != Pos::PARTICIPLE)
    throw ValidationError("valence requires pos VERB or PARTICIPLE (got " +
                          std::string(value_name(Feature::Pos, a.value_index(Feature::Pos))) + ")");
  if (a.suffix != Marker::PRESENT &&
      (a.suf_gender != Gender::NA || a.suf_person != Person::NA || a.suf_number != Number::NA))
    throw ValidationError("suf_gender/suf_person/suf_number require suffix=PRESENT");
}

std::string_view value_name(Feature f, std::uint8_t idx) {
  const auto& info = feature_info(f);
  if (idx >= info.values.size())
    throw std::out_of_range("value index out of range for feature " + std::string(info.name));
  return info.values[idx];
}

std::uint8_t parse_value(Feature f, std::string_view text) {
  const auto& info = feature_info(f);
  for (std::size_t i = 0; i < info.values.size(); ++i)
    if (info.values[i] == text) return static_cast<std::uint8_t>(i);
  throw ValidationError("unknown value '" + std::string(text) + "' for feature " +
                        std::string(info.name));
}

Feature parse_feature(std::string_view name) {
  for (int f = 0; f < kFeatureCount; ++f)
    if (kFeatures[f].name == name) return static_cast<Feature>(f);
  throw ValidationError("unknown morphological feature '" + std::string(name) + "'");
}

std::string format_analysis(const MorphAnalysis& a, char sep) {
  std::string out;
  for (int f = 0; f < kFeatureCount; ++f) {
    const auto idx = a.value_index(static_cast<Feature>(f));
    if (idx == 0) continue;  // NA omitted
    if (!out.empty()) out.push_back(sep);
    out += kFeatures[f].name;
    out.push_back('=');
    out += kFeatures[f].values[idx];
  }
  return out;
}

}  // namespace homograph
