#include "homograph/lexicon.hpp"

#include "homograph/common.hpp"

#include <fstream>
#include <sstream>

namespace homograph {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= line.size()) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(line.substr(start));
      break;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

MorphAnalysis parse_analysis_line(std::string_view body, int line_no) {
  MorphAnalysis a;
  for (auto field : split(body, '\t')) {
    if (field.empty()) continue;
    const auto eq = field.find('=');
    if (eq == std::string_view::npos)
      throw ValidationError("lexicon line " + std::to_string(line_no) +
                            ": expected feature=value, got '" + std::string(field) + "'");
    const Feature f = parse_feature(field.substr(0, eq));
    a.set_value_index(f, parse_value(f, field.substr(eq + 1)));
  }
  validate(a);
  return a;
}

}  // namespace

const std::vector<MorphAnalysis>* Lexicon::find(std::string_view word) const {
  const auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

void Lexicon::add(std::string word, std::vector<MorphAnalysis> analyses) {
  if (word.empty()) throw ValidationError("lexicon: empty surface form");
  if (analyses.empty())
    throw ValidationError("lexicon entry '" + word + "' has no analyses");
  for (const auto& a : analyses) validate(a);
  entries_[std::move(word)] = std::move(analyses);
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open lexicon file: " + path.string());

  Lexicon lex;
  std::string current_word;
  std::vector<MorphAnalysis> current;
  std::string line;
  int line_no = 0;

  auto flush = [&] {
    if (current_word.empty()) return;
    lex.add(std::move(current_word), std::move(current));
    current_word.clear();
    current.clear();
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '\t') {
      if (current_word.empty())
        throw ValidationError("lexicon line " + std::to_string(line_no) +
                              ": analysis line before any surface form");
      current.push_back(parse_analysis_line(std::string_view(line).substr(1), line_no));
    } else {
      flush();
      current_word = line;
    }
  }
  flush();
  return lex;
}

void Lexicon::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ValidationError("cannot write lexicon file: " + path.string());
  for (const auto& [word, analyses] : entries_) {
    out << word << '\n';
    for (const auto& a : analyses) {
      const std::string body = format_analysis(a, '\t');
      out << '\t' << body << '\n';
    }
  }
}

}  // namespace homograph
