#include "homograph/cli.hpp"

#include "homograph/checkpoint.hpp"
#include "homograph/gradcheck.hpp"
#include "homograph/lexicon.hpp"
#include "homograph/metrics.hpp"
#include "homograph/training.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace homograph::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// -------------------------------------------------------------------------
// Run configuration: INI-style file ([section] per module) + flag overrides.
// -------------------------------------------------------------------------

struct RunConfig {
  // [corpus]
  std::string contrast_set;
  std::string lexicon;
  int cap = 20;
  int k = 10;
  // [encoding]
  std::string embeddings;
  int random_dim = 16;  // used when no embeddings file is given
  int feature_dim = 8;
  int max_slots = 8;
  bool include_tense = true;
  bool include_valence = true;
  // [model]
  std::string encoder = "word_vec";
  std::string aggregator = "window";
  int radius = 3;
  bool include_target = false;
  int layers = 2;
  int hidden = 64;
  int mlp_hidden = 128;
  // [training]
  double learning_rate = 1e-3;
  int max_epochs = 50;
  int patience = 5;
  double dev_fraction = 0.1;
  std::uint64_t seed = 0;
  bool freeze_pretrained = true;
  // [cli]
  std::string out_dir = ".";
};

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ValidationError("config key '" + key + "' expects a boolean, got '" + value + "'");
}

template <typename T>
T parse_number(const std::string& value, const std::string& key) {
  std::istringstream in(value);
  T parsed{};
  if (!(in >> parsed) || !in.eof())
    throw ValidationError("config key '" + key + "' expects a number, got '" + value + "'");
  return parsed;
}

void apply_config_entry(RunConfig& cfg, const std::string& section, const std::string& key,
                        const std::string& value) {
  const std::string path = section + "." + key;
  if (path == "corpus.contrast_set") cfg.contrast_set = value;
  else if (path == "corpus.lexicon") cfg.lexicon = value;
  else if (path == "corpus.cap") cfg.cap = parse_number<int>(value, path);
  else if (path == "corpus.k") cfg.k = parse_number<int>(value, path);
  else if (path == "encoding.embeddings") cfg.embeddings = value;
  else if (path == "encoding.random_dim") cfg.random_dim = parse_number<int>(value, path);
  else if (path == "encoding.feature_dim") cfg.feature_dim = parse_number<int>(value, path);
  else if (path == "encoding.max_slots") cfg.max_slots = parse_number<int>(value, path);
  else if (path == "encoding.include_tense") cfg.include_tense = parse_bool(value, path);
  else if (path == "encoding.include_valence") cfg.include_valence = parse_bool(value, path);
  else if (path == "model.encoder") cfg.encoder = value;
  else if (path == "model.aggregator") cfg.aggregator = value;
  else if (path == "model.radius") cfg.radius = parse_number<int>(value, path);
  else if (path == "model.include_target") cfg.include_target = parse_bool(value, path);
  else if (path == "model.layers") cfg.layers = parse_number<int>(value, path);
  else if (path == "model.hidden") cfg.hidden = parse_number<int>(value, path);
  else if (path == "model.mlp_hidden") cfg.mlp_hidden = parse_number<int>(value, path);
  else if (path == "training.learning_rate") cfg.learning_rate = parse_number<double>(value, path);
  else if (path == "training.max_epochs") cfg.max_epochs = parse_number<int>(value, path);
  else if (path == "training.patience") cfg.patience = parse_number<int>(value, path);
  else if (path == "training.dev_fraction") cfg.dev_fraction = parse_number<double>(value, path);
  else if (path == "training.seed") cfg.seed = parse_number<std::uint64_t>(value, path);
  else if (path == "training.freeze_pretrained") cfg.freeze_pretrained = parse_bool(value, path);
  else if (path == "cli.out") cfg.out_dir = value;
  else throw ValidationError("unknown config key '" + path + "'");
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

void load_config_file(RunConfig& cfg, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path.string());
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
    if (section.empty())
      throw ValidationError("config line " + std::to_string(line_no) + ": key outside a section");
    apply_config_entry(cfg, section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

int worker_count(int k) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  int workers = static_cast<int>(hw);
  if (const char* env = std::getenv("HF_THREADS")) {
    try {
      workers = std::min(workers, std::max(1, std::stoi(env)));
    } catch (const std::exception&) {
      throw ValidationError("HF_THREADS must be a positive integer");
    }
  }
  return std::clamp(workers, 1, std::max(1, k));
}

// -------------------------------------------------------------------------
// Shared assembly
// -------------------------------------------------------------------------

LatticeConfig lattice_config(const RunConfig& cfg) {
  LatticeConfig lattice;
  lattice.max_slots = cfg.max_slots;
  lattice.feature_dim = cfg.feature_dim;
  lattice.set_active(Feature::Tense, cfg.include_tense);
  lattice.set_active(Feature::Valence, cfg.include_valence);
  return lattice;
}

AggregatorKind make_aggregator(const RunConfig& cfg, const std::string& name) {
  if (name == "window") return WindowConcatConfig{cfg.radius, cfg.include_target};
  if (name == "bilstm") return BiLstmConfig{cfg.layers, cfg.hidden};
  throw ValidationError("unknown aggregator '" + name + "' (expected window or bilstm)");
}

TrainConfig make_train_config(const RunConfig& cfg, EncoderKind encoder,
                              const std::string& aggregator) {
  TrainConfig tc;
  tc.encoder = encoder;
  tc.aggregator = make_aggregator(cfg, aggregator);
  tc.lattice = lattice_config(cfg);
  tc.mlp_hidden = cfg.mlp_hidden;
  tc.learning_rate = cfg.learning_rate;
  tc.max_epochs = cfg.max_epochs;
  tc.patience = cfg.patience;
  tc.dev_fraction = cfg.dev_fraction;
  tc.seed = cfg.seed;
  tc.freeze_pretrained = cfg.freeze_pretrained;
  return tc;
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ValidationError("missing " + what + " path");
  if (!fs::exists(path)) throw ValidationError(what + " file not found: " + path);
}

void validate_both_classes(const ContrastSet& set) {
  const auto [c1, c2] = class_counts(set);
  if (c1 == 0 || c2 == 0)
    throw ValidationError("contrast set must contain instances of both classes (got " +
                          std::to_string(c1) + "/" + std::to_string(c2) + ")");
}

std::vector<std::string> corpus_vocabulary(const ContrastSet& set) {
  std::set<std::string> words;
  for (const auto& inst : set.instances)
    for (const auto& tok : inst.tokens) words.insert(tok);
  return {words.begin(), words.end()};
}

std::shared_ptr<const EmbeddingTable> make_table(const RunConfig& cfg, const ContrastSet& set,
                                                 bool needed) {
  if (!needed) return nullptr;
  if (!cfg.embeddings.empty())
    return std::make_shared<const EmbeddingTable>(load_embeddings(cfg.embeddings, cfg.seed));
  return std::make_shared<const EmbeddingTable>(
      random_embeddings(corpus_vocabulary(set), cfg.random_dim, cfg.seed));
}

std::shared_ptr<const Lexicon> make_lexicon(const RunConfig& cfg, bool needed) {
  if (!needed) return nullptr;
  require_file(cfg.lexicon, "lexicon");
  return std::make_shared<const Lexicon>(Lexicon::load(cfg.lexicon));
}

void write_text_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw ValidationError("cannot write file: " + path.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string format_log(const std::vector<EpochLog>& log, int fold) {
  std::string text;
  char buf[128];
  for (const auto& entry : log) {
    std::snprintf(buf, sizeof buf, "epoch=%d fold=%d loss=%.6f dev_acc=%.4f\n", entry.epoch, fold,
                  entry.train_loss, entry.dev_accuracy);
    text += buf;
  }
  return text;
}

std::string cell_stem(EncoderKind encoder, const std::string& aggregator) {
  return std::string(to_string(encoder)) + "_" + aggregator;
}

std::string render_full_report(const EvalReport& report) {
  char buf[160];
  std::string text = render_report(report, ReportStyle::Table2);
  std::snprintf(buf, sizeof buf, "accuracy=%.4f support1=%ld support2=%ld\n", report.accuracy,
                report.class1.support, report.class2.support);
  text += buf;
  return text;
}

// -------------------------------------------------------------------------
// build-corpus
// -------------------------------------------------------------------------

struct RawCorpus {
  HomographSpec spec;
  std::vector<AnnotatedInstance> instances;  // expanded per occurrence
};

RawCorpus load_raw_instances(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open raw instance file: " + path.string());
  RawCorpus raw;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError("raw instances line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header) {
      raw.spec = spec_from_json(record.dump());
      have_header = true;
      continue;
    }
    std::vector<std::string> tokens;
    for (const auto& t : record.at("tokens")) tokens.push_back(t.get<std::string>());
    const int label = record.at("label").get<int>();
    if (label != 1 && label != 2)
      throw ValidationError("raw instances line " + std::to_string(line_no) +
                            ": label must be 1 or 2");
    const std::string source_id = record.value("source_id", std::string());
    for (int idx : extract_instances(tokens, raw.spec.surface_form))
      raw.instances.push_back({tokens, idx, label, source_id});
  }
  if (!have_header)
    throw ValidationError("raw instance file has no homograph header: " + path.string());
  return raw;
}

int cmd_build_corpus(const RunConfig& cfg, const std::string& raw_path, std::ostream& out,
                     const BuildCorpusHooks& hooks) {
  require_file(raw_path, "raw instances");
  RawCorpus raw = load_raw_instances(raw_path);

  if (hooks.candidate_filter) {
    std::vector<AnnotatedInstance> kept;
    for (auto& inst : raw.instances)
      if (hooks.candidate_filter(inst)) kept.push_back(std::move(inst));
    raw.instances = std::move(kept);
  }

  ContrastSet set;
  set.spec = raw.spec;
  set.instances = collocation_cap_filter(raw.instances, cfg.cap, cfg.seed);

  const auto [c1, c2] = class_counts(set);
  if (c1 == 0 || c2 == 0)
    throw ValidationError("class " + std::to_string(c1 == 0 ? 1 : 2) +
                          " is empty after filtering");

  fs::create_directories(cfg.out_dir);
  const fs::path target = fs::path(cfg.out_dir) / (set.spec.surface_form + ".contrast.jsonl");
  write_contrast_set(target, set);

  out << "wrote " << target.string() << "\n";
  out << "class_counts " << c1 << " " << c2 << " ratio " << compute_ratio(c1, c2) << "\n";
  for (int c = 1; c <= 2; ++c) {
    const int n = c == 1 ? c1 : c2;
    if (n < kMinClassSupport)
      out << "warning: class " << c << " has " << n << " instances, below the " << kMinClassSupport
          << "-sentence support floor\n";
  }
  return 0;
}

// -------------------------------------------------------------------------
// stats
// -------------------------------------------------------------------------

std::string format_frequency(const std::optional<double>& freq) {
  if (!freq) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", *freq);
  return buf;
}

int cmd_stats(const std::vector<std::string>& files, std::ostream& out) {
  std::set<std::string> seen;
  std::vector<std::string> errors;
  out << "#\tForm\tOption1\tMorph1\tFreq1\tOption2\tMorph2\tFreq2\tN1\tN2\tRatio\n";
  int row = 0;
  for (const auto& file : files) {
    try {
      require_file(file, "contrast set");
      const ContrastSet set = load_contrast_set(file);
      if (!seen.insert(set.spec.surface_form).second)
        throw ValidationError("duplicate homograph '" + set.spec.surface_form + "' in " + file);
      const auto [c1, c2] = class_counts(set);
      const auto& o1 = set.spec.options[0];
      const auto& o2 = set.spec.options[1];
      std::string ratio = "-";
      if (o1.frequency_per_million && o2.frequency_per_million)
        ratio = compute_ratio(*o1.frequency_per_million, *o2.frequency_per_million);
      else if (c1 > 0 && c2 > 0)
        ratio = compute_ratio(c1, c2);
      out << ++row << '\t' << set.spec.surface_form << '\t' << o1.gloss << " ("
          << o1.diacritized_form << ")\t" << format_analysis(o1.morphology, ',') << '\t'
          << format_frequency(o1.frequency_per_million) << '\t' << o2.gloss << " ("
          << o2.diacritized_form << ")\t" << format_analysis(o2.morphology, ',') << '\t'
          << format_frequency(o2.frequency_per_million) << '\t' << c1 << '\t' << c2 << '\t'
          << ratio << '\n';
    } catch (const ValidationError& e) {
      errors.push_back(e.what());
    }
  }
  if (!errors.empty()) {
    std::string combined = "stats failed for " + std::to_string(errors.size()) + " file(s):";
    for (const auto& e : errors) combined += "\n  " + e;
    throw ValidationError(combined);
  }
  return 0;
}

// -------------------------------------------------------------------------
// train / evaluate
// -------------------------------------------------------------------------

struct LoadedRun {
  ContrastSet set;
  std::shared_ptr<const EmbeddingTable> table;
  std::shared_ptr<const Lexicon> lexicon;
};

LoadedRun load_run_inputs(const RunConfig& cfg, EncoderKind encoder) {
  // Validate every referenced path before any heavy work starts.
  require_file(cfg.contrast_set, "contrast set");
  const ModelConfig probe{encoder, WindowConcatConfig{}, {}, 1, true};
  if (probe.uses_lattice()) require_file(cfg.lexicon, "lexicon");
  if (probe.uses_words() && !cfg.embeddings.empty()) require_file(cfg.embeddings, "embeddings");

  LoadedRun run;
  run.set = load_contrast_set(cfg.contrast_set);
  validate_both_classes(run.set);
  run.table = make_table(cfg, run.set, probe.uses_words());
  run.lexicon = make_lexicon(cfg, probe.uses_lattice());
  return run;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  const EncoderKind encoder = encoder_kind_from_string(cfg.encoder);
  const LoadedRun run = load_run_inputs(cfg, encoder);
  const TrainConfig tc = make_train_config(cfg, encoder, cfg.aggregator);

  const auto classifier = train(run.set, tc, run.table, run.lexicon);

  fs::create_directories(cfg.out_dir);
  const std::string stem = cell_stem(encoder, cfg.aggregator);
  const fs::path ckpt = fs::path(cfg.out_dir) / ("model_" + stem + ".ckpt");
  save_checkpoint(ckpt, classifier);
  write_text_file(fs::path(cfg.out_dir) / ("training_log_" + stem + ".txt"),
                  format_log(classifier.log, 0));

  double best_dev = 0.0;
  for (const auto& entry : classifier.log) best_dev = std::max(best_dev, entry.dev_accuracy);
  char buf[128];
  std::snprintf(buf, sizeof buf, "trained %s: epochs=%zu best_dev_acc=%.4f\n", stem.c_str(),
                classifier.log.size(), best_dev);
  out << buf << "wrote " << ckpt.string() << "\n";
  return 0;
}

struct MatrixCell {
  EncoderKind encoder;
  std::string aggregator;
  EvalReport report;
};

std::string render_matrix(const std::string& form, const std::vector<MatrixCell>& cells) {
  std::string text = "Word\tWord2vec\t\tMorphology\t\tComposite\t\n";
  text += "\tConcat\tLSTM\tConcat\tLSTM\tConcat\tLSTM\n";
  text += form;
  for (const auto& cell : cells) text += '\t' + format_f1(cell.report.macro_f1);
  text += '\n';
  return text;
}

EvalReport run_one_evaluation(const RunConfig& cfg, const LoadedRun& run, EncoderKind encoder,
                              const std::string& aggregator, int workers, std::ostream& out) {
  const TrainConfig tc = make_train_config(cfg, encoder, aggregator);
  const std::string stem = cell_stem(encoder, aggregator);
  const auto save_fold = [&](int fold, const TrainedClassifier& classifier) {
    save_checkpoint(fs::path(cfg.out_dir) /
                        ("checkpoint_" + stem + "_fold" + std::to_string(fold) + ".ckpt"),
                    classifier);
  };
  const auto result =
      cross_validate(run.set, tc, run.table, run.lexicon, cfg.k, workers, save_fold);
  std::string log_text;
  for (int f = 0; f < static_cast<int>(result.folds.size()); ++f)
    log_text += format_log(result.folds[f].log, f);
  write_text_file(fs::path(cfg.out_dir) / ("training_log_" + stem + ".txt"), log_text);
  write_text_file(fs::path(cfg.out_dir) / ("report_" + stem + ".json"),
                  report_to_json(result.aggregate) + "\n");
  write_text_file(fs::path(cfg.out_dir) / ("report_" + stem + ".txt"),
                  render_full_report(result.aggregate));

  out << "# " << stem << " macro_f1=" << format_f1(result.aggregate.macro_f1) << "\n";
  return result.aggregate;
}

int cmd_evaluate(const RunConfig& cfg, bool matrix, std::ostream& out) {
  if (cfg.k < 2) throw ValidationError("evaluate requires k >= 2 folds");
  fs::create_directories(cfg.out_dir);
  const int workers = worker_count(cfg.k);

  if (!matrix) {
    const EncoderKind encoder = encoder_kind_from_string(cfg.encoder);
    const LoadedRun run = load_run_inputs(cfg, encoder);
    const EvalReport report =
        run_one_evaluation(cfg, run, encoder, cfg.aggregator, workers, out);
    out << render_full_report(report);
    return 0;
  }

  // Matrix mode always needs every input kind.
  const LoadedRun run = load_run_inputs(cfg, EncoderKind::Composite);
  std::vector<MatrixCell> cells;
  for (const EncoderKind encoder :
       {EncoderKind::WordVec, EncoderKind::MorphLattice, EncoderKind::Composite})
    for (const std::string aggregator : {"window", "bilstm"})
      cells.push_back(
          {encoder, aggregator, run_one_evaluation(cfg, run, encoder, aggregator, workers, out)});

  const std::string grid = render_matrix(run.set.spec.surface_form, cells);
  json cells_json = json::array();
  for (const auto& cell : cells) {
    json c = json::object();
    c["encoder"] = std::string(to_string(cell.encoder));
    c["aggregator"] = cell.aggregator;
    c["report"] = json::parse(report_to_json(cell.report));
    cells_json.push_back(std::move(c));
  }
  json matrix_json = json::object();
  matrix_json["surface_form"] = run.set.spec.surface_form;
  matrix_json["cells"] = std::move(cells_json);

  write_text_file(fs::path(cfg.out_dir) / "matrix.txt", grid);
  write_text_file(fs::path(cfg.out_dir) / "matrix.json", matrix_json.dump() + "\n");
  out << grid;
  return 0;
}

// -------------------------------------------------------------------------
// compare / gradcheck
// -------------------------------------------------------------------------

int cmd_compare(const std::string& path_a, const std::string& path_b, std::ostream& out) {
  require_file(path_a, "report A");
  require_file(path_b, "report B");
  const auto read = [](const std::string& path) {
    std::ifstream in(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return report_from_json(buffer.str());
  };
  const EvalReport a = read(path_a);
  const EvalReport b = read(path_b);

  out << "report\tP1\tR1\tP2\tR2\tAvg-F1\n";
  const auto row = [&](const std::string& name, const EvalReport& r) {
    out << name << '\t' << format_percent(r.class1.precision) << '\t'
        << format_percent(r.class1.recall) << '\t' << format_percent(r.class2.precision) << '\t'
        << format_percent(r.class2.recall) << '\t' << format_f1(r.macro_f1) << '\n';
  };
  row("A", a);
  row("B", b);
  if (a.macro_f1 && b.macro_f1) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "delta(B-A)\t%+.3f\n", *b.macro_f1 - *a.macro_f1);
    out << buf;
  } else {
    out << "delta(B-A)\t" << kUndefinedMark << "\n";
  }
  return 0;
}

int cmd_gradcheck(std::uint64_t seed, int samples, std::ostream& out) {
  gradcheck::Options options;
  options.seed = seed;
  options.samples = samples;

  bool all_passed = true;
  for (const auto& combo : gradcheck::run_standard_checks(options)) {
    out << "== " << to_string(combo.encoder) << " + " << combo.aggregator << " ==\n";
    for (const auto& group : combo.result.groups) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "%-24s max_rel_err=%.3e checked=%d %s\n",
                    group.group.c_str(), group.max_rel_err, group.checked,
                    group.max_rel_err < options.tolerance ? "ok" : "FAIL");
      out << buf;
    }
    all_passed = all_passed && combo.result.passed;
  }
  out << (all_passed ? "gradcheck: PASS\n" : "gradcheck: FAIL\n");
  return all_passed ? 0 : 3;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err,
        const BuildCorpusHooks& hooks) {
  CLI::App app{"Per-homograph contrast sets and specialized disambiguation classifiers"};
  app.require_subcommand(1);

  std::string config_path;
  RunConfig cfg;
  bool seed_set = false, out_set = false;
  std::uint64_t seed_flag = 0;
  std::string out_flag;

  app.add_option("--config", config_path, "INI config file ([section] per module)");
  app.add_option("--seed", seed_flag, "random seed")->each([&](const std::string&) {
    seed_set = true;
  });
  app.add_option("--out", out_flag, "output directory")->each([&](const std::string&) {
    out_set = true;
  });
  const auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--seed", seed_flag, "random seed")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--out", out_flag, "output directory")->each([&](const std::string&) {
      out_set = true;
    });
    sub->fallthrough();
  };

  auto* build = app.add_subcommand("build-corpus", "expand raw instances into a contrast set");
  std::string raw_path;
  build->add_option("raw", raw_path, "raw instance file (JSONL with homograph header)")
      ->required();
  int cap_flag = 0;
  bool cap_set = false;
  build->add_option("--cap", cap_flag, "collocation cap")->each([&](const std::string&) {
    cap_set = true;
  });
  add_globals(build);

  auto* stats = app.add_subcommand("stats", "summarize contrast set files");
  std::vector<std::string> stats_files;
  stats->add_option("files", stats_files, "contrast set files")->required();
  add_globals(stats);

  std::string set_flag, encoder_flag, aggregator_flag;
  bool set_set = false, encoder_set = false, aggregator_set = false;
  int k_flag = 0;
  bool k_set = false;
  bool valence_value = true, valence_flag_set = false;
  const auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("set", set_flag, "contrast set file")->each([&](const std::string&) {
      set_set = true;
    });
    sub->add_option("--encoder", encoder_flag, "word_vec | morph_lattice | composite")
        ->each([&](const std::string&) { encoder_set = true; });
    sub->add_option("--aggregator", aggregator_flag, "window | bilstm")
        ->each([&](const std::string&) { aggregator_set = true; });
    sub->add_option("--k", k_flag, "fold count")->each([&](const std::string&) { k_set = true; });
    sub->add_flag("--valence,!--no-valence", valence_value,
                  "include the valence supertag in the lattice")
        ->each([&](const std::string&) { valence_flag_set = true; });
    add_globals(sub);
  };

  auto* train_cmd = app.add_subcommand("train", "train one classifier on a contrast set");
  add_run_options(train_cmd);

  auto* evaluate = app.add_subcommand("evaluate", "k-fold cross-validation evaluation");
  bool matrix = false;
  evaluate->add_flag("--matrix", matrix, "run all 6 encoder x aggregator combinations");
  add_run_options(evaluate);

  auto* compare = app.add_subcommand("compare", "compare two report JSON files");
  std::string report_a, report_b;
  compare->add_option("reportA", report_a)->required();
  compare->add_option("reportB", report_b)->required();
  add_globals(compare);

  auto* gradcheck_cmd =
      app.add_subcommand("gradcheck", "finite-difference gradient verification");
  int samples = 200;
  gradcheck_cmd->add_option("--samples", samples, "parameters sampled per combination");
  add_globals(gradcheck_cmd);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (!config_path.empty()) {
      require_file(config_path, "config");
      load_config_file(cfg, config_path);
    }
    if (seed_set) cfg.seed = seed_flag;
    if (out_set) cfg.out_dir = out_flag;
    if (cap_set) cfg.cap = cap_flag;
    if (set_set) cfg.contrast_set = set_flag;
    if (encoder_set) cfg.encoder = encoder_flag;
    if (aggregator_set) cfg.aggregator = aggregator_flag;
    if (k_set) cfg.k = k_flag;
    if (valence_flag_set) cfg.include_valence = valence_value;

    if (build->parsed()) return cmd_build_corpus(cfg, raw_path, out, hooks);
    if (stats->parsed()) return cmd_stats(stats_files, out);
    if (train_cmd->parsed()) return cmd_train(cfg, out);
    if (evaluate->parsed()) return cmd_evaluate(cfg, matrix, out);
    if (compare->parsed()) return cmd_compare(report_a, report_b, out);
    if (gradcheck_cmd->parsed()) return cmd_gradcheck(cfg.seed, samples, out);
    err << "error: no subcommand\n";
    return 1;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return 2;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args));
}

}  // namespace homograph::cli
