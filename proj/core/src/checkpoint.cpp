#include "homograph/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>

namespace homograph {

namespace {

void put_bytes(std::ostream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  put_bytes(out, b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  put_bytes(out, b, 8);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

void put_string(std::ostream& out, std::string_view s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  put_bytes(out, s.data(), s.size());
}

void put_tensor(std::ostream& out, const std::string& name, const Mat& m) {
  put_string(out, name);
  put_u64(out, static_cast<std::uint64_t>(m.rows()));
  put_u64(out, static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
}

struct Reader {
  std::ifstream in;
  std::string path;

  void get_bytes(void* data, std::size_t n) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
    if (in.gcount() != static_cast<std::streamsize>(n))
      throw ValidationError("truncated checkpoint file: " + path);
  }
  std::uint32_t get_u32() {
    unsigned char b[4];
    get_bytes(b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t get_u64() {
    unsigned char b[8];
    get_bytes(b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  double get_f64() {
    const std::uint64_t bits = get_u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  std::string get_string() {
    const auto n = get_u32();
    std::string s(n, '\0');
    get_bytes(s.data(), n);
    return s;
  }
  Mat get_tensor_body() {
    const auto rows = static_cast<Eigen::Index>(get_u64());
    const auto cols = static_cast<Eigen::Index>(get_u64());
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = get_f64();
    return m;
  }
};

constexpr std::uint8_t kAggWindow = 0;
constexpr std::uint8_t kAggBiLstm = 1;

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const TrainedClassifier& classifier) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write checkpoint file: " + path.string());

    const TrainConfig& cfg = classifier.config;
    const Model& model = classifier.model;

    put_bytes(out, kCheckpointMagic, 8);
    put_u32(out, kCheckpointVersion);

    out.put(static_cast<char>(cfg.encoder));
    if (const auto* w = std::get_if<WindowConcatConfig>(&cfg.aggregator)) {
      out.put(static_cast<char>(kAggWindow));
      put_u32(out, static_cast<std::uint32_t>(w->radius));
      out.put(w->include_target ? 1 : 0);
    } else {
      const auto& b = std::get<BiLstmConfig>(cfg.aggregator);
      out.put(static_cast<char>(kAggBiLstm));
      put_u32(out, static_cast<std::uint32_t>(b.layers));
      put_u32(out, static_cast<std::uint32_t>(b.hidden));
    }
    put_u32(out, static_cast<std::uint32_t>(cfg.lattice.max_slots));
    put_u32(out, static_cast<std::uint32_t>(cfg.lattice.feature_dim));
    std::uint32_t mask = 0;
    for (int f = 0; f < kFeatureCount; ++f)
      if (cfg.lattice.active[f]) mask |= 1u << f;
    put_u32(out, mask);
    put_u32(out, static_cast<std::uint32_t>(cfg.mlp_hidden));
    out.put(cfg.freeze_pretrained ? 1 : 0);
    put_f64(out, cfg.learning_rate);
    put_u32(out, static_cast<std::uint32_t>(cfg.max_epochs));
    put_u32(out, static_cast<std::uint32_t>(cfg.patience));
    put_f64(out, cfg.dev_fraction);
    put_u64(out, cfg.seed);

    const auto* table =
        cfg.model_config().uses_words() ? model.embedding_table() : nullptr;
    out.put(table ? 1 : 0);
    if (table) {
      put_u32(out, static_cast<std::uint32_t>(table->dim));
      put_u64(out, table->words.size());
      for (const auto& w : table->words) put_string(out, w);
    }

    auto tensors = model.trainable_tensors();
    const bool store_pretrained = table && cfg.freeze_pretrained;
    put_u32(out, static_cast<std::uint32_t>(tensors.size() + (store_pretrained ? 1 : 0)));
    if (store_pretrained) put_tensor(out, "emb.pretrained", table->rows);
    for (const auto& [name, tensor] : tensors) put_tensor(out, name, *tensor);
  }
  std::filesystem::rename(tmp, path);
}

TrainedClassifier load_checkpoint(const std::filesystem::path& path,
                                  std::shared_ptr<const Lexicon> lexicon) {
  Reader reader{std::ifstream(path, std::ios::binary), path.string()};
  if (!reader.in) throw ValidationError("cannot open checkpoint file: " + path.string());

  char magic[8];
  reader.get_bytes(magic, 8);
  if (std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw ValidationError("not a homograph checkpoint file: " + path.string());
  const auto version = reader.get_u32();
  if (version != kCheckpointVersion)
    throw ValidationError("unsupported checkpoint version " + std::to_string(version) +
                          " (expected " + std::to_string(kCheckpointVersion) + ")");

  TrainConfig cfg;
  char byte = 0;
  reader.get_bytes(&byte, 1);
  cfg.encoder = static_cast<EncoderKind>(byte);
  reader.get_bytes(&byte, 1);
  if (static_cast<std::uint8_t>(byte) == kAggWindow) {
    WindowConcatConfig w;
    w.radius = static_cast<int>(reader.get_u32());
    reader.get_bytes(&byte, 1);
    w.include_target = byte != 0;
    cfg.aggregator = w;
  } else {
    BiLstmConfig b;
    b.layers = static_cast<int>(reader.get_u32());
    b.hidden = static_cast<int>(reader.get_u32());
    cfg.aggregator = b;
  }
  cfg.lattice.max_slots = static_cast<int>(reader.get_u32());
  cfg.lattice.feature_dim = static_cast<int>(reader.get_u32());
  const auto mask = reader.get_u32();
  for (int f = 0; f < kFeatureCount; ++f) cfg.lattice.active[f] = (mask >> f) & 1u;
  cfg.mlp_hidden = static_cast<int>(reader.get_u32());
  reader.get_bytes(&byte, 1);
  cfg.freeze_pretrained = byte != 0;
  cfg.learning_rate = reader.get_f64();
  cfg.max_epochs = static_cast<int>(reader.get_u32());
  cfg.patience = static_cast<int>(reader.get_u32());
  cfg.dev_fraction = reader.get_f64();
  cfg.seed = reader.get_u64();

  reader.get_bytes(&byte, 1);
  std::shared_ptr<EmbeddingTable> table;
  if (byte != 0) {
    table = std::make_shared<EmbeddingTable>();
    table->dim = static_cast<int>(reader.get_u32());
    const auto vocab = reader.get_u64();
    table->words.reserve(vocab);
    for (std::uint64_t i = 0; i < vocab; ++i) {
      table->words.push_back(reader.get_string());
      table->index.emplace(table->words.back(), static_cast<int>(i));
    }
  }

  std::map<std::string, Mat> tensors;
  const auto tensor_count = reader.get_u32();
  for (std::uint32_t t = 0; t < tensor_count; ++t) {
    std::string name = reader.get_string();
    tensors[std::move(name)] = reader.get_tensor_body();
  }

  const auto take = [&](const std::string& name) -> Mat {
    const auto it = tensors.find(name);
    if (it == tensors.end())
      throw ValidationError("checkpoint is missing tensor '" + name + "': " + path.string());
    return it->second;
  };

  if (table) {
    table->rows = cfg.freeze_pretrained ? take("emb.pretrained") : take("emb.rows");
    if (table->rows.rows() != static_cast<Eigen::Index>(table->words.size()) ||
        table->rows.cols() != table->dim)
      throw ValidationError("checkpoint embedding rows do not match the stored vocabulary");
    table->oov = take("emb.oov");
    table->boundary = take("emb.boundary");
  }

  Model model(cfg.model_config(), table, std::move(lexicon), cfg.seed);
  for (auto& [name, tensor] : model.trainable_tensors()) {
    const Mat stored = take(name);
    if (stored.rows() != tensor->rows() || stored.cols() != tensor->cols())
      throw ValidationError("checkpoint tensor '" + name + "' has shape " +
                            std::to_string(stored.rows()) + "x" + std::to_string(stored.cols()) +
                            ", expected " + std::to_string(tensor->rows()) + "x" +
                            std::to_string(tensor->cols()));
    *tensor = stored;
  }

  return TrainedClassifier{cfg, std::move(model), {}};
}

}  // namespace homograph
