#include "lhr/model/lhr_model.hpp"

#include <bit>
#include <fstream>

#include "json.hpp"
#include "lhr/error.hpp"

namespace lhr::model {
namespace {

constexpr double kRootInit = 0.05;
constexpr char kMagic[8] = {'L', 'H', 'R', 'C', 'K', 'P', 'T', '\n'};

using nlohmann::json;

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw FormatError("checkpoint truncated");
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

json vocab_to_json(const treebank::Vocabularies& v) {
  json j;
  j["words"] = v.words.symbols();
  j["input_pos"] = v.input_pos.symbols();
  j["chars"] = v.chars.symbols();
  j["labels"] = v.labels.symbols();
  j["pos"] = v.pos.symbols();
  j["seen_pairs"] = v.seen_pairs;
  j["word_counts"] = v.word_counts;
  return j;
}

void fill_vocab(treebank::Vocabulary& vocab, const json& symbols) {
  for (const auto& s : symbols) vocab.add(s.get<std::string>());
}

treebank::Vocabularies vocab_from_json(const json& j) {
  treebank::Vocabularies v;
  // unknown symbol is already at index 0 of the open vocabularies
  fill_vocab(v.words, j.at("words"));
  fill_vocab(v.input_pos, j.at("input_pos"));
  fill_vocab(v.chars, j.at("chars"));
  fill_vocab(v.labels, j.at("labels"));
  fill_vocab(v.pos, j.at("pos"));
  v.seen_pairs = j.at("seen_pairs").get<std::vector<std::pair<std::size_t, std::size_t>>>();
  for (const auto& [k, c] : j.at("word_counts").items()) v.word_counts[k] = c.get<std::size_t>();
  return v;
}

json config_to_json(const ModelConfig& c) {
  return json{{"encoder",
               {{"mode", encoder_mode_name(c.encoder.mode)},
                {"word_dim", c.encoder.word_dim},
                {"pos_dim", c.encoder.pos_dim},
                {"alpha", c.encoder.alpha},
                {"char_dim", c.encoder.char_dim},
                {"char_hidden", c.encoder.char_hidden},
                {"min_count", c.encoder.min_count}}},
              {"context_hidden", c.context_hidden},
              {"heads_hidden", c.heads_hidden},
              {"labeler_hidden", c.labeler_hidden},
              {"labeler_output", labeler_output_name(c.labeler_output)},
              {"root_target", root_target_name(c.root_target)},
              {"seed", c.seed}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  const json& e = j.at("encoder");
  c.encoder.mode = parse_encoder_mode(e.at("mode").get<std::string>());
  c.encoder.word_dim = e.at("word_dim");
  c.encoder.pos_dim = e.at("pos_dim");
  c.encoder.alpha = e.at("alpha");
  c.encoder.char_dim = e.at("char_dim");
  c.encoder.char_hidden = e.at("char_hidden");
  c.encoder.min_count = e.at("min_count");
  c.context_hidden = j.at("context_hidden");
  c.heads_hidden = j.at("heads_hidden");
  c.labeler_hidden = j.at("labeler_hidden");
  c.labeler_output = parse_labeler_output(j.at("labeler_output").get<std::string>());
  c.root_target = parse_root_target(j.at("root_target").get<std::string>());
  c.seed = j.at("seed");
  return c;
}

std::vector<double> copy_of(std::span<const double> s) { return {s.begin(), s.end()}; }

}  // namespace

LabelerOutput parse_labeler_output(std::string_view name) {
  if (name == "margin") return LabelerOutput::margin;
  if (name == "xent" || name == "softmax" || name == "cross-entropy") return LabelerOutput::softmax;
  throw InvalidInput("unknown labeler loss: " + std::string(name));
}

std::string_view labeler_output_name(LabelerOutput v) { return v == LabelerOutput::margin ? "margin" : "xent"; }

RootTarget parse_root_target(std::string_view name) {
  if (name == "root_vector" || name == "root-vector") return RootTarget::root_vector;
  if (name == "self") return RootTarget::self;
  throw InvalidInput("unknown root target: " + std::string(name));
}

std::string_view root_target_name(RootTarget v) { return v == RootTarget::root_vector ? "root_vector" : "self"; }

void ModelConfig::validate() const {
  encoder.validate();
  if (context_hidden == 0 || heads_hidden == 0 || labeler_hidden == 0) {
    throw ConfigError("model hidden sizes must be positive");
  }
}

LhrModel::LhrModel(const ModelConfig& cfg, treebank::Vocabularies vocab)
    : cfg_(cfg),
      vocab_(std::make_unique<treebank::Vocabularies>(std::move(vocab))),
      params_(std::make_unique<nn::ParameterSet>()) {
  cfg_.validate();
  if (vocab_->labels.size() == 0 || vocab_->pos.size() == 0) {
    throw ConfigError("model needs non-empty label and POS vocabularies");
  }
  nn::Rng rng(cfg_.seed);
  const std::size_t c = cfg_.context_size();
  token_encoder_ = TokenEncoder(*params_, cfg_.encoder, *vocab_, rng);
  context_encoder_ = nn::BiEncoder(*params_, "context_encoder", token_encoder_.output_size(), cfg_.context_hidden, rng);
  heads_encoder_ = nn::BiEncoder(*params_, "heads_encoder", c, cfg_.heads_hidden, rng);
  head_reducer_ = nn::DenseLayer(*params_, "head_reducer", 2 * cfg_.heads_hidden, c, nn::Activation::tanh, rng);
  root_vector_ = &params_->add("root_vector", {c});
  nn::init_uniform(*root_vector_, kRootInit, rng);
  labeler_.shared_hidden =
      nn::DenseLayer(*params_, "labeler.hidden", 2 * c, cfg_.labeler_hidden, nn::Activation::tanh, rng);
  labeler_.label_output = nn::DenseLayer(*params_, "labeler.label", cfg_.labeler_hidden, vocab_->labels.size(),
                                         nn::Activation::identity, rng);
  labeler_.pos_output = nn::DenseLayer(*params_, "labeler.pos", cfg_.labeler_hidden, vocab_->pos.size(),
                                       nn::Activation::identity, rng);
  if (head_reducer_.output_size() != c || root_vector_->size() != c || context_encoder_.output_size() != c) {
    throw ConfigError("latent head, context vector and root vector sizes disagree");
  }
}

LhrModel::LhrModel(LhrModel&&) noexcept = default;
LhrModel& LhrModel::operator=(LhrModel&&) noexcept = default;
LhrModel::~LhrModel() = default;

EncodedExprs LhrModel::encode(nn::Graph& g, const treebank::Sentence& sentence, bool training,
                              nn::Rng* dropout_rng) const {
  if (sentence.tokens.empty()) throw InvalidInput("cannot encode an empty sentence");
  EncodedExprs out;
  out.embeddings = token_encoder_.encode_tokens(g, sentence, training, dropout_rng);
  out.context = context_encoder_.encode(g, out.embeddings);
  const auto raw = heads_encoder_.encode(g, out.context);
  out.latent_heads.reserve(raw.size());
  for (nn::Expr r : raw) out.latent_heads.push_back(head_reducer_.forward(g, r));
  return out;
}

EncodedSentence LhrModel::encode_sentence(const treebank::Sentence& sentence) const {
  nn::Graph g;
  const EncodedExprs e = encode(g, sentence, false, nullptr);
  EncodedSentence out;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    out.embeddings.push_back(copy_of(g.value(e.embeddings[i])));
    out.context.push_back(copy_of(g.value(e.context[i])));
    out.latent_heads.push_back(copy_of(g.value(e.latent_heads[i])));
  }
  return out;
}

LabelPosExprs LhrModel::score_label_pos(nn::Graph& g, nn::Expr dependent, nn::Expr governor) const {
  const std::size_t c = context_size();
  if (g.dim(dependent) != c || g.dim(governor) != c) {
    throw ConfigError("labeler inputs must have the context vector size " + std::to_string(c));
  }
  const nn::Expr hidden = labeler_.shared_hidden.forward(g, g.concat({dependent, governor}));
  LabelPosExprs out;
  out.label_logits = labeler_.label_output.forward(g, hidden);
  out.pos_logits = labeler_.pos_output.forward(g, hidden);
  if (cfg_.labeler_output == LabelerOutput::softmax) {
    out.label_scores = g.softmax(out.label_logits);
    out.pos_scores = g.softmax(out.pos_logits);
  } else {
    out.label_scores = out.label_logits;
    out.pos_scores = out.pos_logits;
  }
  return out;
}

LabelPosScores LhrModel::score_label_pos(std::span<const double> dependent, std::span<const double> governor) const {
  nn::Graph g;
  const auto e = score_label_pos(g, g.input(dependent), g.input(governor));
  return {copy_of(g.value(e.label_scores)), copy_of(g.value(e.pos_scores))};
}

std::vector<nn::Tensor> LhrModel::snapshot() const {
  std::vector<nn::Tensor> out;
  out.reserve(params_->size());
  for (const auto& p : *params_) out.push_back(p->value);
  return out;
}

void LhrModel::restore(const std::vector<nn::Tensor>& values) {
  if (values.size() != params_->size()) throw InvalidInput("snapshot does not match the model");
  std::size_t k = 0;
  for (auto& p : *params_) {
    if (values[k].shape() != p->shape()) throw InvalidInput("snapshot shape mismatch for " + p->name);
    p->value = values[k++];
  }
}

void LhrModel::save(const std::filesystem::path& path) const {
  json header;
  header["format"] = "lhr-checkpoint";
  header["version"] = kCheckpointVersion;
  header["config"] = config_to_json(cfg_);
  header["vocabularies"] = vocab_to_json(*vocab_);
  json manifest = json::array();
  for (const auto& p : *params_) manifest.push_back({{"name", p->name}, {"shape", p->shape()}});
  header["parameters"] = manifest;
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write checkpoint: " + path.string());
  out.write(kMagic, sizeof kMagic);
  put_u64(out, kCheckpointVersion);
  put_u64(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& p : *params_) {
    for (double v : p->value.data()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw FormatError("checkpoint write failed: " + path.string());
}

LhrModel LhrModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint: " + path.string());
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || !std::equal(magic, magic + sizeof magic, kMagic)) {
    throw FormatError(path.string() + ": not an LHR checkpoint");
  }
  const std::uint64_t version = get_u64(in);
  if (version != kCheckpointVersion) {
    throw FormatError(path.string() + ": checkpoint version " + std::to_string(version) +
                      " is not supported (expected " + std::to_string(kCheckpointVersion) + ")");
  }
  const std::uint64_t len = get_u64(in);
  std::string text(len, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(len))) throw FormatError("checkpoint truncated");
  json header;
  try {
    header = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": corrupt checkpoint header: " + e.what());
  }
  if (header.value("version", 0u) != kCheckpointVersion) throw FormatError(path.string() + ": header version mismatch");

  LhrModel model(config_from_json(header.at("config")), vocab_from_json(header.at("vocabularies")));
  const json& manifest = header.at("parameters");
  if (manifest.size() != model.params_->size()) throw FormatError(path.string() + ": parameter count mismatch");
  std::size_t k = 0;
  for (auto& p : *model.params_) {
    const json& entry = manifest.at(k++);
    if (entry.at("name").get<std::string>() != p->name ||
        entry.at("shape").get<std::vector<std::size_t>>() != p->shape()) {
      throw FormatError(path.string() + ": unexpected parameter " + entry.at("name").get<std::string>());
    }
    for (double& v : p->value.data()) v = std::bit_cast<double>(get_u64(in));
  }
  return model;
}

std::vector<std::vector<double>> latent_structure(const EncodedSentence& enc) {
  std::vector<std::vector<double>> out;
  out.reserve(enc.size());
  for (std::size_t i = 0; i < enc.size(); ++i) {
    std::vector<double> v = enc.context[i];
    v.insert(v.end(), enc.latent_heads[i].begin(), enc.latent_heads[i].end());
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace lhr::model
