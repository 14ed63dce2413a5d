// lhr: train, parse, evaluate and export latent structures.
//
// Settings come from built-in defaults, then a flat key=value config file
// (--config), then command-line flags, later sources winning.
//
// Exit status: 0 success, 2 usage or configuration error, 1 runtime failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "lhr/decoder/decoder.hpp"
#include "lhr/error.hpp"
#include "lhr/eval/eval.hpp"
#include "lhr/model/lhr_model.hpp"
#include "lhr/model/lss_io.hpp"
#include "lhr/simd/kernels.hpp"
#include "lhr/train/trainer.hpp"
#include "lhr/treebank/conll.hpp"
#include "lhr/treebank/vocabulary.hpp"

namespace {

using namespace lhr;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

using Settings = std::map<std::string, std::string>;

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "seed",
      "epochs",
      "format",
      "pos_correction",
      "encoder.mode",
      "encoder.word_dim",
      "encoder.pos_dim",
      "encoder.alpha",
      "encoder.char_dim",
      "encoder.char_hidden",
      "encoder.min_count",
      "model.context_hidden",
      "model.heads_hidden",
      "model.labeler_hidden",
      "model.root_target",
      "train.learning_rate",
      "train.beta1",
      "train.beta2",
      "train.eps",
      "train.loss",
      "train.labeler_loss",
      "train.labeler_weight",
      "train.skip_punct_heads",
      "train.target_gradient",
      "train.word_dropout",
      "train.allow_partial",
      "train.dev_eval_every",
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Settings read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  Settings out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

void check_keys(const Settings& s) {
  const auto& keys = known_keys();
  for (const auto& [k, v] : s) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ConfigError("unknown config key: " + k);
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected on/off, got '" + v + "'");
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || x < 0) throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return static_cast<std::size_t>(x);
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

template <class F>
auto as_config_error(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const InvalidInput& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

struct Resolved {
  model::ModelConfig model;
  train::TrainConfig train;
  treebank::Format format = treebank::Format::conllu;
  bool pos_correction = true;
};

Resolved resolve(const Settings& s) {
  Resolved r;
  auto get = [&](const std::string& k) -> const std::string* {
    auto it = s.find(k);
    return it == s.end() ? nullptr : &it->second;
  };
  if (auto v = get("seed")) {
    const auto seed = parse_size("seed", *v);
    r.model.seed = seed;
    r.train.shuffle_seed = seed;
  }
  if (auto v = get("epochs")) r.train.epochs = parse_size("epochs", *v);
  if (auto v = get("format")) r.format = as_config_error("format", [&] { return treebank::parse_format(*v); });
  if (auto v = get("pos_correction")) r.pos_correction = parse_bool("pos_correction", *v);

  auto& enc = r.model.encoder;
  if (auto v = get("encoder.mode")) enc.mode = as_config_error("encoder.mode", [&] { return model::parse_encoder_mode(*v); });
  if (auto v = get("encoder.word_dim")) enc.word_dim = parse_size("encoder.word_dim", *v);
  if (auto v = get("encoder.pos_dim")) enc.pos_dim = parse_size("encoder.pos_dim", *v);
  if (auto v = get("encoder.alpha")) enc.alpha = parse_double("encoder.alpha", *v);
  if (auto v = get("encoder.char_dim")) enc.char_dim = parse_size("encoder.char_dim", *v);
  if (auto v = get("encoder.char_hidden")) enc.char_hidden = parse_size("encoder.char_hidden", *v);
  if (auto v = get("encoder.min_count")) enc.min_count = parse_size("encoder.min_count", *v);

  if (auto v = get("model.context_hidden")) r.model.context_hidden = parse_size("model.context_hidden", *v);
  if (auto v = get("model.heads_hidden")) r.model.heads_hidden = parse_size("model.heads_hidden", *v);
  if (auto v = get("model.labeler_hidden")) r.model.labeler_hidden = parse_size("model.labeler_hidden", *v);
  if (auto v = get("model.root_target")) {
    r.model.root_target = as_config_error("model.root_target", [&] { return model::parse_root_target(*v); });
  }

  auto& t = r.train;
  if (auto v = get("train.learning_rate")) t.adam.learning_rate = parse_double("train.learning_rate", *v);
  if (auto v = get("train.beta1")) t.adam.beta1 = parse_double("train.beta1", *v);
  if (auto v = get("train.beta2")) t.adam.beta2 = parse_double("train.beta2", *v);
  if (auto v = get("train.eps")) t.adam.epsilon = parse_double("train.eps", *v);
  if (auto v = get("train.loss")) t.loss = as_config_error("train.loss", [&] { return train::parse_head_loss(*v); });
  if (auto v = get("train.labeler_loss")) {
    r.model.labeler_output = as_config_error("train.labeler_loss", [&] { return model::parse_labeler_output(*v); });
  }
  t.labeler_loss = r.model.labeler_output;
  if (auto v = get("train.labeler_weight")) t.labeler_weight = parse_double("train.labeler_weight", *v);
  if (auto v = get("train.skip_punct_heads")) t.skip_punctuation_heads = parse_bool("train.skip_punct_heads", *v);
  if (auto v = get("train.target_gradient")) t.target_gradient = parse_bool("train.target_gradient", *v);
  if (auto v = get("train.word_dropout")) t.word_dropout = parse_bool("train.word_dropout", *v);
  if (auto v = get("train.allow_partial")) t.allow_partial_trees = parse_bool("train.allow_partial", *v);
  if (auto v = get("train.dev_eval_every")) t.dev_eval_every = parse_size("train.dev_eval_every", *v);
  t.pos_correction = r.pos_correction;

  r.model.validate();
  t.validate();
  return r;
}

treebank::Treebank read_input(const std::string& path, treebank::Format format, bool strict) {
  treebank::ReadOptions opt;
  opt.format = format;
  opt.strict = strict;
  return treebank::read_conll(path, opt);
}

// Predicted file contents as trees: HEAD, DEPREL and the coarse POS column.
std::vector<DependencyTree> trees_from_file(const treebank::Treebank& tb) {
  std::vector<DependencyTree> out;
  for (const auto& s : tb.sentences) {
    DependencyTree t;
    for (const auto& tok : s.tokens) {
      t.heads.push_back(tok.gold_head);
      t.labels.push_back(tok.gold_label);
      t.pos.push_back(tok.gold_pos);
      t.arc_scores.push_back(0.0);
    }
    out.push_back(std::move(t));
  }
  return out;
}

struct Options {
  std::string train_path, dev_path, test_path, model_path, output_path, predicted_path, config_path, report_path;
  std::string lss_format = "text";
  Settings flags;  // settings given on the command line, by config key
};

int cmd_train(const Options& o, const Resolved& r) {
  auto train_tb = read_input(o.train_path, r.format, !r.train.allow_partial_trees);
  treebank::Treebank dev_tb;
  if (!o.dev_path.empty()) dev_tb = read_input(o.dev_path, r.format, false);
  model::LhrModel m(r.model, treebank::build_vocabularies(train_tb, r.model.encoder.min_count));
  auto cfg = r.train;
  cfg.log = &std::cerr;
  std::cerr << "kernels: " << simd::isa_name(simd::kernels().isa) << "\n";
  const auto report = train::train(m, train_tb, dev_tb, cfg);
  m.save(o.model_path);
  const std::string report_path = o.report_path.empty() ? o.model_path + ".report.tsv" : o.report_path;
  std::ofstream rep(report_path);
  if (!rep) throw std::runtime_error("cannot write report: " + report_path);
  report.write(rep);
  if (report.best_epoch > 0) {
    std::cerr << "best dev UAS " << 100.0 * report.best_dev_uas << " at epoch " << report.best_epoch << "\n";
  }
  return 0;
}

int cmd_parse(const Options& o, const Resolved& r) {
  const auto m = model::LhrModel::load(o.model_path);
  const auto tb = read_input(o.test_path, r.format, false);
  const auto trees = decoder::parse_all(m, tb, decoder::DecodeOptions{r.pos_correction});
  if (o.output_path.empty() || o.output_path == "-") {
    treebank::write_conll(tb, trees, std::cout);
  } else {
    treebank::write_conll(tb, trees, o.output_path);
  }
  return 0;
}

int cmd_eval(const Options& o, const Resolved& r) {
  const auto gold = read_input(o.test_path, r.format, false);
  const auto predicted = read_input(o.predicted_path, r.format, false);
  if (gold.sentences.size() != predicted.sentences.size()) {
    throw InvalidInput("gold has " + std::to_string(gold.sentences.size()) + " sentences, predicted has " +
                       std::to_string(predicted.sentences.size()));
  }
  for (std::size_t s = 0; s < gold.sentences.size(); ++s) {
    const auto& a = gold.sentences[s];
    const auto& b = predicted.sentences[s];
    bool same = a.size() == b.size();
    for (std::size_t i = 0; same && i < a.size(); ++i) same = a.tokens[i].form == b.tokens[i].form;
    if (!same) throw InvalidInput("sentence " + std::to_string(s + 1) + " differs between gold and predicted");
  }
  const auto result = eval::evaluate(gold, trees_from_file(predicted), false);
  eval::print_summary(std::cout, result);
  if (!o.output_path.empty()) {
    std::ofstream out(o.output_path);
    if (!out) throw std::runtime_error("cannot write report: " + o.output_path);
    eval::write_report(out, result);
  }
  return 0;
}

int cmd_export_lss(const Options& o, const Resolved& r) {
  const auto m = model::LhrModel::load(o.model_path);
  const auto tb = read_input(o.test_path, r.format, false);
  std::vector<model::LssRecord> records;
  for (std::size_t s = 0; s < tb.sentences.size(); ++s) {
    const auto lss = model::latent_structure(m.encode_sentence(tb.sentences[s]));
    for (std::size_t i = 0; i < lss.size(); ++i) records.push_back({s + 1, i + 1, lss[i]});
  }
  const auto fmt = o.lss_format == "binary" ? model::LssFormat::binary : model::LssFormat::text;
  model::write_lss(o.output_path, records, fmt);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dependency parsing by latent head reconstruction"};
  app.require_subcommand(1);
  Options o;

  auto* train_cmd = app.add_subcommand("train", "Train a model and write the best-dev checkpoint");
  auto* parse_cmd = app.add_subcommand("parse", "Parse a CoNLL file with a trained model");
  auto* eval_cmd = app.add_subcommand("eval", "Score predicted trees against gold trees");
  auto* lss_cmd = app.add_subcommand("export-lss", "Write [c_i; h_i] for every token");

  // Each flag writes its value straight into the settings map under its config key.
  auto setting = [&](CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    return cmd->add_option_function<std::string>(flag, [&o, key](const std::string& v) { o.flags[key] = v; }, help);
  };
  auto switch_flag = [&](CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    return cmd->add_flag_callback(flag, [&o, key] { o.flags[key] = "on"; }, help);
  };

  for (auto* cmd : {train_cmd, parse_cmd, eval_cmd, lss_cmd}) {
    cmd->add_option("--config", o.config_path, "Flat key=value configuration file")->check(CLI::ExistingFile);
    setting(cmd, "--format", "format", "conllu | conllx");
  }

  train_cmd->add_option("--train", o.train_path, "Training treebank")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--dev", o.dev_path, "Development treebank")->check(CLI::ExistingFile);
  train_cmd->add_option("--model", o.model_path, "Checkpoint to write")->required();
  train_cmd->add_option("--report", o.report_path, "Per-epoch TSV report (default <model>.report.tsv)");
  setting(train_cmd, "--seed", "seed", "Seed for initialization, shuffling and dropout");
  setting(train_cmd, "--epochs", "epochs", "Number of epochs");
  setting(train_cmd, "--encoder-mode", "encoder.mode", "word+pos | word+char");
  setting(train_cmd, "--loss", "train.loss", "Head reconstruction loss: mse | mae");
  setting(train_cmd, "--labeler-loss", "train.labeler_loss", "margin | xent");
  switch_flag(train_cmd, "--skip-punct-heads", "train.skip_punct_heads", "Skip head reconstruction of punctuation");
  setting(train_cmd, "--pos-correction", "pos_correction", "Decode dev POS from the labeler: on | off");

  parse_cmd->add_option("--model", o.model_path, "Checkpoint")->required()->check(CLI::ExistingFile);
  parse_cmd->add_option("--test", o.test_path, "Input treebank")->required()->check(CLI::ExistingFile);
  parse_cmd->add_option("--output", o.output_path, "Output file (default stdout)");
  setting(parse_cmd, "--pos-correction", "pos_correction", "Output labeler POS instead of input tags: on | off");

  eval_cmd->add_option("--test", o.test_path, "Gold treebank")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--predicted", o.predicted_path, "Predicted treebank")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--output", o.output_path, "key=value report file");

  lss_cmd->add_option("--model", o.model_path, "Checkpoint")->required()->check(CLI::ExistingFile);
  lss_cmd->add_option("--test", o.test_path, "Input treebank")->required()->check(CLI::ExistingFile);
  lss_cmd->add_option("--output", o.output_path, "Export file")->required();
  lss_cmd->add_option("--lss-format", o.lss_format, "text | binary")->check(CLI::IsMember({"text", "binary"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  Resolved resolved;
  try {
    Settings settings;
    if (!o.config_path.empty()) settings = read_config_file(o.config_path);
    for (const auto& [k, v] : o.flags) settings[k] = v;
    check_keys(settings);
    resolved = resolve(settings);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(o, resolved);
    if (*parse_cmd) return cmd_parse(o, resolved);
    if (*eval_cmd) return cmd_eval(o, resolved);
    return cmd_export_lss(o, resolved);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
