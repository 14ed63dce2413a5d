#include "lhr/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "lhr/decoder/decoder.hpp"
#include "lhr/error.hpp"

namespace lhr::train {
namespace {

bool same_eval(const std::optional<eval::EvalResult>& a, const std::optional<eval::EvalResult>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->uas == b->uas && a->las == b->las && a->pos_accuracy == b->pos_accuracy &&
         a->root_accuracy == b->root_accuracy && a->cycle_free_rate == b->cycle_free_rate;
}

void log_line(const TrainConfig& cfg, const std::string& msg) {
  if (cfg.log != nullptr) *cfg.log << msg << '\n';
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

HeadLoss parse_head_loss(std::string_view name) {
  if (name == "mse") return HeadLoss::mse;
  if (name == "mae") return HeadLoss::mae;
  throw InvalidInput("unknown head loss: " + std::string(name));
}

std::string_view head_loss_name(HeadLoss v) { return v == HeadLoss::mse ? "mse" : "mae"; }

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(adam.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(labeler_weight >= 0.0)) throw ConfigError("labeler weight must be non-negative");
  if (dev_eval_every < 1) throw ConfigError("dev_eval_every must be at least 1");
}

bool EpochRecord::operator==(const EpochRecord& o) const {
  return epoch == o.epoch && head_loss == o.head_loss && label_loss == o.label_loss &&
         aborted == o.aborted && same_eval(dev, o.dev);
}

SentenceLoss build_sentence_loss(nn::Graph& g, const model::LhrModel& model, const treebank::Sentence& sentence,
                                 const TrainConfig& cfg, nn::Rng* dropout_rng) {
  if (cfg.labeler_loss != model.config().labeler_output) {
    throw ConfigError("labeler loss does not match the model's labeler output");
  }
  SentenceLoss out;
  const bool dropout = cfg.word_dropout && dropout_rng != nullptr;
  out.encoded = model.encode(g, sentence, dropout, dropout ? dropout_rng : nullptr);
  const auto& enc = out.encoded;
  const std::size_t n = sentence.size();
  const nn::Expr root = model.root(g);

  std::vector<nn::Expr> head_terms;
  out.targets.assign(n, nn::Expr{});
  for (std::size_t i = 0; i < n; ++i) {
    const auto& tok = sentence.tokens[i];
    if (tok.gold_head == treebank::kUnknownHead) continue;
    if (cfg.skip_punctuation_heads && tok.is_punct) continue;
    nn::Expr target;
    if (tok.gold_head > 0) {
      target = enc.context[tok.gold_head - 1];
    } else {
      target = model.config().root_target == model::RootTarget::root_vector ? root : enc.context[i];
    }
    if (!cfg.target_gradient) target = g.detach(target);
    out.targets[i] = target;
    head_terms.push_back(cfg.loss == HeadLoss::mse ? g.mse(enc.latent_heads[i], target)
                                                   : g.mae(enc.latent_heads[i], target));
  }
  out.head_terms = head_terms.size();
  if (!head_terms.empty()) out.head = g.scale(g.sum(head_terms), 1.0 / static_cast<double>(head_terms.size()));

  if (cfg.labeler_weight > 0.0) {
    const auto& vocab = model.vocab();
    std::vector<nn::Expr> label_terms;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& tok = sentence.tokens[i];
      if (tok.gold_head == treebank::kUnknownHead) continue;
      const nn::Expr governor = tok.gold_head == 0 ? root : enc.context[tok.gold_head - 1];
      const auto scores = model.score_label_pos(g, enc.context[i], governor);
      const std::size_t label = vocab.labels.lookup(tok.gold_label);
      const std::size_t pos = vocab.pos.lookup(tok.gold_pos);
      if (model.config().labeler_output == model::LabelerOutput::margin) {
        label_terms.push_back(g.margin(scores.label_scores, label));
        label_terms.push_back(g.margin(scores.pos_scores, pos));
      } else {
        label_terms.push_back(g.softmax_cross_entropy(scores.label_logits, label));
        label_terms.push_back(g.softmax_cross_entropy(scores.pos_logits, pos));
      }
    }
    out.label_terms = label_terms.size() / 2;
    if (!label_terms.empty()) {
      out.label = g.scale(g.sum(label_terms), 1.0 / static_cast<double>(out.label_terms));
    }
  }

  if (out.head.valid() && out.label.valid()) {
    out.total = g.sum(std::vector<nn::Expr>{out.head, g.scale(out.label, cfg.labeler_weight)});
  } else if (out.head.valid()) {
    out.total = out.head;
  } else if (out.label.valid()) {
    out.total = g.scale(out.label, cfg.labeler_weight);
  }
  return out;
}

StepLosses train_sentence(model::LhrModel& model, const treebank::Sentence& sentence, const TrainConfig& cfg,
                          nn::Rng& rng) {
  StepLosses result;
  if (!sentence.fully_annotated() && !cfg.allow_partial_trees) {
    log_line(cfg, "warning: skipping sentence without complete gold heads");
    result.skipped = true;
    return result;
  }
  nn::Graph g;
  const SentenceLoss loss = build_sentence_loss(g, model, sentence, cfg, &rng);
  if (loss.head.valid()) result.head_loss = g.scalar(loss.head);
  if (loss.label.valid()) result.label_loss = g.scalar(loss.label);
  if (!loss.total.valid()) {
    result.skipped = true;
    return result;
  }
  g.backward(loss.total);
  nn::adam_step(model.parameters(), cfg.adam);
  return result;
}

void TrainReport::write(std::ostream& out) const {
  out << "epoch\thead_loss\tlabel_loss\tdev_uas\tdev_las\tdev_pos\tdev_root\tdev_cycle_free\taborted\n";
  char buf[32];
  auto g17 = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& e : epochs) {
    out << e.epoch << '\t' << g17(e.head_loss) << '\t' << g17(e.label_loss);
    if (e.dev) {
      out << '\t' << g17(e.dev->uas) << '\t' << g17(e.dev->las) << '\t' << g17(e.dev->pos_accuracy) << '\t'
          << g17(e.dev->root_accuracy) << '\t' << g17(e.dev->cycle_free_rate.value_or(0.0));
    } else {
      out << "\t-\t-\t-\t-\t-";
    }
    out << '\t' << (e.aborted ? 1 : 0) << '\n';
  }
}

TrainReport train(model::LhrModel& model, const treebank::Treebank& train_tb, const treebank::Treebank& dev_tb,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (train_tb.sentences.empty()) throw InvalidInput("training treebank is empty");
  if (cfg.labeler_loss != model.config().labeler_output) {
    throw ConfigError("labeler loss does not match the model's labeler output");
  }
  nn::Rng order_rng(cfg.shuffle_seed);
  nn::Rng dropout_rng(cfg.shuffle_seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<std::size_t> order(train_tb.sentences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainReport report;
  std::vector<nn::Tensor> best;
  const decoder::DecodeOptions decode{cfg.pos_correction};
  model.parameters().zero_gradients();

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    EpochRecord rec;
    rec.epoch = epoch;
    std::size_t trained = 0;
    for (std::size_t idx : order) {
      try {
        const StepLosses s = train_sentence(model, train_tb.sentences[idx], cfg, dropout_rng);
        if (s.skipped) continue;
        rec.head_loss += s.head_loss;
        rec.label_loss += s.label_loss;
        ++trained;
      } catch (const NumericError& e) {
        log_line(cfg, "epoch " + std::to_string(epoch) + " aborted: " + e.what());
        model.parameters().zero_gradients();
        rec.aborted = true;
        break;
      }
    }
    if (trained > 0) {
      rec.head_loss /= static_cast<double>(trained);
      rec.label_loss /= static_cast<double>(trained);
    }
    const bool eval_now = !dev_tb.sentences.empty() && (epoch % cfg.dev_eval_every == 0 || epoch == cfg.epochs);
    if (eval_now) {
      const auto trees = decoder::parse_all(model, dev_tb, decode);
      rec.dev = eval::evaluate(dev_tb, trees);
      if (report.best_epoch == 0 || rec.dev->uas > report.best_dev_uas) {
        report.best_epoch = epoch;
        report.best_dev_uas = rec.dev->uas;
        best = model.snapshot();
      }
    }
    std::string line = "epoch " + std::to_string(epoch) + "  head_loss " + fmt(rec.head_loss) + "  label_loss " +
                       fmt(rec.label_loss);
    if (rec.dev) line += "  dev UAS " + fmt(100.0 * rec.dev->uas) + "  LAS " + fmt(100.0 * rec.dev->las);
    log_line(cfg, line);
    report.epochs.push_back(std::move(rec));
  }
  if (!best.empty()) model.restore(best);
  return report;
}

}  // namespace lhr::train
