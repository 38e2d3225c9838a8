// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line entry points: train, select, eval, estimate-mem, gen-corpus,
// ingest-qasper, baseline and tune-threshold. Exit code 2 on invalid input.

#include <cstdio>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "cgsn/evalkit/corpus.hpp"
#include "cgsn/evalkit/metrics.hpp"
#include "cgsn/evalkit/synthetic.hpp"
#include "cgsn/pipeline/checkpoint.hpp"
#include "cgsn/pipeline/memory_estimate.hpp"
#include "cgsn/pipeline/select.hpp"
#include "cgsn/pipeline/train.hpp"
#include "json.hpp"

namespace {

using namespace cgsn;

constexpr int kInvalidInput = 2;

struct TrainArgs {
  std::string data, config, out;
  std::optional<std::uint64_t> seed;
  std::size_t max_steps = 0;
  std::size_t log_every = 100;
};

int run_train(const TrainArgs& a) {
  ModelConfig cfg = read_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  DatasetStats stats;
  const auto raw = read_dataset(a.data, &stats);
  const Vocabulary vocab = build_dataset_vocab(raw);
  const auto data = tokenize_dataset(raw, vocab);
  CgsnModel model = CgsnModel::create(cfg, vocab.size());
  std::cerr << "train: " << data.size() << " instances, vocabulary " << vocab.size() << ", "
            << model.store.element_count() << " parameters\n";

  TrainOptions opt;
  opt.max_steps = a.max_steps;
  double running = 0;
  std::size_t window = 0;
  opt.on_step = [&](const StepInfo& s) {
    running += s.loss;
    ++window;
    if (a.log_every > 0 && s.step % a.log_every == 0) {
      std::fprintf(stderr, "step %zu epoch %zu loss %.5f lr %.3e grad_norm %.3f\n", s.step, s.epoch,
                   running / static_cast<double>(window), s.learning_rate, s.grad_norm);
      running = 0;
      window = 0;
    }
  };
  const TrainReport report = train(model, data, opt);
  save_checkpoint(a.out, model, vocab, {report.steps, report.epochs, cfg.seed});
  std::cerr << "train: " << report.steps << " steps, checkpoint written to " << a.out << "\n";
  return 0;
}

std::vector<Prediction> predict(const Checkpoint& ckpt, const std::vector<Instance>& raw, double threshold) {
  std::vector<Prediction> out;
  for (const auto& inst : raw) out.push_back(select_evidence(ckpt.model, tokenize_instance(inst, ckpt.vocab), threshold));
  return out;
}

int run_select(const std::string& ckpt_dir, const std::string& data, std::optional<double> threshold,
               const std::string& out) {
  const Checkpoint ckpt = load_checkpoint(ckpt_dir);
  const double tau = threshold.value_or(ckpt.model.config().threshold);
  if (!(tau > 0.0 && tau < 1.0)) throw ValidationError("select: threshold must lie in (0, 1)");
  write_predictions(out, predict(ckpt, read_dataset(data), tau));
  return 0;
}

int run_eval(const std::string& pred, const std::string& gold) {
  std::cout << eval::evaluate(read_predictions(pred), read_dataset(gold)).to_json() << "\n";
  return 0;
}

int run_tune(const std::string& ckpt_dir, const std::string& data) {
  const Checkpoint ckpt = load_checkpoint(ckpt_dir);
  const auto raw = read_dataset(data);
  const auto sweep = eval::tune_threshold(predict(ckpt, raw, ckpt.model.config().threshold), raw);
  nlohmann::ordered_json j;
  j["best"] = sweep.best;
  for (const auto& [tau, f1] : sweep.f1) j["evidence_f1"].push_back({tau, f1});
  std::cout << j.dump() << "\n";
  return 0;
}

int run_estimate(const std::string& mode, const MemoryModel& m) {
  const MemoryEstimate e = estimate_memory(parse_memory_mode(mode), m);
  nlohmann::ordered_json j;
  j["mode"] = mode;
  j["attention"] = e.attention;
  j["local"] = e.local;
  j["global"] = e.global;
  j["total"] = e.total;
  std::cout << j.dump() << "\n";
  return 0;
}

int run_baseline(const std::string& data, std::size_t k, const std::string& out) {
  std::vector<Prediction> preds;
  for (const auto& inst : read_dataset(data)) preds.push_back({inst.id, eval::lexical_baseline(inst, k), {}});
  write_predictions(out, preds);
  return 0;
}

int run_ingest(const std::string& input, const std::string& out) {
  eval::QasperStats stats;
  const auto ds = eval::ingest_qasper(input, &stats);
  write_dataset(out, ds);
  std::cerr << "ingest-qasper: " << stats.papers << " papers, " << stats.questions << " questions, "
            << stats.matched_evidence << " evidence matched, " << stats.unmatched_evidence << " dropped\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidence selection over long documents with compressive graph memory"};
  app.require_subcommand(1);
  int status = 0;

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train a selector and write a checkpoint");
  train_cmd->add_option("--data", ta.data, "Training dataset (JSON lines)")->required();
  train_cmd->add_option("--config", ta.config, "Config file (key = value lines)")->required();
  train_cmd->add_option("--out", ta.out, "Checkpoint directory")->required();
  train_cmd->add_option("--seed", ta.seed, "Overrides the config seed");
  train_cmd->add_option("--max-steps", ta.max_steps, "Stop after this many optimizer steps");
  train_cmd->add_option("--log-every", ta.log_every, "Progress line interval in steps (0 = silent)");
  train_cmd->callback([&] { status = run_train(ta); });

  std::string ckpt, data, out, pred, gold;
  std::optional<double> threshold;
  auto* select_cmd = app.add_subcommand("select", "Select evidence paragraphs with a checkpoint");
  select_cmd->add_option("--ckpt", ckpt, "Checkpoint directory")->required();
  select_cmd->add_option("--data", data, "Dataset (JSON lines)")->required();
  select_cmd->add_option("--threshold", threshold, "Selection threshold; defaults to the checkpoint config");
  select_cmd->add_option("--out", out, "Prediction file")->required();
  select_cmd->callback([&] { status = run_select(ckpt, data, threshold, out); });

  auto* eval_cmd = app.add_subcommand("eval", "Score predictions; metrics JSON on standard output");
  eval_cmd->add_option("--pred", pred, "Prediction file")->required();
  eval_cmd->add_option("--gold", gold, "Gold dataset")->required();
  eval_cmd->callback([&] { status = run_eval(pred, gold); });

  auto* tune_cmd = app.add_subcommand("tune-threshold", "Sweep the selection threshold on a dev split");
  tune_cmd->add_option("--ckpt", ckpt, "Checkpoint directory")->required();
  tune_cmd->add_option("--data", data, "Dev dataset")->required();
  tune_cmd->callback([&] { status = run_tune(ckpt, data); });

  std::string mode;
  MemoryModel mm;
  auto* mem_cmd = app.add_subcommand("estimate-mem", "Memory estimate for one configuration");
  mem_cmd->add_option("--mode", mode, "cgsn or led-style")->required();
  mem_cmd->add_option("--L", mm.length, "Document length in tokens")->required();
  mem_cmd->add_option("--W", mm.window, "Local attention window")->required();
  mem_cmd->add_option("--B", mm.paragraphs, "Paragraphs per segment")->required();
  mem_cmd->add_option("--G", mm.global_tokens, "Global tokens (led-style)");
  mem_cmd->add_option("--global-cost", mm.global_cost, "Fixed cost of the global banks (cgsn)");
  mem_cmd->callback([&] { status = run_estimate(mode, mm); });

  eval::SyntheticSpec spec;
  bool same_segment = false;
  auto* gen_cmd = app.add_subcommand("gen-corpus", "Write a synthetic corpus");
  gen_cmd->add_option("--out", out, "Dataset file")->required();
  gen_cmd->add_option("--documents", spec.documents, "Number of documents");
  gen_cmd->add_option("--paragraphs", spec.paragraphs, "Paragraphs per document");
  gen_cmd->add_option("--segment-paragraphs", spec.segment_paragraphs, "Segment length used for placement");
  gen_cmd->add_flag("--same-segment", same_segment, "Put both evidence paragraphs in one segment");
  gen_cmd->add_option("--duplicate-rate", spec.duplicate_rate, "Share of documents with a duplicated anchor");
  gen_cmd->add_option("--vocabulary", spec.vocabulary, "Distinct content words");
  gen_cmd->add_option("--key-words", spec.key_words, "Size of the key pool (0 = a quarter of the vocabulary)");
  gen_cmd->add_option("--seed", spec.seed, "Random seed");
  gen_cmd->add_option("--id-prefix", spec.id_prefix, "Instance id prefix");
  gen_cmd->callback([&] {
    spec.cross_segment = !same_segment;
    write_dataset(out, eval::generate_corpus(spec));
  });

  std::string input;
  auto* ingest_cmd = app.add_subcommand("ingest-qasper", "Convert a Qasper JSON file into the dataset format");
  ingest_cmd->add_option("--input", input, "Qasper JSON file")->required();
  ingest_cmd->add_option("--out", out, "Dataset file")->required();
  ingest_cmd->callback([&] { status = run_ingest(input, out); });

  std::size_t k = 2;
  auto* base_cmd = app.add_subcommand("baseline", "Lexical-overlap top-k predictions");
  base_cmd->add_option("--data", data, "Dataset")->required();
  base_cmd->add_option("--k", k, "Paragraphs per instance");
  base_cmd->add_option("--out", out, "Prediction file")->required();
  base_cmd->callback([&] { status = run_baseline(data, k, out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return status;
}
