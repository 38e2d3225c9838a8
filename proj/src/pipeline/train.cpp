// Copyright 2026 The CGSN Authors
// SPDX-License-Identifier: Apache-2.0

#include "cgsn/pipeline/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace cgsn {

double scheduled_learning_rate(double peak, double warmup_proportion, std::size_t step, std::size_t total) {
  if (total == 0) return peak;
  const auto warmup = static_cast<std::size_t>(std::ceil(warmup_proportion * static_cast<double>(total)));
  if (step <= warmup) return peak * static_cast<double>(step) / static_cast<double>(warmup);
  const double remaining = static_cast<double>(total - std::min(step, total));
  return peak * (remaining + 1.0) / static_cast<double>(total - warmup);
}

std::vector<std::vector<std::size_t>> epoch_orders(std::size_t instances, std::size_t epochs, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t e = 0; e < epochs; ++e) {
    std::vector<std::size_t> order(instances);
    std::iota(order.begin(), order.end(), 0);
    std::seed_seq seq{seed, static_cast<std::uint64_t>(e)};
    std::mt19937_64 rng(seq);
    std::shuffle(order.begin(), order.end(), rng);
    out.push_back(std::move(order));
  }
  return out;
}

namespace {

std::size_t segment_count(const TokenizedInstance& inst, std::size_t per_segment) {
  return (inst.paragraphs.size() + per_segment - 1) / per_segment;
}

}  // namespace

TrainReport train(CgsnModel& model, const std::vector<TokenizedInstance>& data, const TrainOptions& options) {
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  const ModelConfig& cfg = model.config();
  const std::size_t per_seg = cfg.segment_paragraphs;
  for (const auto& inst : data) {
    if (inst.paragraphs.empty()) throw std::invalid_argument("train: instance " + inst.id + " has no paragraphs");
  }

  const auto orders = epoch_orders(data.size(), cfg.epochs, cfg.seed);
  std::size_t planned = 0;
  for (const auto& order : orders) {
    for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
      std::size_t longest = 0;
      for (std::size_t k = b; k < std::min(order.size(), b + cfg.batch_size); ++k)
        longest = std::max(longest, segment_count(data[order[k]], per_seg));
      planned += longest;
    }
  }
  if (options.max_steps > 0) planned = std::min(planned, options.max_steps);

  TrainReport report;
  report.planned_steps = planned;
  num::AdamState& adam = report.optimizer;
  adam.beta1 = cfg.beta1;
  adam.beta2 = cfg.beta2;
  adam.epsilon = cfg.epsilon;
  adam.weight_decay = cfg.weight_decay;
  const std::vector<num::Parameter*> params = model.store.all();

  for (std::size_t epoch = 0; epoch < orders.size(); ++epoch) {
    const auto& order = orders[epoch];
    for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
      std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(b),
                                     order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), b + cfg.batch_size)));
      std::vector<DocumentState> states(batch.size());
      std::vector<std::vector<std::pair<std::size_t, std::size_t>>> segments;
      std::size_t longest = 0;
      for (auto i : batch) {
        segments.push_back(segment_document(data[i].paragraphs.size(), per_seg));
        longest = std::max(longest, segments.back().size());
      }

      for (std::size_t s = 0; s < longest; ++s) {
        if (options.max_steps > 0 && report.steps >= options.max_steps) {
          report.epochs = epoch + 1;
          return report;
        }
        num::Tape tape;
        std::vector<num::Value> losses;
        for (std::size_t k = 0; k < batch.size(); ++k) {
          if (s >= segments[k].size()) continue;
          const TokenizedInstance& inst = data[batch[k]];
          const auto [begin, end] = segments[k][s];
          const std::span<const TokenizedParagraph> paras(inst.paragraphs.data() + begin, end - begin);
          const std::span<const int> labels(inst.labels.data() + begin, end - begin);
          losses.push_back(forward_segment(tape, model, inst.question, paras, labels, states[k]).loss);
        }
        num::Value total = losses.front();
        for (std::size_t k = 1; k < losses.size(); ++k) total = num::add(total, losses[k]);
        const num::Value loss = num::scale(total, 1.0 / static_cast<double>(losses.size()));

        StepInfo info;
        info.step = report.steps + 1;
        info.epoch = epoch;
        info.segment = s;
        info.live = losses.size();
        info.loss = loss.item();
        info.learning_rate = scheduled_learning_rate(cfg.learning_rate, cfg.warmup_proportion, info.step, planned);

        model.store.zero_grad();
        model.store.accumulate(tape, tape.backward(loss));
        info.grad_norm = model.store.grad_norm();
        if (!std::isfinite(info.loss) || !std::isfinite(info.grad_norm)) {
          std::ostringstream msg;
          msg << "training diverged at step " << info.step << " (epoch " << epoch << ", segment " << s
              << "): loss=" << info.loss << " grad_norm=" << info.grad_norm << " lr=" << info.learning_rate
              << " documents=";
          for (std::size_t k = 0; k < batch.size(); ++k) msg << (k ? "," : "") << data[batch[k]].id;
          throw TrainingDiverged(msg.str());
        }
        if (cfg.max_grad_norm > 0 && info.grad_norm > cfg.max_grad_norm) {
          model.store.scale_grads(cfg.max_grad_norm / info.grad_norm);
        }
        adam.learning_rate = info.learning_rate;
        num::adam_step(params, adam);

        ++report.steps;
        report.losses.push_back(info.loss);
        if (options.on_step) options.on_step(info);
      }
    }
    report.epochs = epoch + 1;
  }
  return report;
}

}  // namespace cgsn
