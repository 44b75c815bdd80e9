// Copyright 2026 The PhyFea Engine Authors
// SPDX-License-Identifier: Apache-2.0

#include "phyfea/loss.hpp"

#include <chrono>
#include <cmath>
#include <map>

#include "phyfea/dilation.hpp"
#include "phyfea/ops.hpp"
#include "phyfea/opening.hpp"
#include "phyfea/parallel.hpp"

namespace phyfea {

double penalty_value(double alpha, double l_opening, double l_dilation) {
  return alpha * std::abs(l_opening - l_dilation);
}

double combine_total(double penalty, double cross_entropy) {
  if (!(cross_entropy >= 0.0)) {
    throw ContractError("cross entropy must be >= 0, got " + std::to_string(cross_entropy));
  }
  return cross_entropy + penalty;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

template <class T>
void check_scores(const Tensor<T>& scores) {
  require_rank(scores.dims(), 3, "scores");
  if (scores.dim(0) < 2) {
    throw ConfigError("scores need at least 2 classes, got " + std::to_string(scores.dim(0)));
  }
  if (!scores.all_finite()) throw ContractError("scores contain NaN or Inf");
}

struct PairJob {
  ClassPair pair;           // representative orientation
  std::size_t multiplicity;  // 1 or 2 selected orientations
};

// Unordered groups in order of first appearance.
std::vector<PairJob> group_pairs(const std::vector<ClassPair>& pairs) {
  std::vector<PairJob> jobs;
  std::map<std::pair<std::int32_t, std::int32_t>, std::size_t> where;
  for (const auto& p : pairs) {
    const auto key = std::minmax(p.inner, p.outer);
    auto [it, fresh] = where.emplace(key, jobs.size());
    if (fresh) {
      jobs.push_back({p, 1});
    } else {
      ++jobs[it->second].multiplicity;
    }
  }
  return jobs;
}

template <class T>
struct JobOutput {
  double opening = 0.0;
  double dilation = 0.0;
  Tensor<T> opening_grad;   // empty when zero
  Tensor<T> dilation_grad;  // empty when zero
  double opening_ms = 0.0;
  double dilation_ms = 0.0;
};

}  // namespace

template <class T>
PenaltyReport<T> compute_penalty(const Tensor<T>& scores, const EngineConfig& cfg,
                                 const ConstraintCatalog* catalog, const IgnoreMask& ignore) {
  cfg.validate();
  check_scores(scores);
  const auto started = Clock::now();
  const std::size_t classes = scores.dim(0), rows = scores.dim(1), cols = scores.dim(2);

  PenaltyReport<T> report;
  report.alpha = cfg.alpha;
  report.iterations = iteration_budget(rows, cols, cfg.iterations);
  const auto epsilon = static_cast<T>(cfg.epsilon);
  const auto bg_tol = static_cast<T>(cfg.bg_tol);

  auto stamp = Clock::now();
  Tape<T> top;
  const Var<T> leaf = cfg.with_grad ? top.leaf(scores) : constant(scores);
  const Var<T> probs = normalize_scores(leaf);
  const auto argmax = argmax_classes(probs.value(), ignore);
  const Var<T> peak = select_channels(probs, argmax);
  report.timing.normalize_ms = ms_since(stamp);

  const auto pairs = select_pairs(classes, catalog, cfg.pair_mode);
  const auto jobs = group_pairs(pairs);
  report.channels = pairs.size();

  stamp = Clock::now();
  std::vector<JobOutput<T>> outputs(jobs.size());
  parallel_for(jobs.size(), resolve_workers(cfg.workers), [&](std::size_t k) {
    Tape<T> tape;
    const Var<T> b_peak = cfg.with_grad ? tape.leaf(peak.shared_value()) : constant(peak.value());
    const Var<T> channel = pair_channel(b_peak, argmax, jobs[k].pair);
    auto& out = outputs[k];
    if (cfg.use_opening) {
      const auto t0 = Clock::now();
      const Var<T> mass = l1(open_channel(channel, report.iterations, epsilon, cfg.early_exit).map);
      out.opening = static_cast<double>(mass.value().item());
      if (cfg.with_grad && out.opening != 0.0) out.opening_grad = tape.backward(mass).wrt(b_peak);
      out.opening_ms = ms_since(t0);
    }
    if (cfg.use_dilation) {
      const auto t0 = Clock::now();
      const Var<T> mass =
          l1(dilate_channel(channel, report.iterations, epsilon, bg_tol, cfg.early_exit).map);
      out.dilation = static_cast<double>(mass.value().item());
      if (cfg.with_grad && out.dilation != 0.0) {
        out.dilation_grad = tape.backward(mass).wrt(b_peak);
      }
      out.dilation_ms = ms_since(t0);
    }
  });
  report.timing.channels_ms = ms_since(stamp);

  std::map<std::pair<std::int32_t, std::int32_t>, std::size_t> job_of;
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const auto& out = outputs[k];
    const double m = static_cast<double>(jobs[k].multiplicity);
    report.l_opening += m * out.opening;
    report.l_dilation += m * out.dilation;
    report.timing.opening_cpu_ms += out.opening_ms;
    report.timing.dilation_cpu_ms += out.dilation_ms;
    job_of.emplace(std::minmax(jobs[k].pair.inner, jobs[k].pair.outer), k);
  }
  for (const auto& p : pairs) {
    const auto& out = outputs[job_of.at(std::minmax(p.inner, p.outer))];
    if (cfg.use_opening) report.opening_mass.emplace_back(p, out.opening);
    if (cfg.use_dilation) report.dilation_mass.emplace_back(p, out.dilation);
  }
  report.penalty = penalty_value(cfg.alpha, report.l_opening, report.l_dilation);

  if (cfg.with_grad) {
    stamp = Clock::now();
    const double diff = report.l_opening - report.l_dilation;
    if (diff == 0.0) {
      report.grad = Tensor<T>(scores.dims());
    } else {
      // d penalty / d peak = alpha * sign(diff) * sum_k mult_k (dO_k - dD_k)
      const double factor = cfg.alpha * (diff > 0.0 ? 1.0 : -1.0);
      std::vector<double> acc(rows * cols, 0.0);
      for (std::size_t k = 0; k < jobs.size(); ++k) {
        const double m = factor * static_cast<double>(jobs[k].multiplicity);
        if (!outputs[k].opening_grad.empty()) {
          for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += m * outputs[k].opening_grad[i];
        }
        if (!outputs[k].dilation_grad.empty()) {
          for (std::size_t i = 0; i < acc.size(); ++i) acc[i] -= m * outputs[k].dilation_grad[i];
        }
      }
      Tensor<T> seed(peak.dims());
      for (std::size_t i = 0; i < acc.size(); ++i) seed[i] = static_cast<T>(acc[i]);
      report.grad = top.backward(peak, seed).wrt(leaf);
    }
    report.timing.backward_ms = ms_since(stamp);
  }
  report.timing.total_ms = ms_since(started);
  return report;
}

template <class T>
Var<T> penalty_graph(const Var<T>& scores, const EngineConfig& cfg,
                     const ConstraintCatalog* catalog, const IgnoreMask& ignore) {
  cfg.validate();
  check_scores(scores.value());
  const std::size_t classes = scores.dims()[0];
  const std::size_t iters = iteration_budget(scores.dims()[1], scores.dims()[2], cfg.iterations);
  const auto epsilon = static_cast<T>(cfg.epsilon);
  const auto bg_tol = static_cast<T>(cfg.bg_tol);

  const Var<T> probs = normalize_scores(scores);
  const auto argmax = argmax_classes(probs.value(), ignore);
  const Var<T> peak = select_channels(probs, argmax);

  Var<T> opening = constant(Tensor<T>::scalar(T(0)));
  Var<T> dilation = constant(Tensor<T>::scalar(T(0)));
  for (const auto& pair : select_pairs(classes, catalog, cfg.pair_mode)) {
    const Var<T> channel = pair_channel(peak, argmax, pair);
    if (cfg.use_opening) {
      opening = add(opening, l1(open_channel(channel, iters, epsilon, cfg.early_exit).map));
    }
    if (cfg.use_dilation) {
      dilation =
          add(dilation, l1(dilate_channel(channel, iters, epsilon, bg_tol, cfg.early_exit).map));
    }
  }
  return scale(abs(sub(opening, dilation)), static_cast<T>(cfg.alpha));
}

template PenaltyReport<float> compute_penalty(const Tensor<float>&, const EngineConfig&,
                                              const ConstraintCatalog*, const IgnoreMask&);
template PenaltyReport<double> compute_penalty(const Tensor<double>&, const EngineConfig&,
                                               const ConstraintCatalog*, const IgnoreMask&);
template Var<float> penalty_graph(const Var<float>&, const EngineConfig&,
                                  const ConstraintCatalog*, const IgnoreMask&);
template Var<double> penalty_graph(const Var<double>&, const EngineConfig&,
                                   const ConstraintCatalog*, const IgnoreMask&);

}  // namespace phyfea
