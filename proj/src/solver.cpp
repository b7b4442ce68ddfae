#include "sarahbb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <limits>
#include <ostream>
#include <unordered_set>

namespace sarahbb {

const char* method_name(Method m) {
  switch (m) {
    case Method::mb_sarah_rbb: return "mb_sarah_rbb";
    case Method::mb_sarah_fixed: return "mb_sarah_fixed";
    case Method::ms2gd_rbb: return "ms2gd_rbb";
    case Method::ms2gd_fixed: return "ms2gd_fixed";
    case Method::svrg: return "svrg";
    case Method::svrg_bb: return "svrg_bb";
    case Method::sgd: return "sgd";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  std::string s = name;
  for (char& c : s) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (c == '-') c = '_';
  }
  if (s == "mb_sarah_rbb") return Method::mb_sarah_rbb;
  if (s == "mb_sarah_fixed" || s == "mb_sarah") return Method::mb_sarah_fixed;
  if (s == "ms2gd_rbb") return Method::ms2gd_rbb;
  if (s == "ms2gd_fixed" || s == "ms2gd") return Method::ms2gd_fixed;
  if (s == "svrg") return Method::svrg;
  if (s == "svrg_bb") return Method::svrg_bb;
  if (s == "sgd") return Method::sgd;
  throw std::invalid_argument("unknown method: " + name);
}

std::vector<std::uint32_t> sample_without_replacement(std::size_t n,
                                                      std::size_t k,
                                                      Rng& rng) {
  if (k < 1 || k > n)
    throw std::invalid_argument("sample_without_replacement: need 1 <= k <= n");
  std::vector<std::uint32_t> out;
  out.reserve(k);
  if (k <= 64) {
    // Floyd's algorithm, linear membership scan for small k.
    for (std::size_t j = n - k; j < n; ++j) {
      auto t = static_cast<std::uint32_t>(rng.below(j + 1));
      bool seen = std::find(out.begin(), out.end(), t) != out.end();
      out.push_back(seen ? static_cast<std::uint32_t>(j) : t);
    }
  } else {
    std::unordered_set<std::uint32_t> chosen;
    chosen.reserve(k * 2);
    for (std::size_t j = n - k; j < n; ++j) {
      auto t = static_cast<std::uint32_t>(rng.below(j + 1));
      if (!chosen.insert(t).second) {
        chosen.insert(static_cast<std::uint32_t>(j));
        out.push_back(static_cast<std::uint32_t>(j));
      } else {
        out.push_back(t);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

DenseVector sarah_estimator_update(const DenseVector& v_prev,
                                   const Objective& obj,
                                   std::span<const std::uint32_t> S,
                                   const DenseVector& w_k,
                                   const DenseVector& w_prev,
                                   EvalCounter* counter) {
  if (S.empty())
    throw std::invalid_argument("sarah_estimator_update: empty index set");
  DenseVector g_k = obj.minibatch_gradient(S, w_k, counter);
  DenseVector g_prev = obj.minibatch_gradient(S, w_prev, counter);
  if (S.size() == obj.n()) return g_k;  // exact telescoping collapse
  for (std::size_t j = 0; j < g_k.size(); ++j)
    g_k[j] = (g_k[j] - g_prev[j]) + v_prev[j];
  return g_k;
}

DenseVector svrg_estimator(const Objective& obj,
                           std::span<const std::uint32_t> S,
                           const DenseVector& w_k, const DenseVector& snapshot,
                           const DenseVector& fullgrad_snapshot,
                           EvalCounter* counter) {
  if (S.empty()) throw std::invalid_argument("svrg_estimator: empty index set");
  DenseVector g_k = obj.minibatch_gradient(S, w_k, counter);
  DenseVector g_snap = obj.minibatch_gradient(S, snapshot, counter);
  if (S.size() == obj.n()) return g_k;  // exact cancellation
  for (std::size_t j = 0; j < g_k.size(); ++j)
    g_k[j] = (g_k[j] - g_snap[j]) + fullgrad_snapshot[j];
  return g_k;
}

void validate_config(const Objective& obj, const SolverConfig& cfg) {
  const std::size_t n = obj.n();
  if (cfg.b < 1 || cfg.b > n)
    throw std::invalid_argument("config: need 1 <= b <= n");
  if (cfg.m < 1) throw std::invalid_argument("config: need m >= 1");
  if (cfg.outer_count < 1)
    throw std::invalid_argument("config: need outer_count >= 1");
  if (!cfg.w0.empty() && cfg.w0.size() != obj.dim())
    throw std::invalid_argument("config: w0 dimension mismatch");

  const bool rbb_method =
      cfg.method == Method::mb_sarah_rbb || cfg.method == Method::ms2gd_rbb;
  const bool has_rbb_rule = std::holds_alternative<RbbStep>(cfg.step);
  const bool has_fixed_rule = std::holds_alternative<FixedStep>(cfg.step);
  const bool has_epoch_rule = std::holds_alternative<EpochBbStep>(cfg.step);

  if (rbb_method) {
    // A fixed rule reduces the RBB method to its fixed-step original.
    if (!has_rbb_rule && !has_fixed_rule)
      throw std::invalid_argument("config: RBB method needs rbb or fixed rule");
    if (has_rbb_rule) {
      if (cfg.b_H < 1 || cfg.b_H > n)
        throw std::invalid_argument("config: need 1 <= b_H <= n for RBB");
    } else if (cfg.b_H != 0) {
      throw std::invalid_argument("config: b_H must be absent for fixed rule");
    }
  } else if (cfg.method == Method::svrg_bb) {
    if (!has_epoch_rule)
      throw std::invalid_argument("config: svrg_bb needs the epoch BB rule");
    if (cfg.b_H != 0)
      throw std::invalid_argument("config: b_H must be absent for svrg_bb");
  } else {
    if (!has_fixed_rule)
      throw std::invalid_argument("config: method needs a fixed step rule");
    if (cfg.b_H != 0)
      throw std::invalid_argument(
          "config: b_H must be absent for fixed-step methods");
  }
  if (has_rbb_rule) {
    const auto& r = std::get<RbbStep>(cfg.step);
    if (r.gamma <= 0.0 || r.eta_0 <= 0.0)
      throw std::invalid_argument("config: rbb gamma and eta_0 must be > 0");
  }
  if (has_fixed_rule && std::get<FixedStep>(cfg.step).eta <= 0.0)
    throw std::invalid_argument("config: fixed eta must be > 0");
  if (has_epoch_rule && std::get<EpochBbStep>(cfg.step).eta_0 <= 0.0)
    throw std::invalid_argument("config: epoch BB eta_0 must be > 0");
}

namespace {

struct StepStats {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::size_t count = 0;
  void add(double eta) {
    min = std::min(min, eta);
    max = std::max(max, eta);
    sum += eta;
    ++count;
  }
};

class Run {
 public:
  Run(const Objective& obj, const SolverConfig& cfg) : obj_(obj), cfg_(cfg) {}

  RunTrace go() {
    switch (cfg_.method) {
      case Method::mb_sarah_rbb:
      case Method::mb_sarah_fixed:
        return variance_reduced(/*sarah=*/true);
      case Method::ms2gd_rbb:
      case Method::ms2gd_fixed:
        return variance_reduced(/*sarah=*/false);
      case Method::svrg:
      case Method::svrg_bb:
        return svrg();
      case Method::sgd:
        return sgd();
    }
    throw std::logic_error("unreachable");
  }

 private:
  DenseVector initial_w() const {
    return cfg_.w0.empty() ? DenseVector(obj_.dim(), 0.0) : cfg_.w0;
  }

  void dense_record(std::size_t s, std::size_t k, double eta, bool fallback,
                    const DenseVector& v, const DenseVector& w) {
    if (!cfg_.dense_trace) return;
    DenseTraceRecord r;
    r.outer_index = s;
    r.inner_index = k;
    r.eta = eta;
    r.fallback = fallback;
    r.v_norm_sq = norm_sq(v);
    if (cfg_.dense_trace_gap) {
      DenseVector g = obj_.full_gradient(w);  // diagnostic, uncounted
      double gap = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        double dv = g[j] - v[j];
        gap += dv * dv;
      }
      r.estimator_gap_sq = gap;
    }
    trace_.dense.push_back(r);
  }

  // Appends the per-outer record; throws on a non-finite objective.
  void record(std::size_t s, const DenseVector& w, const StepStats& stats,
              std::size_t fallbacks) {
    TraceRecord r;
    r.outer_index = s;
    r.effective_passes = static_cast<double>(comp_.component_grad_evals) /
                         static_cast<double>(obj_.n());
    r.effective_passes_incl_stepsize =
        static_cast<double>(comp_.component_grad_evals +
                            step_evals_.component_grad_evals) /
        static_cast<double>(obj_.n());
    r.objective_value = obj_.value(w);
    r.grad_norm_sq = norm_sq(obj_.full_gradient(w));  // diagnostic, uncounted
    r.step_min = stats.count ? stats.min : 0.0;
    r.step_mean = stats.count ? stats.sum / static_cast<double>(stats.count)
                              : 0.0;
    r.step_max = stats.count ? stats.max : 0.0;
    r.fallback_count = fallbacks;
    trace_.records.push_back(r);
    if (!std::isfinite(r.objective_value) || !std::isfinite(r.grad_norm_sq)) {
      finish(w);
      throw DivergenceError(s, std::move(trace_));
    }
  }

  void finish(const DenseVector& w) {
    trace_.final_w = w;
    trace_.total_component_grad_evals = comp_.component_grad_evals;
    trace_.total_stepsize_grad_evals = step_evals_.component_grad_evals;
  }

  // MB-SARAH / mS2GD outer-inner loop. Per outer loop s:
  //   w_0 = snapshot, v_0 = grad P(w_0), w_1 = w_0 - eta_0 v_0,
  //   then for k = 1..m-1: draw S (size b), update the estimator,
  //   [RBB: draw S_H (size b_H), compute the step], w_{k+1} = w_k - eta v_k,
  //   snapshot = w_m.
  // RNG consumption order per inner iteration: S first, then S_H.
  RunTrace variance_reduced(bool sarah) {
    const std::size_t n = obj_.n();
    Rng rng(cfg_.seed);
    DenseVector w = initial_w();

    const FixedStep* fixed = std::get_if<FixedStep>(&cfg_.step);
    RbbStep rule;
    const bool rbb = !fixed;
    if (rbb) {
      rule = std::get<RbbStep>(cfg_.step);
      if (cfg_.method == Method::ms2gd_rbb) rule.gamma = 1.0;  // unscaled ratio
    }
    double last_accepted = rbb ? rule.eta_0 : fixed->eta;

    DenseVector w_prev(obj_.dim());
    DenseVector v, g_k, g_prev, snapshot, fullgrad_snap;

    for (std::size_t s = 1; s <= cfg_.outer_count; ++s) {
      v = obj_.full_gradient(w, &comp_);
      if (!sarah) {
        snapshot = w;
        fullgrad_snap = v;
      }
      StepStats stats;
      std::size_t fallbacks = 0;
      double eta = rbb ? rule.eta_0 : fixed->eta;  // no previous iterate yet
      stats.add(eta);
      dense_record(s, 0, eta, false, v, w);
      w_prev = w;
      for (std::size_t j = 0; j < w.size(); ++j) w[j] -= eta * v[j];

      for (std::size_t k = 1; k < cfg_.m; ++k) {
        auto S = sample_without_replacement(n, cfg_.b, rng);
        v = sarah ? sarah_estimator_update(v, obj_, S, w, w_prev, &comp_)
                  : svrg_estimator(obj_, S, w, snapshot, fullgrad_snap,
                                   &comp_);
        bool fb = false;
        if (rbb) {
          auto S_H = sample_without_replacement(n, cfg_.b_H, rng);
          obj_.minibatch_gradient(S_H, w, g_k, &step_evals_);
          obj_.minibatch_gradient(S_H, w_prev, g_prev, &step_evals_);
          if (w == w_prev) {
            // Stalled iterate: the ratio is undefined; reuse the last
            // accepted step. The two evaluations above already happened, so
            // the work accounting stays exact.
            eta = last_accepted;
            fb = true;
          } else {
            StepResult r = rbb_step(w, w_prev, g_k, g_prev, cfg_.b_H,
                                    rule.gamma, rule.safeguard, last_accepted);
            eta = r.eta;
            fb = r.fallback;
            if (!fb) last_accepted = eta;
          }
        }
        if (fb) ++fallbacks;
        stats.add(eta);
        dense_record(s, k, eta, fb, v, w);
        w_prev = w;
        for (std::size_t j = 0; j < w.size(); ++j) w[j] -= eta * v[j];
      }
      record(s, w, stats, fallbacks);
    }
    finish(w);
    return trace_;
  }

  // SVRG / SVRG-BB: per outer loop, full gradient at the snapshot, then m
  // inner steps with the snapshot-anchored estimator. SVRG-BB recomputes its
  // step once per outer loop from consecutive snapshots.
  RunTrace svrg() {
    const std::size_t n = obj_.n();
    Rng rng(cfg_.seed);
    DenseVector w = initial_w();

    const FixedStep* fixed = std::get_if<FixedStep>(&cfg_.step);
    const EpochBbStep* epoch = std::get_if<EpochBbStep>(&cfg_.step);
    double eta = fixed ? fixed->eta : epoch->eta_0;
    double last_accepted = eta;

    DenseVector snapshot, fullgrad, snapshot_prev, fullgrad_prev;
    for (std::size_t s = 1; s <= cfg_.outer_count; ++s) {
      snapshot = w;
      fullgrad = obj_.full_gradient(snapshot, &comp_);
      StepStats stats;
      std::size_t fallbacks = 0;
      if (epoch && s >= 2) {
        if (snapshot == snapshot_prev) {
          eta = last_accepted;
          ++fallbacks;
        } else {
          StepResult r =
              epoch_bb_step(snapshot, snapshot_prev, fullgrad, fullgrad_prev,
                            cfg_.m, epoch->safeguard, last_accepted);
          eta = r.eta;
          if (r.fallback)
            ++fallbacks;
          else
            last_accepted = eta;
        }
      }
      for (std::size_t k = 0; k < cfg_.m; ++k) {
        auto S = sample_without_replacement(n, cfg_.b, rng);
        DenseVector v = svrg_estimator(obj_, S, w, snapshot, fullgrad, &comp_);
        stats.add(eta);
        dense_record(s, k, eta, false, v, w);
        for (std::size_t j = 0; j < w.size(); ++j) w[j] -= eta * v[j];
      }
      snapshot_prev = snapshot;
      fullgrad_prev = fullgrad;
      record(s, w, stats, fallbacks);
    }
    finish(w);
    return trace_;
  }

  // Plain SGD; m steps per trace record.
  RunTrace sgd() {
    const std::size_t n = obj_.n();
    Rng rng(cfg_.seed);
    DenseVector w = initial_w();
    const double eta = std::get<FixedStep>(cfg_.step).eta;
    DenseVector g;
    for (std::size_t s = 1; s <= cfg_.outer_count; ++s) {
      StepStats stats;
      for (std::size_t k = 0; k < cfg_.m; ++k) {
        auto S = sample_without_replacement(n, cfg_.b, rng);
        obj_.minibatch_gradient(S, w, g, &comp_);
        stats.add(eta);
        dense_record(s, k, eta, false, g, w);
        for (std::size_t j = 0; j < w.size(); ++j) w[j] -= eta * g[j];
      }
      record(s, w, stats, 0);
    }
    finish(w);
    return trace_;
  }

  const Objective& obj_;
  const SolverConfig& cfg_;
  EvalCounter comp_;
  EvalCounter step_evals_;
  RunTrace trace_;
};

}  // namespace

RunTrace run_solver(const Objective& obj, const SolverConfig& cfg) {
  validate_config(obj, cfg);
  return Run(obj, cfg).go();
}

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
  out << "outer,passes,passes_incl_stepsize,value,grad_norm_sq,step_min,"
         "step_mean,step_max,fallbacks\n";
  char buf[512];
  for (const TraceRecord& r : trace.records) {
    std::snprintf(buf, sizeof buf,
                  "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%zu\n",
                  r.outer_index, r.effective_passes,
                  r.effective_passes_incl_stepsize, r.objective_value,
                  r.grad_norm_sq, r.step_min, r.step_mean, r.step_max,
                  r.fallback_count);
    out << buf;
  }
}

}  // namespace sarahbb
