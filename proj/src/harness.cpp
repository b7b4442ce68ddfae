#include "sarahbb/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "sarahbb/fetch.hpp"
#include "sarahbb/kvfile.hpp"

namespace sarahbb {

namespace {

std::vector<std::uint64_t> parse_u64_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoull(item));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

SafeguardPolicy parse_safeguard(const KvFile::Section& s) {
  SafeguardPolicy p;
  p.eps_denominator = KvFile::get_double(s, "eps_denominator", p.eps_denominator);
  p.eta_max = KvFile::get_double(s, "eta_max", p.eta_max);
  p.eta_min = KvFile::get_double(s, "eta_min", p.eta_min);
  return p;
}

SolverConfig parse_solver_config(const KvFile::Section& s) {
  SolverConfig cfg;
  cfg.method = method_from_name(KvFile::require(s, "method"));
  cfg.b = KvFile::get_u64(s, "b", 1);
  cfg.b_H = KvFile::get_u64(s, "b_H", KvFile::get_u64(s, "bH", 0));
  cfg.m = KvFile::get_u64(s, "m", 0);  // 0 = 2n/b, resolved against the data
  cfg.outer_count = KvFile::get_u64(s, "outers", 10);
  cfg.seed = KvFile::get_u64(s, "seed", 0);
  switch (cfg.method) {
    case Method::mb_sarah_rbb:
    case Method::ms2gd_rbb: {
      RbbStep rule;
      rule.gamma = KvFile::get_double(s, "gamma", 0.0);  // 0 = default by b_H
      rule.eta_0 = KvFile::get_double(s, "eta0", 0.1);
      rule.safeguard = parse_safeguard(s);
      cfg.step = rule;
      break;
    }
    case Method::svrg_bb: {
      EpochBbStep rule;
      rule.eta_0 = KvFile::get_double(s, "eta0", 0.1);
      rule.safeguard = parse_safeguard(s);
      cfg.step = rule;
      break;
    }
    default:
      cfg.step = FixedStep{KvFile::get_double(s, "eta", 0.0)};  // 0 = 0.25/L
      break;
  }
  return cfg;
}

std::string sanitize_label(const std::string& label) {
  std::string out;
  for (char c : label) {
    bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
              c == '_' || c == '.';
    out.push_back(ok ? c : '-');
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t mix64(std::uint64_t h, std::uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  return h;
}

std::uint64_t double_bits(double v) {
  std::uint64_t u;
  static_assert(sizeof u == sizeof v);
  std::memcpy(&u, &v, sizeof u);
  return u;
}

}  // namespace

std::vector<double> default_eta_grid() {
  // 7 log-spaced points spanning 1e-3 .. 1
  std::vector<double> grid;
  for (int k = -6; k <= 0; ++k) grid.push_back(std::pow(10.0, k / 2.0));
  return grid;
}

ExperimentSpec parse_experiment_spec(const std::filesystem::path& path) {
  KvFile file = KvFile::parse_file(path);
  const KvFile::Section* exp = file.find("experiment");
  if (!exp) throw std::runtime_error("spec file: missing [experiment] section");

  ExperimentSpec spec;
  std::string ds = KvFile::require(*exp, "dataset");
  if (ds == "synthetic") {
    spec.dataset.origin = DatasetOrigin::synthetic;
    spec.dataset.synthetic.n = KvFile::get_u64(*exp, "synthetic_n", 1000);
    spec.dataset.synthetic.d = KvFile::get_u64(*exp, "synthetic_d", 20);
    spec.dataset.synthetic.seed = KvFile::get_u64(*exp, "synthetic_seed", 7);
    spec.dataset.synthetic.condition_hint =
        KvFile::get_double(*exp, "synthetic_condition", 1.0);
    std::string task = KvFile::get(*exp, "synthetic_task")
                           .value_or("classification");
    if (task == "classification")
      spec.dataset.synthetic.task = TaskKind::classification;
    else if (task == "regression")
      spec.dataset.synthetic.task = TaskKind::regression;
    else
      throw std::runtime_error("spec file: unknown synthetic_task " + task);
  } else if (ds.rfind("file:", 0) == 0) {
    spec.dataset.origin = DatasetOrigin::file;
    spec.dataset.file = ds.substr(5);
  } else if (ds.rfind("fetch:", 0) == 0) {
    spec.dataset.origin = DatasetOrigin::fetch;
    spec.dataset.fetch_name = ds.substr(6);
  } else {
    throw std::runtime_error(
        "spec file: dataset must be synthetic, file:<path> or fetch:<name>");
  }
  spec.dataset.cache_dir =
      KvFile::get(*exp, "cache_dir").value_or(spec.dataset.cache_dir.string());
  if (auto uc = KvFile::get(*exp, "url_config")) spec.dataset.url_config = *uc;
  spec.dataset.dim_override = KvFile::get_u64(*exp, "dim_override", 0);

  std::string obj = KvFile::get(*exp, "objective").value_or("logistic");
  if (obj == "logistic")
    spec.objective = ObjectiveKind::logistic;
  else if (obj == "ridge")
    spec.objective = ObjectiveKind::ridge;
  else
    throw std::runtime_error("spec file: unknown objective " + obj);
  spec.lambda = KvFile::get_double(*exp, "lambda", 0.01);
  spec.normalize = KvFile::get_bool(*exp, "normalize", false);
  spec.output_dir = KvFile::get(*exp, "output_dir").value_or("out");
  if (auto seeds = KvFile::get(*exp, "seeds"))
    spec.seeds = parse_u64_list(*seeds);
  if (spec.seeds.empty())
    throw std::runtime_error("spec file: seeds must be non-empty");
  spec.epsilon = KvFile::get_double(*exp, "epsilon", 1e-3);
  spec.passes_include_stepsize =
      KvFile::get_bool(*exp, "passes_include_stepsize", false);

  if (const KvFile::Section* ref = file.find("reference")) {
    spec.reference.method = parse_solver_config(*ref);
    spec.reference.tolerance = KvFile::get_double(*ref, "tolerance", 1e-16);
    spec.reference.max_passes = KvFile::get_double(*ref, "max_passes", 4000.0);
  } else {
    SolverConfig def;
    def.method = Method::mb_sarah_fixed;
    def.b = 4;
    def.m = 0;
    def.outer_count = 1;
    def.step = FixedStep{0.0};
    def.seed = 9999;
    spec.reference.method = def;
  }

  for (const KvFile::Section* sec : file.find_all_prefix("run ")) {
    RunSpec run;
    run.label = sec->name.substr(4);
    if (run.label.empty())
      throw std::runtime_error("spec file: run section needs a label");
    run.config = parse_solver_config(*sec);
    spec.runs.push_back(std::move(run));
  }
  for (std::size_t i = 0; i < spec.runs.size(); ++i)
    for (std::size_t j = i + 1; j < spec.runs.size(); ++j)
      if (spec.runs[i].label == spec.runs[j].label)
        throw std::runtime_error("spec file: duplicate run label " +
                                 spec.runs[i].label);

  if (const KvFile::Section* sw = file.find("sweep")) {
    spec.sweep_base = parse_solver_config(*sw);
    if (auto g = KvFile::get(*sw, "eta_grid"))
      spec.sweep_eta_grid = parse_double_list(*g);
    if (auto g = KvFile::get(*sw, "b_grid"))
      for (auto v : parse_u64_list(*g))
        spec.sweep_b_grid.push_back(static_cast<std::size_t>(v));
    if (auto g = KvFile::get(*sw, "bH_grid"))
      for (auto v : parse_u64_list(*g))
        spec.sweep_bH_grid.push_back(static_cast<std::size_t>(v));
    if (auto g = KvFile::get(*sw, "gamma_grid"))
      spec.sweep_gamma_grid = parse_double_list(*g);
    spec.sweep_target = KvFile::get_double(*sw, "target_suboptimality", 1e-6);
  }
  return spec;
}

Dataset load_dataset(const DatasetSpecEntry& spec, bool normalize) {
  ParseOptions opts;
  opts.dim_override = spec.dim_override;
  Dataset ds = [&] {
    switch (spec.origin) {
      case DatasetOrigin::synthetic:
        return generate_synthetic(spec.synthetic);
      case DatasetOrigin::file:
        return parse_libsvm_file(spec.file, opts);
      case DatasetOrigin::fetch:
        return fetch_dataset(spec.fetch_name, spec.cache_dir,
                             spec.url_config ? &*spec.url_config : nullptr,
                             opts);
    }
    throw std::logic_error("unreachable");
  }();
  if (!normalize) return ds;
  return normalize_rows(ds).dataset;
}

std::unique_ptr<Objective> make_objective(const Dataset& ds,
                                          ObjectiveKind kind, double lambda) {
  if (kind == ObjectiveKind::logistic)
    return std::make_unique<LogisticL2>(ds, lambda);
  return std::make_unique<RidgeL2>(ds, lambda);
}

void resolve_config(const Objective& obj, SolverConfig& cfg) {
  if (cfg.m == 0)
    cfg.m = std::max<std::size_t>(1, 2 * obj.n() / std::max<std::size_t>(
                                          1, cfg.b));
  if (auto* fixed = std::get_if<FixedStep>(&cfg.step)) {
    if (fixed->eta == 0.0) fixed->eta = 0.25 / obj.constants().L;
  }
  if (auto* rule = std::get_if<RbbStep>(&cfg.step)) {
    if (rule->gamma == 0.0) rule->gamma = default_gamma(cfg.b_H);
  }
}

namespace {

std::uint64_t reference_key(const Objective& obj, const ReferencePolicy& p) {
  std::uint64_t h = obj.dataset().content_hash();
  h = mix64(h, dynamic_cast<const LogisticL2*>(&obj) ? 1 : 2);
  h = mix64(h, double_bits(obj.lambda()));
  h = mix64(h, double_bits(p.tolerance));
  return h;
}

std::optional<Reference> load_reference(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  Reference ref;
  std::string key;
  std::size_t d = 0;
  if (!(in >> key >> ref.value) || key != "value") return std::nullopt;
  if (!(in >> key >> ref.grad_norm_sq) || key != "grad_norm_sq")
    return std::nullopt;
  if (!(in >> key >> d) || key != "dim") return std::nullopt;
  ref.w_star.resize(d);
  for (std::size_t j = 0; j < d; ++j)
    if (!(in >> ref.w_star[j])) return std::nullopt;
  ref.cache_hit = true;
  return ref;
}

void store_reference(const std::filesystem::path& path, const Reference& ref) {
  std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << "value " << fmt(ref.value) << "\n";
    out << "grad_norm_sq " << fmt(ref.grad_norm_sq) << "\n";
    out << "dim " << ref.w_star.size() << "\n";
    for (double v : ref.w_star) out << fmt(v) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

Reference compute_reference(const Objective& obj, const ReferencePolicy& policy,
                            const std::filesystem::path& cache_dir) {
  char hex[32];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(reference_key(obj, policy)));
  std::filesystem::path path = cache_dir / (std::string("ref-") + hex + ".txt");
  if (auto cached = load_reference(path)) return *cached;

  SolverConfig cfg = policy.method;
  resolve_config(obj, cfg);
  cfg.outer_count = 1;  // re-check the gradient after every outer loop
  cfg.dense_trace = false;
  cfg.dense_trace_gap = false;

  DenseVector w = cfg.w0.empty() ? DenseVector(obj.dim(), 0.0) : cfg.w0;
  double grad_sq = norm_sq(obj.full_gradient(w));
  double passes = 0.0;
  std::uint64_t round = 0;
  while (grad_sq > policy.tolerance) {
    if (passes >= policy.max_passes)
      throw ReferenceBudgetError(
          "reference solve exhausted its pass budget (best ||grad||^2 = " +
              fmt(grad_sq) + ")",
          std::move(w), grad_sq);
    cfg.w0 = w;
    cfg.seed = policy.method.seed + round;
    RunTrace t = run_solver(obj, cfg);
    w = std::move(t.final_w);
    grad_sq = t.records.back().grad_norm_sq;
    passes += static_cast<double>(t.total_component_grad_evals +
                                  t.total_stepsize_grad_evals) /
              static_cast<double>(obj.n());
    ++round;
  }
  Reference ref;
  ref.value = obj.value(w);
  ref.grad_norm_sq = grad_sq;
  ref.w_star = std::move(w);
  ref.cache_hit = false;
  store_reference(path, ref);
  return ref;
}

DenseVector gradient_descent_reference(const Objective& obj, double tolerance,
                                       std::size_t max_iters) {
  const double eta = 1.0 / obj.constants().L;
  DenseVector w(obj.dim(), 0.0);
  DenseVector g(obj.dim());
  for (std::size_t it = 0; it < max_iters; ++it) {
    obj.full_gradient(w, g);
    if (norm_sq(g) <= tolerance) return w;
    for (std::size_t j = 0; j < w.size(); ++j) w[j] -= eta * g[j];
  }
  throw std::runtime_error("gradient_descent_reference: budget exhausted");
}

namespace {

void write_trace_with_subopt(const RunTrace& trace, double ref_value,
                             std::ostream& out) {
  out << "outer,passes,passes_incl_stepsize,value,grad_norm_sq,step_min,"
         "step_mean,step_max,fallbacks,suboptimality\n";
  for (const TraceRecord& r : trace.records) {
    out << r.outer_index << ',' << fmt(r.effective_passes) << ','
        << fmt(r.effective_passes_incl_stepsize) << ','
        << fmt(r.objective_value) << ',' << fmt(r.grad_norm_sq) << ','
        << fmt(r.step_min) << ',' << fmt(r.step_mean) << ','
        << fmt(r.step_max) << ',' << r.fallback_count << ','
        << fmt(r.objective_value - ref_value) << '\n';
  }
}

std::optional<TheoryInputs> theory_inputs_for(const Objective& obj,
                                              const SolverConfig& cfg,
                                              double epsilon) {
  const auto* rule = std::get_if<RbbStep>(&cfg.step);
  if (!rule) return std::nullopt;
  ObjectiveConstants c = obj.constants();
  TheoryInputs t;
  t.L = c.L;
  t.mu = c.mu;
  t.n = obj.n();
  t.b = cfg.b;
  t.b_H = cfg.b_H;
  t.gamma = cfg.method == Method::ms2gd_rbb ? 1.0 : rule->gamma;
  t.m = cfg.m;
  t.epsilon = epsilon;
  return t;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  Dataset ds = load_dataset(spec.dataset, false);
  std::size_t zero_rows = 0;
  if (spec.normalize) {
    NormalizeResult nr = normalize_rows(ds);
    zero_rows = nr.zero_rows.size();
    ds = std::move(nr.dataset);
  }
  std::unique_ptr<Objective> obj =
      make_objective(ds, spec.objective, spec.lambda);
  ObjectiveConstants consts = obj->constants();

  std::filesystem::create_directories(spec.output_dir);
  Reference ref = compute_reference(*obj, spec.reference,
                                    spec.output_dir / "reference_cache");

  ExperimentResult result;
  result.reference = ref;

  std::ofstream combined(spec.output_dir / "combined.csv");
  combined << "label,seed,outer,passes,passes_incl_stepsize,value,"
              "grad_norm_sq,step_min,step_mean,step_max,fallbacks,"
              "suboptimality\n";

  for (const RunSpec& run : spec.runs) {
    SolverConfig base = run.config;
    resolve_config(*obj, base);
    for (std::uint64_t seed : spec.seeds) {
      SolverConfig cfg = base;
      cfg.seed = seed;
      RunOutcome outcome;
      outcome.label = run.label;
      outcome.seed = seed;
      try {
        outcome.trace = run_solver(*obj, cfg);
      } catch (const DivergenceError& e) {
        outcome.trace = e.partial_trace;
        outcome.diverged = true;
        result.exit_code = 1;
      }
      std::ofstream per(spec.output_dir /
                        (sanitize_label(run.label) + "-seed" +
                         std::to_string(seed) + ".csv"));
      write_trace_with_subopt(outcome.trace, ref.value, per);
      for (const TraceRecord& r : outcome.trace.records) {
        combined << run.label << ',' << seed << ',' << r.outer_index << ','
                 << fmt(r.effective_passes) << ','
                 << fmt(r.effective_passes_incl_stepsize) << ','
                 << fmt(r.objective_value) << ',' << fmt(r.grad_norm_sq) << ','
                 << fmt(r.step_min) << ',' << fmt(r.step_mean) << ','
                 << fmt(r.step_max) << ',' << r.fallback_count << ','
                 << fmt(r.objective_value - ref.value) << '\n';
      }
      result.outcomes.push_back(std::move(outcome));
    }

    // mean trace over seeds that completed
    std::vector<const RunOutcome*> done;
    for (const RunOutcome& o : result.outcomes)
      if (o.label == run.label && !o.diverged) done.push_back(&o);
    if (!done.empty()) {
      std::ofstream mean_out(spec.output_dir /
                             (sanitize_label(run.label) + "-mean.csv"));
      mean_out << "outer,passes,passes_incl_stepsize,value,grad_norm_sq,"
                  "suboptimality\n";
      std::size_t records = done.front()->trace.records.size();
      for (std::size_t r = 0; r < records; ++r) {
        double value = 0.0, grad = 0.0;
        for (const RunOutcome* o : done) {
          value += o->trace.records[r].objective_value;
          grad += o->trace.records[r].grad_norm_sq;
        }
        value /= static_cast<double>(done.size());
        grad /= static_cast<double>(done.size());
        const TraceRecord& first = done.front()->trace.records[r];
        mean_out << first.outer_index << ',' << fmt(first.effective_passes)
                 << ',' << fmt(first.effective_passes_incl_stepsize) << ','
                 << fmt(value) << ',' << fmt(grad) << ','
                 << fmt(value - ref.value) << '\n';
      }
    }
  }

  std::ofstream summary(spec.output_dir / "summary.txt");
  summary << "dataset = " << ds.name() << "\n";
  summary << "n = " << ds.n() << "\n";
  summary << "dim = " << ds.dim() << "\n";
  summary << "objective = "
          << (spec.objective == ObjectiveKind::logistic ? "logistic" : "ridge")
          << "\n";
  summary << "lambda = " << fmt(spec.lambda) << "\n";
  summary << "normalized = " << (spec.normalize ? "true" : "false") << "\n";
  if (spec.normalize) summary << "zero_rows = " << zero_rows << "\n";
  summary << "L = " << fmt(consts.L) << "\n";
  summary << "mu = " << fmt(consts.mu) << "\n";
  summary << "reference_value = " << fmt(ref.value) << "\n";
  summary << "reference_grad_norm_sq = " << fmt(ref.grad_norm_sq) << "\n";
  for (const RunSpec& run : spec.runs) {
    SolverConfig cfg = run.config;
    resolve_config(*obj, cfg);
    summary << "\n[run " << run.label << "]\n";
    summary << "method = " << method_name(cfg.method) << "\n";
    summary << "b = " << cfg.b << "\n";
    if (cfg.b_H > 0) summary << "b_H = " << cfg.b_H << "\n";
    summary << "m = " << cfg.m << "\n";
    summary << "outers = " << cfg.outer_count << "\n";
    double mean_final = 0.0;
    std::size_t count = 0;
    for (const RunOutcome& o : result.outcomes) {
      if (o.label != run.label) continue;
      if (o.diverged) {
        summary << "seed " << o.seed << ": DIVERGED\n";
        continue;
      }
      double final_sub =
          o.trace.records.back().objective_value - ref.value;
      summary << "seed " << o.seed
              << ": final_suboptimality = " << fmt(final_sub) << "\n";
      mean_final += final_sub;
      ++count;
    }
    if (count > 0)
      summary << "mean_final_suboptimality = "
              << fmt(mean_final / static_cast<double>(count)) << "\n";
    if (auto inputs = theory_inputs_for(*obj, cfg, spec.epsilon)) {
      DenseVector w0 = cfg.w0.empty() ? DenseVector(obj->dim(), 0.0) : cfg.w0;
      double gap = obj->value(w0) - ref.value;
      summary << "theory:\n"
              << format_theory_report(evaluate_theory(*inputs, gap));
    }
  }
  return result;
}

std::vector<SweepRow> run_sweep(const ExperimentSpec& spec) {
  if (!spec.sweep_base)
    throw std::runtime_error("sweep: spec file has no [sweep] section");
  Dataset ds = load_dataset(spec.dataset, spec.normalize);
  std::unique_ptr<Objective> obj =
      make_objective(ds, spec.objective, spec.lambda);
  std::filesystem::create_directories(spec.output_dir);
  Reference ref = compute_reference(*obj, spec.reference,
                                    spec.output_dir / "reference_cache");

  const SolverConfig& base = *spec.sweep_base;
  const bool rbb = std::holds_alternative<RbbStep>(base.step);

  std::vector<std::size_t> b_grid =
      spec.sweep_b_grid.empty() ? std::vector<std::size_t>{base.b}
                                : spec.sweep_b_grid;
  std::vector<std::size_t> bH_grid =
      !rbb ? std::vector<std::size_t>{base.b_H}
           : (spec.sweep_bH_grid.empty() ? std::vector<std::size_t>{base.b_H}
                                         : spec.sweep_bH_grid);
  std::vector<double> gamma_grid{0.0};
  std::vector<double> eta_grid{0.0};
  if (rbb) {
    gamma_grid = spec.sweep_gamma_grid.empty()
                     ? std::vector<double>{std::get<RbbStep>(base.step).gamma}
                     : spec.sweep_gamma_grid;
  } else if (std::holds_alternative<FixedStep>(base.step)) {
    eta_grid =
        spec.sweep_eta_grid.empty() ? default_eta_grid() : spec.sweep_eta_grid;
  }

  std::vector<SweepRow> rows;
  for (std::size_t b : b_grid) {
    for (std::size_t bH : bH_grid) {
      for (double gamma : gamma_grid) {
        for (double eta : eta_grid) {
          SolverConfig cfg = base;
          cfg.b = b;
          cfg.b_H = bH;
          if (auto* rule = std::get_if<RbbStep>(&cfg.step)) rule->gamma = gamma;
          if (auto* rule = std::get_if<FixedStep>(&cfg.step)) rule->eta = eta;
          cfg.seed = spec.seeds.front();
          cfg.m = base.m;
          resolve_config(*obj, cfg);
          std::ostringstream label;
          label << method_name(cfg.method) << "-b" << b;
          if (rbb)
            label << "-bH" << bH << "-g"
                  << std::get<RbbStep>(cfg.step).gamma;
          else if (std::holds_alternative<FixedStep>(cfg.step))
            label << "-eta" << std::get<FixedStep>(cfg.step).eta;

          SweepRow row;
          row.label = label.str();
          row.config = cfg;
          try {
            RunTrace trace = run_solver(*obj, cfg);
            row.final_suboptimality =
                trace.records.back().objective_value - ref.value;
            for (const TraceRecord& r : trace.records) {
              double sub = r.objective_value - ref.value;
              if (sub <= spec.sweep_target) {
                row.passes_to_target = spec.passes_include_stepsize
                                           ? r.effective_passes_incl_stepsize
                                           : r.effective_passes;
                break;
              }
            }
          } catch (const DivergenceError&) {
            row.diverged = true;
            row.final_suboptimality =
                std::numeric_limits<double>::quiet_NaN();
          }
          rows.push_back(std::move(row));
        }
      }
    }
  }

  std::ofstream out(spec.output_dir / "sweep.csv");
  out << "label,method,b,b_H,gamma,eta,m,outers,seed,final_suboptimality,"
         "passes_to_target,diverged\n";
  for (const SweepRow& row : rows) {
    const auto* rule = std::get_if<RbbStep>(&row.config.step);
    const auto* fixed = std::get_if<FixedStep>(&row.config.step);
    out << row.label << ',' << method_name(row.config.method) << ','
        << row.config.b << ',' << row.config.b_H << ','
        << fmt(rule ? rule->gamma : 0.0) << ',' << fmt(fixed ? fixed->eta : 0.0)
        << ',' << row.config.m << ',' << row.config.outer_count << ','
        << row.config.seed << ',' << fmt(row.final_suboptimality) << ','
        << fmt(row.passes_to_target) << ',' << (row.diverged ? 1 : 0) << '\n';
  }
  return rows;
}

}  // namespace sarahbb
