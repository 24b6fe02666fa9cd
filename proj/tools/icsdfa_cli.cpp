#include <CLI11.hpp>

#include <fstream>
#include <future>
#include <iostream>
#include <optional>

#include "icsdfa/dtmc.hpp"
#include "icsdfa/learner.hpp"
#include "icsdfa/metrics.hpp"
#include "icsdfa/statechart.hpp"
#include "icsdfa/trace.hpp"
#include "icsdfa/traffic_gen.hpp"

namespace fs = std::filesystem;
using namespace icsdfa;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_text(out_path, text);
  }
}

struct GenerateArgs {
  int builtin = 0;
  std::string scenario;
  std::uint64_t seed = 1;
  std::int64_t duration = kDefaultDurationMs;
  std::int64_t jitter = kDefaultJitterMs;
  std::string out = "trace.csv";
  std::string truth;
};

int run_generate(const GenerateArgs& a) {
  ScenarioSpec spec;
  if (!a.scenario.empty()) {
    spec = parse_scenario(a.scenario);
  } else {
    spec = builtin_scenario(a.builtin, a.seed, a.duration, a.jitter);
  }
  const Generated gen = generate(spec);
  write_trace(gen.trace, a.out);
  fs::path truth = a.truth;
  if (truth.empty()) {
    truth = fs::path(a.out);
    truth.replace_extension(".truth.csv");
  }
  write_ground_truth(gen.trace, gen.truth, truth);
  std::cout << "threads," << spec.threads.size() << '\n'
            << "events," << gen.trace.size() << '\n'
            << "shifted," << gen.shifted << '\n'
            << "overlap_pct," << time_overlap(gen.truth) << '\n'
            << "uniqueness," << symbol_uniqueness(spec) << '\n';
  return 0;
}

struct LearnArgs {
  std::string trace;
  std::string config;
  bool naive = false;
  std::size_t max_len = 0;
  std::string out = "model.txt";
  std::string dump_dtmc;
  std::string dump_partition;
};

int run_learn(const LearnArgs& a) {
  const Trace trace = parse_trace(a.trace);
  LearnConfig cfg = a.config.empty() ? LearnConfig{} : parse_learn_config(a.config);
  if (a.max_len) cfg.max_pattern_len = a.max_len;

  if (!a.dump_dtmc.empty()) {
    const Trace learn = trace.slice(0, learning_window_end(trace, cfg.learn_window));
    write_text(a.dump_dtmc, format_dtmc_edges(build_dtmc(learn, cfg.t_rare, cfg.rare_basis)));
  }

  if (a.naive) {
    const Statechart sc = learn_naive(trace, cfg);
    write_model(sc, a.out);
    std::cout << "naive model: pattern length " << sc.dfas().front().length() << '\n';
    return 0;
  }

  LearnResult res = learn_statechart(trace, cfg);
  if (!a.dump_partition.empty()) {
    std::string text;
    for (const auto& p : res.report.partitions) text += format_partition(p);
    write_text(a.dump_partition, text);
  }
  write_model(res.statechart, a.out);
  std::cout << format_report(res.report);
  std::cout << "statechart: " << res.statechart.size() << " DFAs, model size "
            << statechart_model_size(res.statechart) << '\n';
  return 0;
}

struct EnforceArgs {
  std::string model;
  std::string trace;
  std::string out = "events.csv";
};

int run_enforce(const EnforceArgs& a) {
  const Statechart sc = read_model(a.model);
  const Trace trace = parse_trace(a.trace);
  const EnforcementResult res = enforce(sc, trace);
  write_text(a.out, format_event_log(res.records));
  std::cout << format_summary(res.summary);
  return 0;
}

struct EvaluateArgs {
  int builtin = 0;
  bool all = false;
  std::uint64_t seed = 1;
  std::int64_t duration = kDefaultDurationMs;
  std::string config;
  std::string out;
};

std::string medians_table(const std::vector<ScenarioEvaluation>& evals) {
  std::string out = "\nmodel,median_false_alarm_pct,scenarios\n";
  for (const char* model : {"naive", "practical", "ideal"}) {
    std::vector<double> v;
    for (const auto& ev : evals) {
      for (const auto& s : ev.scores) {
        if (s.model == model && !s.failed) v.push_back(s.false_alarm_pct);
      }
    }
    out += std::string(model) + ',' + std::to_string(median_of(v)) + ',' + std::to_string(v.size()) + '\n';
  }
  return out;
}

int run_evaluate(const EvaluateArgs& a) {
  EvaluationConfig cfg;
  cfg.seed = a.seed;
  cfg.duration_ms = a.duration;
  if (!a.config.empty()) cfg.practical = parse_learn_config(a.config);

  std::vector<int> ids;
  if (a.all) {
    for (int id = 1; id <= kBuiltinCount; ++id) ids.push_back(id);
  } else {
    builtin_scenario(a.builtin, 1, 1000, 0);  // validates the id
    ids.push_back(a.builtin);
  }

  std::vector<std::future<ScenarioEvaluation>> jobs;
  for (int id : ids) jobs.push_back(std::async(std::launch::async, [id, &cfg] { return evaluate_scenario(id, cfg); }));

  std::vector<ScenarioEvaluation> evals;
  std::string text = report_csv_header();
  for (auto& j : jobs) {
    evals.push_back(j.get());
    const auto& ev = evals.back();
    text += format_report_rows(ev.rows());
    if (!ev.practical) std::cerr << "scenario " << ev.scenario << ": practical learning failed: " << ev.practical_failure << '\n';
  }
  if (a.all) text += medians_table(evals);
  emit(a.out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-pattern DFA learning and enforcement for periodic ICS traffic"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a synthetic multiplexed trace");
  auto* g_src = g->add_option_group("source");
  g_src->add_option("--builtin", gen.builtin, "Builtin scenario id")->check(CLI::Range(1, kBuiltinCount));
  g_src->add_option("--scenario", gen.scenario, "Scenario file")->check(CLI::ExistingFile);
  g_src->require_option(1);
  g->add_option("--seed", gen.seed, "Random seed for builtin scenarios");
  g->add_option("--duration", gen.duration, "Duration in ms for builtin scenarios")->check(CLI::PositiveNumber);
  g->add_option("--jitter", gen.jitter, "Jitter in ms for builtin scenarios")->check(CLI::NonNegativeNumber);
  g->add_option("--out", gen.out, "Trace CSV output");
  g->add_option("--truth", gen.truth, "Ground-truth CSV output (default: <out>.truth.csv)");

  LearnArgs learn;
  auto* l = app.add_subcommand("learn", "Learn a model from a trace");
  l->add_option("--trace", learn.trace, "Trace CSV")->required()->check(CLI::ExistingFile);
  l->add_option("--config", learn.config, "Learner config file")->check(CLI::ExistingFile);
  l->add_flag("--naive", learn.naive, "Learn the single-DFA baseline");
  l->add_option("--max-len", learn.max_len, "Override maximum pattern length");
  l->add_option("--out", learn.out, "Model output");
  l->add_option("--dump-dtmc", learn.dump_dtmc, "Write the DTMC edge list");
  l->add_option("--dump-partition", learn.dump_partition, "Write the symbol-set partitions");

  EnforceArgs enf;
  auto* e = app.add_subcommand("enforce", "Replay a trace through a model");
  e->add_option("--model", enf.model, "Model file")->required()->check(CLI::ExistingFile);
  e->add_option("--trace", enf.trace, "Trace CSV")->required()->check(CLI::ExistingFile);
  e->add_option("--out", enf.out, "Event log output");

  EvaluateArgs ev;
  auto* v = app.add_subcommand("evaluate", "Compare naive, practical and ideal models on builtin scenarios");
  auto* v_src = v->add_option_group("selection");
  v_src->add_option("--builtin", ev.builtin, "Builtin scenario id")->check(CLI::Range(1, kBuiltinCount));
  v_src->add_flag("--all", ev.all, "Every builtin scenario");
  v_src->require_option(1);
  v->add_option("--seed", ev.seed, "Random seed");
  v->add_option("--duration", ev.duration, "Duration in ms")->check(CLI::PositiveNumber);
  v->add_option("--config", ev.config, "Learner config file")->check(CLI::ExistingFile);
  v->add_option("--out", ev.out, "Report CSV output (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*g) return run_generate(gen);
    if (*l) return run_learn(learn);
    if (*e) return run_enforce(enf);
    if (*v) return run_evaluate(ev);
  } catch (const LearnError& err) {
    std::cerr << "learning failed: " << err.what() << '\n';
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 2;
}
