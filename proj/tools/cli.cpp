#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "madam/live_backend.hpp"
#include "madam/madam.hpp"

namespace madam::cli {

namespace {

/// Bad flags, missing inputs, inconsistent settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

std::string env_name(const std::string& key) {
  std::string out = "MADAM_";
  for (char c : key) out.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

std::string utc_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

/// Per-subcommand settings resolved as: flag > MADAM_* variable > config file > default.
class Settings {
 public:
  Settings(CLI::App* cmd, std::string section) : cmd_(cmd), section_(std::move(section)) {}

  CLI::Option* add(const std::string& key, const std::string& help, const std::string& type = "TEXT") {
    auto* opt = cmd_->add_option("--" + key, values_[key], help)
                    ->type_name(type)
                    ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    options_[key] = opt;
    return opt;
  }

  void bind(const EnvLookup& env, const std::map<std::string, std::string>& config) {
    env_ = &env;
    config_ = &config;
  }

  std::optional<std::string> find(const std::string& key) const {
    if (auto it = options_.find(key); it != options_.end() && it->second->count() > 0) return values_.at(key);
    if (auto v = (*env_)(env_name(key))) return v;
    if (auto it = config_->find(section_ + "." + key); it != config_->end()) return it->second;
    if (auto it = config_->find(key); it != config_->end()) return it->second;
    return std::nullopt;
  }

  std::string str(const std::string& key, const std::string& fallback = {}) const {
    return find(key).value_or(fallback);
  }

  std::string required(const std::string& key) const {
    auto v = find(key);
    if (!v || v->empty()) throw ConfigError("--" + key + " is required");
    return *v;
  }

  template <typename T>
  T number(const std::string& key, T fallback) const {
    auto v = find(key);
    if (!v) return fallback;
    std::istringstream in(*v);
    T out{};
    if (!(in >> out) || !(in >> std::ws).eof()) throw ConfigError("--" + key + ": '" + *v + "' is not a number");
    return out;
  }

 private:
  CLI::App* cmd_;
  std::string section_;
  std::map<std::string, std::string> values_;
  std::map<std::string, CLI::Option*> options_;
  const EnvLookup* env_ = nullptr;
  const std::map<std::string, std::string>* config_ = nullptr;
};

std::map<std::string, std::string> load_config(const std::string& path) {
  std::map<std::string, std::string> out;
  if (path.empty()) return out;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) value += (i ? " " : "") + item.inputs[i];
    out[item.fullname()] = value;
  }
  return out;
}

void write_or_throw(const std::string& path, const std::string& contents) {
  try {
    write_text_file(path, contents);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

// --- run / record ----------------------------------------------------------------

void add_run_options(Settings& s) {
  s.add("method", "no-rag | concat | self-reflect | madam (default madam)");
  s.add("backend", "live | scripted | replay (default scripted; live for record)");
  s.add("script", "scripted backend reply table (JSON)", "PATH");
  s.add("recording", "replay source, or record sink for the record command", "PATH");
  s.add("endpoint", "chat-completions URL for the live backend", "URL");
  s.add("model", "model name sent to the backend");
  s.add("api-key-env", "environment variable holding the credential (default MADAM_API_KEY)", "NAME");
  s.add("corpus", "instances to run (JSONL)", "PATH");
  s.add("transcripts", "write one trace per instance here (JSONL)", "PATH");
  s.add("report", "write per-instance judgments and a summary record here (JSONL)", "PATH");
  s.add("max-rounds", "debate round limit (default 3)", "INT");
  s.add("seed", "debate shuffle seed (default 0)", "INT");
  s.add("convergence", "normalized | raw answer comparison (default normalized)");
  s.add("concurrency", "instances and backend calls in flight (default 8)", "INT");
  s.add("em-mode", "strict | lenient (default strict)");
  s.add("reflection-rounds", "review/refine rounds for self-reflect (default 2)", "INT");
  s.add("templates", "directory of <template>.txt overrides", "DIR");
  s.add("temperature", "sampling temperature (default 0)", "FLOAT");
  s.add("max-tokens", "output token cap per call (default 1024)", "INT");
  s.add("system-prompt", "optional system message for every call");
}

std::shared_ptr<ChatBackend> make_backend(const Settings& s, BackendKind kind, const EnvLookup& env) {
  switch (kind) {
    case BackendKind::scripted: return std::make_shared<ScriptedBackend>(Script::load(s.required("script")));
    case BackendKind::replay: return std::make_shared<ReplayBackend>(ReplayBackend::load(s.required("recording")));
    case BackendKind::live: {
      LiveBackendConfig cfg;
      cfg.endpoint = s.required("endpoint");
      if (!s.find("model")) throw ConfigError("--model is required for the live backend");
      const auto key_var = s.str("api-key-env", "MADAM_API_KEY");
      cfg.api_key = env(key_var).value_or("");
      return std::make_shared<LiveBackend>(std::move(cfg));
    }
  }
  throw ConfigError("unhandled backend");
}

int cmd_run(const Settings& s, bool record, const EnvLookup& env, std::ostream& out, std::ostream& err) {
  MethodKind method;
  BackendKind backend_kind;
  EmMode em_mode;
  ConvergenceComparison convergence;
  try {
    method = parse_method_kind(s.str("method", "madam"));
    backend_kind = parse_backend_kind(s.str("backend", record ? "live" : "scripted"));
    em_mode = parse_em_mode(s.str("em-mode", "strict"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const auto conv = s.str("convergence", "normalized");
  if (conv == "normalized") convergence = ConvergenceComparison::normalized_answer;
  else if (conv == "raw") convergence = ConvergenceComparison::raw_answer;
  else throw ConfigError("--convergence must be normalized or raw, got '" + conv + "'");

  const auto corpus_path = s.required("corpus");
  DebateConfig debate;
  debate.max_rounds = s.number<int>("max-rounds", 3);
  debate.shuffle_seed = s.number<std::uint64_t>("seed", 0);
  debate.convergence = convergence;
  if (debate.max_rounds < 1) throw ConfigError("--max-rounds must be >= 1");
  const auto concurrency = s.number<std::size_t>("concurrency", 8);
  const auto reflection_rounds = s.number<int>("reflection-rounds", 2);
  if (concurrency < 1) throw ConfigError("--concurrency must be >= 1");
  if (reflection_rounds < 0) throw ConfigError("--reflection-rounds must be >= 0");

  ModelSettings model;
  model.model_name = s.str("model", "default");
  model.sampling.temperature = s.number<double>("temperature", 0.0);
  model.sampling.max_output_tokens = s.number<int>("max-tokens", 1024);
  model.system_prompt = s.str("system-prompt");

  Corpus corpus;
  try {
    corpus = read_corpus(corpus_path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (corpus.empty()) throw ConfigError("corpus '" + corpus_path + "' has no instances");
  TemplateSet templates = TemplateSet::builtin();
  if (auto dir = s.find("templates")) {
    try {
      templates = TemplateSet::with_overrides(*dir);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }

  std::shared_ptr<ChatBackend> backend;
  try {
    backend = make_backend(s, backend_kind, env);
    if (record) backend = std::make_shared<RecordingBackend>(backend, s.required("recording"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  auto bounded = std::make_shared<BoundedBackend>(backend, concurrency);

  MethodRunner runner;
  runner.kind = method;
  runner.debate = debate;
  runner.reflection_rounds = reflection_rounds;
  RunContext ctx{*bounded, templates, model};

  const bool live = backend_kind == BackendKind::live;
  const auto started = live ? utc_now() : std::string();
  auto run = evaluate_corpus(corpus, runner, ctx, EvalOptions{em_mode, concurrency});
  auto& report = run.report;
  report.metadata = json{{"backend", std::string(to_string(backend_kind))},
                         {"model", model.model_name},
                         {"temperature", model.sampling.temperature},
                         {"max_tokens", model.sampling.max_output_tokens},
                         {"corpus", corpus_path},
                         {"seed", debate.shuffle_seed},
                         {"max_rounds", debate.max_rounds},
                         {"convergence", conv},
                         {"reflection_rounds", reflection_rounds}};
  if (live) {
    report.metadata["started_at"] = started;
    report.metadata["finished_at"] = utc_now();
  }

  if (auto path = s.find("transcripts")) {
    std::string text;
    for (const auto& t : run.traces) text += t.dump() + '\n';
    write_or_throw(*path, text);
  }
  if (auto path = s.find("report")) write_or_throw(*path, report_to_jsonl(report));
  for (const auto& j : report.judgments) {
    if (j.error) err << "instance " << j.instance_id << ": " << *j.error << '\n';
  }
  out << summary_line(report) << '\n';
  return 0;
}

// --- eval ------------------------------------------------------------------------

int cmd_eval(const Settings& s, std::ostream& out, std::ostream& err) {
  EmMode mode;
  MethodKind method;
  try {
    mode = parse_em_mode(s.str("em-mode", "strict"));
    method = parse_method_kind(s.str("method", "madam"));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  Corpus corpus;
  std::map<std::string, json> predictions;
  try {
    corpus = read_corpus(s.required("corpus"));
    for_each_jsonl(s.required("predictions"), [&](const json& j, std::size_t) {
      if (j.value("type", "instance") != "instance") return;
      predictions[j.at("id").get<std::string>()] = j;
    });
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (corpus.empty()) throw ConfigError("corpus has no instances");

  EvalReport report;
  report.method = method;
  report.em_mode = mode;
  for (const auto& inst : corpus) {
    InstanceJudgment j;
    j.instance_id = inst.query.id;
    auto it = predictions.find(inst.query.id);
    if (it == predictions.end()) {
      j.error = "no prediction";
      err << "instance " << j.instance_id << ": no prediction\n";
    } else {
      const auto& p = it->second;
      j.predicted = p.value("predicted", std::vector<std::string>{});
      j.degraded = p.value("degraded", false);
      if (p.contains("usage")) {
        j.usage.input_tokens = p["usage"].value("input_tokens", std::int64_t{0});
        j.usage.output_tokens = p["usage"].value("output_tokens", std::int64_t{0});
        j.usage.calls = p["usage"].value("backend_calls", std::int64_t{0});
      }
      if (p.contains("error")) j.error = p["error"].get<std::string>();
    }
    j.metrics = judge_instance(j.predicted, inst.gold_answers, inst.forbidden_answers, mode);
    report.judgments.push_back(std::move(j));
  }
  summarize(report);
  report.metadata = json{{"predictions", s.str("predictions")}, {"corpus", s.str("corpus")}};
  if (auto path = s.find("report")) write_or_throw(*path, report_to_jsonl(report));
  out << summary_line(report) << '\n';
  return 0;
}

// --- dataset commands --------------------------------------------------------------

int cmd_build(const Settings& s, std::ostream& out, std::ostream& err) {
  ConstructionPolicy policy;
  std::vector<SeedEntry> seeds;
  std::vector<Document> noise;
  std::vector<std::string> distractors;
  try {
    if (auto p = s.find("policy")) {
      std::ifstream in(*p);
      if (!in) throw ConfigError("cannot open policy '" + *p + "'");
      policy = ConstructionPolicy::from_json(json::parse(in));
    }
    policy.rng_seed = s.number<std::uint64_t>("seed", policy.rng_seed);
    seeds = read_seed_entries(s.required("seeds"));
    noise = read_noise_pool(s.required("noise"), policy.chunk_word_budget);
    if (auto d = s.find("distractors")) distractors = read_lines(*d);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const auto out_path = s.required("out");
  auto result = build_corpus(seeds, policy, noise, distractors);
  write_or_throw(out_path, corpus_to_jsonl(result.corpus));
  for (const auto& sk : result.skipped) err << "skipped " << sk.id << ": " << sk.reason << '\n';
  out << "built=" << result.corpus.size() << " skipped=" << result.skipped.size() << " seed=" << policy.rng_seed
      << '\n';
  return 0;
}

int cmd_subset(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto mode = s.required("mode");
  if (mode != "imbalance" && mode != "misinfo") throw ConfigError("--mode must be imbalance or misinfo");
  const int level = s.number<int>("level", 0);
  Corpus corpus;
  std::vector<std::string> distractors;
  try {
    corpus = read_corpus(s.required("corpus"));
    if (auto d = s.find("distractors")) distractors = read_lines(*d);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const auto out_path = s.required("out");
  SubsetResult result;
  try {
    result = mode == "imbalance"
                 ? make_imbalance_subset(corpus, level)
                 : make_misinfo_subset(corpus, level, s.number<std::size_t>("chunk-budget", 100), distractors);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  write_or_throw(out_path, corpus_to_jsonl(result.corpus));
  for (const auto& sk : result.skipped) err << "skipped " << sk.id << ": " << sk.reason << '\n';
  out << "subset mode=" << mode << " level=" << level << " instances=" << result.corpus.size()
      << " skipped=" << result.skipped.size() << '\n';
  return 0;
}

int cmd_stats(const std::string& path, bool as_json, std::ostream& out) {
  Corpus corpus;
  try {
    corpus = read_corpus(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  auto stats = compute_stats(corpus);
  if (as_json) {
    out << to_json_value(stats).dump(2) << '\n';
    return 0;
  }
  out << "instances " << stats.instances << '\n';
  for (const auto* d : stats.dimensions()) {
    out << std::left << std::setw(26) << d->name << " mean=" << std::fixed << std::setprecision(2) << d->mean
        << "  hist={";
    bool first = true;
    for (auto [v, c] : d->histogram) {
      out << (first ? "" : ", ") << v << ": " << c;
      first = false;
    }
    out << "}\n";
  }
  return 0;
}

// --- inspect ---------------------------------------------------------------------

std::string show_answer(const AgentResponse& r) { return r.answer.is_unknown() ? "Unknown" : r.surface_answer; }

void render_transcript(const DebateTranscript& t, std::ostream& out) {
  out << "instance " << t.instance_id << '\n';
  for (std::size_t i = 0; i < t.rounds.size(); ++i) {
    const auto& r = t.rounds[i];
    out << "round " << i + 1 << "  order=[";
    for (std::size_t k = 0; k < r.shuffle_permutation.size(); ++k) out << (k ? ", " : "") << r.shuffle_permutation[k];
    out << "]  seed=" << r.shuffle_seed << '\n';
    for (const auto& resp : r.responses) {
      out << "  agent " << resp.agent_index << ": " << show_answer(resp);
      if (i > 0 && i - 1 < t.rounds.size()) {
        const auto& prev = t.rounds[i - 1].responses;
        auto it = std::find_if(prev.begin(), prev.end(), [&](const AgentResponse& p) {
          return p.agent_index == resp.agent_index;
        });
        if (it != prev.end() && !(it->answer == resp.answer)) out << "  (was " << show_answer(*it) << ")";
      }
      if (resp.degraded) out << "  [degraded]";
      out << '\n';
    }
    const auto& shown = r.aggregate.surface_answers.empty() ? r.aggregate.answers : r.aggregate.surface_answers;
    out << "  aggregate: [" << join(shown, ", ") << "]";
    if (r.aggregate.degraded) out << "  [degraded]";
    out << '\n';
  }
  out << "stopped at round " << t.stop_round << " (" << to_string(t.stop_reason) << ")\n";
  std::int64_t in = 0, outt = 0;
  for (const auto& c : t.usage) {
    in += c.input_tokens;
    outt += c.output_tokens;
  }
  out << "calls=" << t.usage.size() << " input_tokens=" << in << " output_tokens=" << outt << '\n';
}

int cmd_inspect(const std::string& path, const std::string& id, std::ostream& out) {
  std::optional<json> found;
  std::size_t records = 0;
  for_each_jsonl(path, [&](const json& j, std::size_t) {
    ++records;
    if (!found && j.value("instance_id", "") == id) found = j;
  });
  if (records == 0) throw NotFound("transcript file '" + path + "' is empty");
  if (!found) throw NotFound("no transcript for instance '" + id + "' in '" + path + "'");
  if (found->contains("rounds")) {
    render_transcript(transcript_from_json(*found), out);
    if (found->contains("error")) out << "error: " << (*found)["error"].get<std::string>() << '\n';
  } else {
    out << found->dump(2) << '\n';
  }
  return 0;
}

}  // namespace

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Multi-agent debate over retrieved documents: dataset tools, runs and evaluation.", "madam"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "INI settings file (also MADAM_CONFIG)")->type_name("PATH");

  auto* run = app.add_subcommand("run", "run a method over a corpus and score it");
  Settings run_s(run, "run");
  add_run_options(run_s);

  auto* record = app.add_subcommand("record", "like run, and append every backend exchange to --recording");
  Settings record_s(record, "record");
  add_run_options(record_s);

  auto* eval = app.add_subcommand("eval", "score precomputed predictions against a corpus");
  Settings eval_s(eval, "eval");
  eval_s.add("predictions", "JSONL of {id, predicted: [...]} (a run report also works)", "PATH");
  eval_s.add("corpus", "instances with gold answers (JSONL)", "PATH");
  eval_s.add("em-mode", "strict | lenient (default strict)");
  eval_s.add("method", "method label for the summary (default madam)");
  eval_s.add("report", "write per-instance judgments and a summary record here (JSONL)", "PATH");

  auto* build = app.add_subcommand("build", "construct a corpus from seed entries");
  Settings build_s(build, "build");
  build_s.add("seeds", "seed entries (JSONL)", "PATH");
  build_s.add("noise", "noise passage pool (JSONL)", "PATH");
  build_s.add("policy", "construction policy (JSON)", "PATH");
  build_s.add("distractors", "replacement entities, one per line", "PATH");
  build_s.add("seed", "corpus seed (overrides the policy's rng_seed)", "INT");
  build_s.add("out", "output corpus (JSONL)", "PATH");

  auto* subset = app.add_subcommand("subset", "derive a controlled subset from a corpus");
  Settings subset_s(subset, "subset");
  subset_s.add("corpus", "source corpus (JSONL)", "PATH");
  subset_s.add("mode", "imbalance | misinfo");
  subset_s.add("level", "k for imbalance or m for misinfo, in [1, 3]", "INT");
  subset_s.add("distractors", "fallback incorrect alternatives, one per line", "PATH");
  subset_s.add("chunk-budget", "word budget for rewritten documents (default 100)", "INT");
  subset_s.add("out", "output corpus (JSONL)", "PATH");

  auto* stats = app.add_subcommand("stats", "corpus statistics");
  std::string stats_path;
  bool stats_json = false;
  stats->add_option("corpus", stats_path, "corpus (JSONL)")->required()->type_name("PATH");
  stats->add_flag("--json", stats_json, "print JSON instead of a table");

  auto* inspect = app.add_subcommand("inspect", "render one instance's transcript");
  std::string inspect_path, inspect_id;
  inspect->add_option("transcripts", inspect_path, "transcripts file (JSONL)")->required()->type_name("PATH");
  inspect->add_option("id", inspect_id, "instance id")->required();

  std::vector<const char*> argv{"madam"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (config_path.empty()) config_path = env("MADAM_CONFIG").value_or("");
    const auto config = load_config(config_path);
    for (auto* s : {&run_s, &record_s, &eval_s, &build_s, &subset_s}) s->bind(env, config);

    if (run->parsed()) return cmd_run(run_s, false, env, out, err);
    if (record->parsed()) return cmd_run(record_s, true, env, out, err);
    if (eval->parsed()) return cmd_eval(eval_s, out, err);
    if (build->parsed()) return cmd_build(build_s, out, err);
    if (subset->parsed()) return cmd_subset(subset_s, out, err);
    if (stats->parsed()) return cmd_stats(stats_path, stats_json, out);
    if (inspect->parsed()) return cmd_inspect(inspect_path, inspect_id, out);
  } catch (const ConfigError& e) {
    err << "madam: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  } catch (const std::exception& e) {
    err << "madam: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace madam::cli
