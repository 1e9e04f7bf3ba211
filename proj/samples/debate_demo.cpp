// Runs a scripted debate over the Michael Jordan example and prints each round.

#include <iostream>

#include "madam/madam.hpp"

int main() {
  const std::string dir = MADAM_FIXTURES_DIR;
  auto instance = madam::read_corpus(dir + "/jordan.jsonl").at(0);
  madam::ScriptedBackend backend(madam::Script::load(dir + "/jordan_debate_script.json"));
  auto templates = madam::TemplateSet::builtin();
  madam::RunContext ctx{backend, templates, madam::ModelSettings{}};

  auto t = madam::run_debate(ctx, instance.query, instance.documents, madam::DebateConfig{});
  for (const auto& round : t.rounds) {
    std::cout << "round " << round.aggregate.round << '\n';
    for (const auto& r : round.responses) {
      std::cout << "  agent " << r.agent_index << ": " << (r.answer.is_unknown() ? "Unknown" : r.surface_answer)
                << '\n';
    }
    std::cout << "  aggregate: " << madam::join(round.aggregate.surface_answers, ", ") << '\n';
  }
  std::cout << "stopped at round " << t.stop_round << " (" << madam::to_string(t.stop_reason) << "), "
            << t.usage.size() << " calls\n";
}
