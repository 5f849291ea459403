#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "archevol/architecture.hpp"
#include "archevol/error.hpp"
#include "archevol/formats.hpp"
#include "archevol/rewrite.hpp"
#include "archevol/styles.hpp"

namespace archevol {

enum class StepKind { Decision, Automated, Check };
std::string to_string(StepKind k);

/// State shared by the steps of one run: the architecture being evolved and
/// the facts recorded from earlier decisions.
struct PatternContext {
    Architecture architecture;
    Json facts = Json::object();
    std::vector<std::string> log;
};

/// Raised by a decision step when an answer does not validate.
class DecisionError : public Error {
public:
    using Error::Error;
};

struct Step {
    std::string id;
    StepKind kind = StepKind::Automated;
    std::string title;
    /// Decision: the prompt's options for the current context.
    std::function<Json(const PatternContext&)> options;
    /// Decision: validates and records an answer (throws DecisionError).
    std::function<void(PatternContext&, const Json&)> accept;
    /// Automated: performs the step.
    std::function<void(PatternContext&)> run;
    /// Automated: the rule sequence the step is built on, if any; checked
    /// statically when the pattern is defined.
    std::optional<std::string> sequence;
    /// Check: the style to check against.
    std::optional<Style> style;
};

struct EvolutionPattern {
    std::string name;
    std::string description;
    std::vector<Step> steps;
};

/// Throws DefinitionError when step ids repeat or an automated step's rule
/// sequence has a static no-enabler finding.
void validate_pattern(const EvolutionPattern& p);

/// Introduces the client-server style. Steps: names (decision:
/// {server, clients[]}), create, assign (decision: {component: target}),
/// distribute, extra (decision: list of operation descriptors), execute,
/// check.
EvolutionPattern client_server_pattern();

std::vector<EvolutionPattern> builtin_patterns();
std::optional<EvolutionPattern> find_builtin_pattern(const std::string& name);

enum class RunState { AwaitingDecision, Running, Finished, Failed };
std::string to_string(RunState s);

struct TraceEntry {
    std::string step;
    StepKind kind = StepKind::Automated;
    std::string detail;
};

struct DecisionPrompt {
    std::string step;
    std::string title;
    Json options;
};

/// An execution of a pattern. Automated and check steps run eagerly; the
/// run suspends at each decision until `answer` is called for it. A failing
/// step leaves the architecture as it was before that step.
class PatternRun {
public:
    PatternRun(EvolutionPattern pattern, Architecture a);

    RunState state() const { return state_; }
    const Architecture& architecture() const { return ctx_.architecture; }
    const std::vector<TraceEntry>& trace() const { return trace_; }
    const std::optional<ConformanceReport>& report() const { return report_; }
    const std::string& error() const { return error_; }
    const EvolutionPattern& pattern() const { return pattern_; }
    /// Id of the current step; empty once the run is over.
    std::string current_step() const;
    std::optional<DecisionPrompt> pending() const;

    /// True once `step` has received an answer.
    bool answered(const std::string& step) const;
    /// Answers the pending decision and runs on to the next one. An answer
    /// that fails validation fails the run. Throws std::invalid_argument
    /// when `step` is not the pending decision.
    void answer(const std::string& step, const Json& answer);
    /// Fails the run at the pending decision.
    void abandon(const std::string& reason);

    Json to_json() const;

private:
    void advance();
    void fail(const std::string& message);

    EvolutionPattern pattern_;
    PatternContext ctx_;
    std::size_t index_ = 0;
    RunState state_ = RunState::Running;
    std::vector<TraceEntry> trace_;
    std::vector<std::string> answered_;
    std::optional<ConformanceReport> report_;
    std::string error_;
};

struct DecisionScript {
    std::string pattern;
    std::vector<std::pair<std::string, Json>> decisions;
};

Json to_json(const DecisionScript& s);
DecisionScript decision_script_from_json(const Json& j);
DecisionScript load_decision_script(const std::filesystem::path& path);

/// Supplies an answer for a prompt, or nullopt to give up.
using DecisionProvider = std::function<std::optional<Json>(const DecisionPrompt&)>;
DecisionProvider script_provider(DecisionScript script);

/// Runs a pattern to completion (finished or failed) with a provider.
PatternRun run_pattern(const EvolutionPattern& p, const Architecture& a, const DecisionProvider& provider);

}  // namespace archevol
