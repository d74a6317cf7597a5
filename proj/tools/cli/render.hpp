#pragma once

#include "tsm/analysis.hpp"
#include "tsm/diagnostic.hpp"
#include "tsm/model.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace tsm::cli {

using json = nlohmann::ordered_json;

/// `{name: canonical}`; bools and ints stay native so JSON clients can use them.
json envJson(const Env& env);
json valueJson(const Value& value);
json actionJson(const Model& model, const ActionInstance& action);
json spanJson(const SourceSpan& span);
json diagnosticJson(const Diagnostic& d);
json questionJson(const QuestionItem& q);
json modelSummaryJson(const Model& model);
json diffJson(const ModelDiff& diff);

/// Prompt shown when an action has no matching rule.
std::string undefinedPrompt(const ActionInstance& action, const StateEnv& state);

} // namespace tsm::cli
