#pragma once

#include "tsm/diagnostic.hpp"
#include "tsm/model.hpp"

#include <vector>

namespace tsm::detail {

/// Static checks shared by the parser and validateModel. When `resolved` is
/// non-null it receives a copy of `model` with named types resolved and every
/// expression replaced by its type-checked form.
std::vector<Diagnostic> checkModel(const Model& model, Model* resolved);

} // namespace tsm::detail
