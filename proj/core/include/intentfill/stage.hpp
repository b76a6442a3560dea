#pragma once

namespace intentfill {

/// Generation stage: intent inference (reasoning + docstring) or code.
enum class Stage { Intent, Code };

}  // namespace intentfill
