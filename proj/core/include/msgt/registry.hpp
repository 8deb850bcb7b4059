#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msgt/multimap.hpp"
#include "msgt/smallgain.hpp"
#include "msgt/system.hpp"

namespace msgt {

/// Names of the built-in examples: interconnections ("sec5-original",
/// "sec5-positive-form", "multiequil"), multimaps ("zorro", "zorro-eps(E)"),
/// and the per-interconnection subsystem aliases ("sec5-x", "sec5-z", ...).
std::vector<std::string> builtin_names();

std::optional<Interconnection> builtin_interconnection(std::string_view name);
/// Returns null when the name is not a map. "zorro-eps(E)" takes any E >= 0;
/// interconnection names resolve to their loop map k_w o k_y.
MultiMapPtr builtin_multimap(std::string_view name);
std::optional<SystemDef> builtin_system(std::string_view name);

/// Lookup helpers that throw InputError listing the available names.
Interconnection require_interconnection(std::string_view name);
MultiMapPtr require_multimap(std::string_view name);
SystemDef require_system(std::string_view name);

/// One line per entry, for the CLI listing.
std::string registry_listing();

}  // namespace msgt
