#pragma once

#include <istream>
#include <string>

#include "odtomo/graph.hpp"

namespace odtomo {

enum class NetworkFormat { Tntp, Json };

/// TNTP link file: '<KEY> value' metadata lines, '~' comments, then
/// whitespace-separated records "tail head capacity length free_flow_time ... ;".
/// Only tail, head and free-flow time are used; node ids become names "1".."n".
Network read_tntp(std::istream& in, const std::string& source_name = "<stream>");

/// {"nodes": [id, ...], "edges": [{"from": id, "to": id, "time": t}, ...]}
/// Ids may be strings or integers.
Network read_network_json(std::istream& in, const std::string& source_name = "<stream>");

Network load_network(const std::string& path, NetworkFormat format);

/// Format from extension: ".tntp" → Tntp, anything else → Json.
NetworkFormat guess_format(const std::string& path);
NetworkFormat parse_format(const std::string& name);

} // namespace odtomo
