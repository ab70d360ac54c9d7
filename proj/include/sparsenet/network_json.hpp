#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sparsenet/network.hpp"

namespace sparsenet {

/// {"activation": "softplus", "layers": [[[row], [row], ...], ...]}
/// with row-major matrices. Doubles are written in shortest round-trip
/// form, so read(write(net)) reproduces every weight bit for bit.
nlohmann::json network_to_json(const Network& net);

/// Throws ConfigError on malformed documents.
Network network_from_json(const nlohmann::json& doc);

void save_network(const Network& net, const std::filesystem::path& path);
Network load_network(const std::filesystem::path& path);

}  // namespace sparsenet
