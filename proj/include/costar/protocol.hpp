#pragma once

#include "costar/backend.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>

namespace costar::protocol {

// Line-delimited JSON over standard streams.
//   backend -> harness, first line:  handshake (a BackendDescriptor)
//   harness -> backend:              {"prefix", "num_candidates", "max_new_tokens"}
//   backend -> harness:              {"candidates": [...], "truncated_flags": [...]}
//                                 or {"error": "..."}

nlohmann::json descriptor_to_json(const BackendDescriptor& d);
/// Throws std::invalid_argument on a schema violation.
BackendDescriptor descriptor_from_json(const nlohmann::json& j);

nlohmann::json request_to_json(const GenerationRequest& req);
GenerationRequest request_from_json(const nlohmann::json& j);

nlohmann::json response_to_json(const GenerationResult& result);
/// Validates the response schema; "error" responses become BackendError.
GenerationResult response_from_json(const nlohmann::json& j);

/// Serves a backend until `in` is exhausted. Malformed requests are answered
/// with an error line and the loop continues.
void serve(Backend& backend, std::istream& in, std::ostream& out);

} // namespace costar::protocol
