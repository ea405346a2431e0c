#pragma once

#include <chrono>
#include <string>

namespace privstory {

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// POSTs a JSON body to `base_url` + `path`. `base_url` may carry a path prefix
/// ("https://host/v1"). Transport failures throw GatewayError(retryable = true).
[[nodiscard]] HttpResponse post_json(const std::string &base_url, const std::string &path, const std::string &body,
                                     const std::string &bearer_token, std::chrono::seconds timeout);

/// Reads an environment variable, empty when unset.
[[nodiscard]] std::string env_or_empty(const char *name);

}  // namespace privstory
