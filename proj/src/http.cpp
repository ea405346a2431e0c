#include "privstory/http.hpp"

#include "privstory/error.hpp"

#include <httplib.h>

#include <cstdlib>

namespace privstory {

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path prefix without trailing slash
};

Endpoint split_base_url(const std::string &base_url) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw GatewayError("base URL must include a scheme: " + base_url);
    }
    const auto path_start = base_url.find('/', scheme_end + 3);
    Endpoint e;
    e.origin = base_url.substr(0, path_start);
    e.prefix = path_start == std::string::npos ? "" : base_url.substr(path_start);
    while (!e.prefix.empty() && e.prefix.back() == '/') {
        e.prefix.pop_back();
    }
    return e;
}

}  // namespace

HttpResponse post_json(const std::string &base_url, const std::string &path, const std::string &body,
                       const std::string &bearer_token, std::chrono::seconds timeout) {
    const Endpoint endpoint = split_base_url(base_url);
    httplib::Client client(endpoint.origin);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!bearer_token.empty()) {
        headers.emplace("Authorization", "Bearer " + bearer_token);
    }
    auto result = client.Post(endpoint.prefix + path, headers, body, "application/json");
    if (!result) {
        throw GatewayError("request to " + base_url + path + " failed: " + httplib::to_string(result.error()), true);
    }
    return HttpResponse{result->status, result->body};
}

std::string env_or_empty(const char *name) {
    const char *v = std::getenv(name);
    return v ? std::string(v) : std::string();
}

}  // namespace privstory
