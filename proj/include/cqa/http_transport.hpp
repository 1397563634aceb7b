// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// Real HTTP transport for chat-completions endpoints. Kept out of client.hpp
// so test binaries that only need the transport interface do not pay for the
// HTTP library; include this header (or cqa.hpp) where live traffic is
// needed. TLS is enabled when OpenSSL headers are available at build time.

#pragma once

#if __has_include(<openssl/ssl.h>)
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <memory>
#include <string>

#include "cqa/client.hpp"

namespace cqa {

namespace detail {

struct SplitUrl {
    std::string scheme_host_port;  // e.g. "http://127.0.0.1:8080"
    std::string path_prefix;       // e.g. "/v1", no trailing slash
};

inline SplitUrl split_base_url(const std::string& base_url) {
    SplitUrl out;
    std::size_t scheme_end = base_url.find("://");
    std::size_t path_start =
        scheme_end == std::string::npos ? base_url.find('/') : base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        out.scheme_host_port = base_url;
    } else {
        out.scheme_host_port = base_url.substr(0, path_start);
        out.path_prefix = base_url.substr(path_start);
    }
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
    return out;
}

inline std::string completions_path(const std::string& path_prefix) {
    const std::string suffix = "/chat/completions";
    if (path_prefix.size() >= suffix.size() &&
        path_prefix.compare(path_prefix.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return path_prefix;
    }
    return path_prefix + suffix;
}

}  // namespace detail

/// Blocking chat-completions POST over httplib. The base URL's path component
/// is kept as a prefix, so "https://host/v1" posts to "/v1/chat/completions";
/// a base URL that already names the completions route is used verbatim.
class HttpTransport : public ChatTransport {
public:
    TransportReply send(const ChatRequest& req) override {
        detail::SplitUrl url = detail::split_base_url(req.base_url);
        httplib::Client client(url.scheme_host_port);
        client.set_connection_timeout(req.timeout_s, 0);
        client.set_read_timeout(req.timeout_s, 0);
        client.set_write_timeout(req.timeout_s, 0);

        httplib::Headers headers;
        if (!req.auth_token.empty()) {
            headers.emplace("Authorization", "Bearer " + req.auth_token);
        }

        std::string body = chat_request_body(req).dump();
        httplib::Result result =
            client.Post(detail::completions_path(url.path_prefix), headers, body, "application/json");

        TransportReply reply;
        if (!result) {
            reply.status = 0;
            reply.error = httplib::to_string(result.error());
            return reply;
        }
        reply.status = result->status;
        reply.body = result->body;
        for (const auto& [key, value] : result->headers) {
            reply.headers.emplace(key, value);  // first value wins on duplicates
        }
        return reply;
    }
};

}  // namespace cqa
