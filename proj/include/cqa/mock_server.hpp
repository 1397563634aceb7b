// Copyright 2026 the cqabench authors
// SPDX-License-Identifier: Apache-2.0
//
// HTTP wrapper around a MockScript: a real chat-completions server for live
// smoke tests of the HTTP transport and for `mock serve`.

#pragma once

#if __has_include(<openssl/ssl.h>)
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <string>
#include <thread>

#include "cqa/mock.hpp"

namespace cqa {

/// Serves a script over HTTP. listen() blocks; start()/stop() run the server
/// on a background thread for in-process tests.
class MockServer {
public:
    explicit MockServer(MockScript script) : script_(std::move(script)) {
        server_.Post(R"(.*chat/completions)", [this](const httplib::Request& req,
                                                     httplib::Response& res) {
            handle(req, res);
        });
    }

    ~MockServer() { stop(); }

    /// Blocking; returns false if the port cannot be bound.
    bool listen(const std::string& host, int port) { return server_.listen(host, port); }

    /// Background variant binding an OS-assigned port; returns that port.
    int start(const std::string& host = "127.0.0.1") {
        int port = server_.bind_to_any_port(host);
        if (port <= 0) return -1;
        thread_ = std::thread([this]() { server_.listen_after_bind(); });
        server_.wait_until_ready();
        return port;
    }

    void stop() {
        if (server_.is_running()) server_.stop();
        if (thread_.joinable()) thread_.join();
    }

private:
    void handle(const httplib::Request& req, httplib::Response& res) {
        std::string system_prompt, user_prompt;
        int max_tokens = 32768;
        try {
            json body = json::parse(req.body);
            for (const auto& msg : body.at("messages")) {
                std::string role = msg.value("role", "");
                if (role == "system") system_prompt = msg.value("content", "");
                if (role == "user") user_prompt = msg.value("content", "");
            }
            max_tokens = body.value("max_tokens", max_tokens);
        } catch (const json::exception& ex) {
            res.status = 400;
            res.set_content(std::string("bad request: ") + ex.what(), "text/plain");
            return;
        }
        TransportReply reply = scripted_reply(script_, system_prompt, user_prompt, max_tokens);
        res.status = reply.status;
        res.set_content(reply.body, reply.status == 200 ? "application/json" : "text/plain");
    }

    MockScript script_;
    httplib::Server server_;
    std::thread thread_;
};

}  // namespace cqa
