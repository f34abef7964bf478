#pragma once

#include <memory>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ccql/errors.hpp"
#include "ccql/rpc.hpp"

namespace ccql {

// JSON-RPC 2.0 over HTTP POST, the protocol spoken by bitcoind and geth.
class HttpJsonRpcTransport : public RpcTransport {
public:
    explicit HttpJsonRpcTransport(const std::string& endpoint) {
        auto slash = endpoint.find('/', endpoint.find("//") + 2);
        if (endpoint.find("//") == std::string::npos) {
            base_ = endpoint;
            path_ = "/";
        } else if (slash == std::string::npos) {
            base_ = endpoint;
            path_ = "/";
        } else {
            base_ = endpoint.substr(0, slash);
            path_ = endpoint.substr(slash);
        }
    }

    nlohmann::json call(const std::string& method, const nlohmann::json& params) override {
        nlohmann::json request = {
            {"jsonrpc", "2.0"}, {"id", 1}, {"method", method}, {"params", params}};
        httplib::Client client(base_);
        client.set_connection_timeout(5, 0);
        client.set_read_timeout(30, 0);
        auto res = client.Post(path_, request.dump(), "application/json");
        if (!res) {
            throw AdapterUnavailable("rpc endpoint " + base_ + " unreachable");
        }
        if (res->status != 200 && res->status != 500) {
            throw AdapterUnavailable("rpc endpoint " + base_ + " returned HTTP " +
                                     std::to_string(res->status));
        }
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception&) {
            throw AdapterUnavailable("rpc endpoint returned invalid JSON");
        }
        if (doc.contains("error") && !doc.at("error").is_null()) {
            const auto& err = doc.at("error");
            std::string message = err.value("message", "rpc error");
            // RPC_INVALID_ADDRESS_OR_KEY: the entity does not exist
            if (err.value("code", 0) == -5) throw NotFound(message);
            throw AdapterUnavailable(message);
        }
        return doc.value("result", nlohmann::json());
    }

private:
    std::string base_;
    std::string path_;
};

inline RpcAdapterFactory http_rpc_factory() {
    return [](const SourceConfigEntry& entry) {
        return make_rpc_adapter(entry,
                                std::make_shared<HttpJsonRpcTransport>(entry.location));
    };
}

}  // namespace ccql
