#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "viewrank/errors.hpp"
#include "viewrank/scoring.hpp"

namespace viewrank {

namespace {

using json = nlohmann::json;

struct ParsedEndpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;    // <prefix>/score
};

ParsedEndpoint parse_endpoint(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos || url.compare(0, scheme_end, "http") != 0) {
        throw InputError("scorer endpoint must be an http:// URL, got '" + url + "'");
    }
    const auto host_start = scheme_end + 3;
    const auto path_start = url.find('/', host_start);
    ParsedEndpoint ep;
    ep.origin = url.substr(0, path_start);
    if (host_start >= ep.origin.size()) throw InputError("scorer endpoint has no host: '" + url + "'");
    std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    if (prefix.size() >= 6 && prefix.compare(prefix.size() - 6, 6, "/score") == 0) {
        prefix.resize(prefix.size() - 6);
    }
    ep.path = prefix + "/score";
    return ep;
}

std::vector<double> decode_scores(const std::string& body, std::size_t expected, std::size_t chunk) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ContractViolation("chunk " + std::to_string(chunk) + ": response is not JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("scores") || !doc["scores"].is_array()) {
        throw ContractViolation("chunk " + std::to_string(chunk) + ": response lacks a \"scores\" array");
    }
    const auto& arr = doc["scores"];
    if (arr.size() != expected) {
        throw ContractViolation("chunk " + std::to_string(chunk) + ": expected " + std::to_string(expected) +
                                " scores, received " + std::to_string(arr.size()));
    }
    std::vector<double> scores;
    scores.reserve(expected);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) {
            throw ContractViolation("chunk " + std::to_string(chunk) + ": score " + std::to_string(i) +
                                    " is not a number");
        }
        const double s = arr[i].get<double>();
        if (!(s >= 0.0 && s <= 1.0)) {
            throw ContractViolation("chunk " + std::to_string(chunk) + ": score " + std::to_string(s) +
                                    " at position " + std::to_string(i) + " outside [0,1]");
        }
        scores.push_back(s);
    }
    return scores;
}

}  // namespace

struct RemoteScorer::Endpoint : ParsedEndpoint {};

RemoteScorer::RemoteScorer(RemoteScorerOptions options)
    : options_(std::move(options)),
      endpoint_(std::make_unique<Endpoint>(Endpoint{parse_endpoint(options_.endpoint)})) {
    if (options_.batch_size == 0) throw InputError("remote scorer batch size must be at least 1");
    if (options_.retries < 0) throw InputError("remote scorer retries must be non-negative");
    if (options_.max_in_flight == 0) options_.max_in_flight = 1;
}

RemoteScorer::~RemoteScorer() = default;

std::vector<double> RemoteScorer::score(std::span<const RenderedInput> batch) const {
    const auto batch_size = options_.batch_size;
    const auto chunks = (batch.size() + batch_size - 1) / batch_size;
    std::vector<double> scores(batch.size());
    std::vector<std::exception_ptr> failures(chunks);

    auto score_chunk = [&](httplib::Client& client, std::size_t chunk) {
        const auto begin = chunk * batch_size;
        const auto end = std::min(batch.size(), begin + batch_size);
        json request = {{"inputs", json::array()}};
        for (auto i = begin; i < end; ++i) request["inputs"].push_back(batch[i].text);
        const auto body = request.dump();

        std::string last_error;
        for (int attempt = 0; attempt <= options_.retries; ++attempt) {
            auto res = client.Post(endpoint_->path, body, "application/json");
            if (!res) {
                last_error = httplib::to_string(res.error());
                continue;
            }
            if (res->status == 200) {
                auto decoded = decode_scores(res->body, end - begin, chunk);
                std::copy(decoded.begin(), decoded.end(), scores.begin() + static_cast<std::ptrdiff_t>(begin));
                return;
            }
            last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
            if (res->status < 500) break;
        }
        throw ServiceError("remote scorer failed on chunk " + std::to_string(chunk) + " after " +
                               std::to_string(options_.retries + 1) + " attempt(s): " + last_error,
                           chunk);
    };

    const auto timeout = options_.timeout;
    auto make_client = [&] {
        auto client = std::make_unique<httplib::Client>(endpoint_->origin);
        client->set_connection_timeout(timeout);
        client->set_read_timeout(timeout);
        client->set_write_timeout(timeout);
        return client;
    };

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        auto client = make_client();
        for (auto chunk = next++; chunk < chunks; chunk = next++) {
            try {
                score_chunk(*client, chunk);
            } catch (...) {
                failures[chunk] = std::current_exception();
            }
        }
    };

    const auto workers = std::min(options_.max_in_flight, chunks);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
    return scores;
}

}  // namespace viewrank
