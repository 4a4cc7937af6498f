#include <gtest/gtest.h>

#include <atomic>
#include <functional>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "test_support.hpp"

using namespace viewrank;
using json = nlohmann::json;

namespace {

/// In-process scoring service answering POST /score with a user-supplied
/// function of the request inputs.
class StubService {
public:
    using Handler = std::function<json(const std::vector<std::string>&)>;

    explicit StubService(Handler handler) : handler_(std::move(handler)) {
        server_.Post("/score", [this](const httplib::Request& req, httplib::Response& res) {
            const auto body = json::parse(req.body);
            std::vector<std::string> inputs = body.at("inputs").get<std::vector<std::string>>();
            {
                std::lock_guard lock(mutex_);
                batches_.push_back(inputs);
            }
            ++requests_;
            res.set_content(handler_(inputs).dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubService() {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    int requests() const { return requests_; }
    std::vector<std::vector<std::string>> batches() const {
        std::lock_guard lock(mutex_);
        return batches_;
    }

private:
    Handler handler_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
    std::atomic<int> requests_{0};
    mutable std::mutex mutex_;
    std::vector<std::vector<std::string>> batches_;
};

std::vector<RenderedInput> make_inputs(std::size_t n) {
    std::vector<RenderedInput> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(render_input(ConversationalQuery::standalone("q", "query"),
                                   {"p" + std::to_string(i), "doc " + std::to_string(i)}));
    }
    return out;
}

/// Scores each input as its document number divided by 1000.
json index_scores(const std::vector<std::string>& inputs) {
    json scores = json::array();
    for (const auto& text : inputs) {
        const auto pos = text.find("Document: doc ") + 14;
        scores.push_back(std::stod(text.substr(pos)) / 1000.0);
    }
    return {{"scores", scores}};
}

int unused_port() {
    httplib::Server probe;
    return probe.bind_to_any_port("127.0.0.1");  // released when probe goes out of scope
}

}  // namespace

TEST(RemoteScorer, ChunksRequestsAndPreservesOrder) {
    StubService service(index_scores);
    RemoteScorer scorer({service.url(), 100});
    auto inputs = make_inputs(250);
    auto scores = scorer.score(inputs);
    ASSERT_EQ(scores.size(), 250u);
    for (std::size_t i = 0; i < scores.size(); ++i) EXPECT_DOUBLE_EQ(scores[i], static_cast<double>(i) / 1000.0);
    EXPECT_EQ(service.requests(), 3);
    std::vector<std::size_t> sizes;
    for (const auto& b : service.batches()) sizes.push_back(b.size());
    std::sort(sizes.begin(), sizes.end());
    EXPECT_EQ(sizes, (std::vector<std::size_t>{50, 100, 100}));
}

TEST(RemoteScorer, SendsRenderedTextVerbatim) {
    StubService service([](const std::vector<std::string>& in) {
        return json{{"scores", std::vector<double>(in.size(), 0.5)}};
    });
    RemoteScorer scorer({service.url() + "/score"});
    auto inputs = make_inputs(3);
    EXPECT_EQ(scorer.score(inputs), (std::vector<double>{0.5, 0.5, 0.5}));
    ASSERT_EQ(service.batches().size(), 1u);
    EXPECT_EQ(service.batches()[0][1], inputs[1].text);
}

TEST(RemoteScorer, OutOfRangeScoreIsContractViolation) {
    StubService service([](const std::vector<std::string>& in) {
        std::vector<double> s(in.size(), 0.5);
        s.back() = 1.5;
        return json{{"scores", s}};
    });
    RemoteScorer scorer({service.url()});
    auto inputs = make_inputs(4);
    EXPECT_THROW(scorer.score(inputs), ContractViolation);
}

TEST(RemoteScorer, WrongLengthOrShapeIsContractViolation) {
    StubService short_service([](const std::vector<std::string>&) { return json{{"scores", {0.1}}}; });
    auto inputs = make_inputs(2);
    EXPECT_THROW(RemoteScorer({short_service.url()}).score(inputs), ContractViolation);
    StubService bad_service([](const std::vector<std::string>&) { return json{{"logits", {0.1, 0.2}}}; });
    EXPECT_THROW(RemoteScorer({bad_service.url()}).score(inputs), ContractViolation);
}

TEST(RemoteScorer, NetworkFailureCarriesChunkIndex) {
    RemoteScorerOptions opts;
    opts.endpoint = "http://127.0.0.1:" + std::to_string(unused_port());
    opts.batch_size = 10;
    opts.retries = 1;
    opts.timeout = std::chrono::milliseconds(500);
    opts.max_in_flight = 1;
    auto inputs = make_inputs(15);
    try {
        RemoteScorer(opts).score(inputs);
        FAIL() << "expected ServiceError";
    } catch (const ServiceError& e) {
        EXPECT_EQ(e.chunk_index(), 0u);
    }
}

TEST(RemoteScorer, FailureOnLaterChunkReportsThatChunk) {
    StubService service([](const std::vector<std::string>& in) -> json {
        if (in.front().find("Document: doc 20") != std::string::npos) throw std::runtime_error("boom");
        return {{"scores", std::vector<double>(in.size(), 0.25)}};
    });
    RemoteScorerOptions opts{service.url(), 10};
    opts.retries = 0;
    auto inputs = make_inputs(30);
    try {
        RemoteScorer(opts).score(inputs);
        FAIL() << "expected ServiceError";
    } catch (const ServiceError& e) {
        EXPECT_EQ(e.chunk_index(), 2u);
    }
}

TEST(RemoteScorer, RejectsMalformedEndpoints) {
    EXPECT_THROW(RemoteScorer({"localhost:8080"}), InputError);
    EXPECT_THROW(RemoteScorer({"ftp://host/score"}), InputError);
    RemoteScorerOptions zero{"http://127.0.0.1:1", 0};
    EXPECT_THROW(RemoteScorer{zero}, InputError);
}

TEST(RemoteScorer, EmptyBatchSendsNothing) {
    StubService service(index_scores);
    RemoteScorer scorer({service.url()});
    EXPECT_TRUE(scorer.score({}).empty());
    EXPECT_EQ(service.requests(), 0);
}
