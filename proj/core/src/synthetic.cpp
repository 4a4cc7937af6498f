#include "viewrank/synthetic.hpp"

#include <algorithm>
#include <random>

namespace viewrank {
namespace {

class Generator {
public:
    explicit Generator(std::uint64_t seed) : rng_(seed) {}

    std::size_t below(std::size_t n) {
        const std::uint64_t threshold = (0 - static_cast<std::uint64_t>(n)) % n;
        for (;;) {
            const auto r = rng_();
            if (r >= threshold) return static_cast<std::size_t>(r % n);
        }
    }

    std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

    template <typename T>
    std::vector<T> pick(const std::vector<T>& from, std::size_t n) {
        auto copy = from;
        shuffle(copy);
        copy.resize(std::min(n, copy.size()));
        return copy;
    }

    // Pronounceable pseudo-words ending in "x".
    std::string word() {
        static const char* const onsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
        static const char* const vowels[] = {"a", "e", "i", "o", "u"};
        std::string w;
        const auto syllables = between(3, 4);
        for (std::size_t s = 0; s < syllables; ++s) {
            w += onsets[below(std::size(onsets))];
            w += vowels[below(std::size(vowels))];
        }
        return w + "x";
    }

private:
    std::mt19937_64 rng_;
};

std::string join(const std::vector<std::string>& words) {
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) out += ' ';
        out += w;
    }
    return out;
}

}  // namespace

SyntheticDataset make_ambiguous_dataset(const SyntheticOptions& options) {
    Generator gen(options.seed);
    std::set<std::string> used;
    auto fresh_words = [&](std::size_t n) {
        std::vector<std::string> out;
        while (out.size() < n) {
            auto w = gen.word();
            if (used.insert(w).second) out.push_back(std::move(w));
        }
        return out;
    };

    const auto filler = fresh_words(300);
    SyntheticDataset data;

    for (std::size_t t = 0; t < options.topics; ++t) {
        const auto topic_id = "T" + std::to_string(t + 1);
        const auto entity = fresh_words(1).front();
        const auto intended_vocab = fresh_words(12);
        const auto other_vocab = fresh_words(12);
        const std::vector<std::string> answer_words(intended_vocab.begin(), intended_vocab.begin() + 6);

        const auto qid = make_query_id(topic_id, 2);
        auto make_passage = [&](const std::string& id, std::vector<std::string> words) {
            gen.shuffle(words);
            data.collection.add({id, join(words)});
        };

        for (std::size_t j = 0; j < options.passages_per_sense; ++j) {
            const auto id = topic_id + "-a" + std::to_string(j + 1);
            std::vector<std::string> words{entity};
            const auto from_answer = gen.pick(answer_words, gen.between(2, 3));
            const auto from_sense = gen.pick(std::vector<std::string>(intended_vocab.begin() + 6, intended_vocab.end()),
                                             gen.between(1, 2));
            words.insert(words.end(), from_answer.begin(), from_answer.end());
            words.insert(words.end(), from_sense.begin(), from_sense.end());
            for (std::size_t f = gen.between(6, 10); f > 0; --f) words.push_back(filler[gen.below(filler.size())]);
            make_passage(id, std::move(words));
            data.intended[qid].insert(id);
            data.qrels.set(qid, id, static_cast<int>(std::min<std::size_t>(3, from_answer.size() - 1 + from_sense.size())));
        }
        for (std::size_t j = 0; j < options.passages_per_sense; ++j) {
            const auto id = topic_id + "-b" + std::to_string(j + 1);
            std::vector<std::string> words{entity};
            const auto from_sense = gen.pick(other_vocab, gen.between(3, 5));
            words.insert(words.end(), from_sense.begin(), from_sense.end());
            for (std::size_t f = gen.between(6, 10); f > 0; --f) words.push_back(filler[gen.below(filler.size())]);
            make_passage(id, std::move(words));
            data.other[qid].insert(id);
            data.qrels.set(qid, id, 0);
        }
        for (std::size_t j = 0; j < options.noise_per_topic; ++j) {
            const auto id = topic_id + "-n" + std::to_string(j + 1);
            std::vector<std::string> words{answer_words[gen.below(answer_words.size())]};
            for (std::size_t f = gen.between(8, 12); f > 0; --f) words.push_back(filler[gen.below(filler.size())]);
            make_passage(id, std::move(words));
        }

        ConversationalQuery first;
        first.topic_id = topic_id;
        first.turn = 1;
        first.utterance = "Tell me about " + entity + ".";
        first.query_id = make_query_id(topic_id, 1);

        ConversationalQuery second;
        second.topic_id = topic_id;
        second.turn = 2;
        second.utterance = "What is it known for?";
        second.history = {first.utterance};
        second.query_id = qid;

        data.topics.sources.push_back({first.query_id, "Tell me about " + entity, ""});
        data.topics.sources.push_back({qid, "What is " + entity + " known for?",
                                       "It is known for " + join(answer_words) + "."});
        data.topics.queries.push_back(std::move(first));
        data.topics.queries.push_back(std::move(second));
    }
    return data;
}

}  // namespace viewrank
