#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "viewrank/datamodel.hpp"
#include "viewrank/formats.hpp"

namespace viewrank {

struct SyntheticOptions {
    std::size_t topics = 10;
    std::size_t passages_per_sense = 20;
    std::size_t noise_per_topic = 10;
    std::uint64_t seed = 7;
};

/// Toy conversational collection with one ambiguous entity per topic.
///
/// Every topic has two sense clusters that share the entity name. The second
/// turn's rewrite mentions only the entity, so it matches both clusters; its
/// answer uses vocabulary of the intended cluster only. Qrels grade intended
/// passages 1..3 and everything else 0.
struct SyntheticDataset {
    PassageCollection collection;
    TopicSet topics;
    Qrels qrels;
    std::map<std::string, std::set<std::string>> intended;  // query id -> passage ids
    std::map<std::string, std::set<std::string>> other;
};

SyntheticDataset make_ambiguous_dataset(const SyntheticOptions& options = {});

}  // namespace viewrank
