#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "medse/corpus.hpp"
#include "medse/rng.hpp"

namespace medse {

enum class DedupStrategy { naive, remove, replace };

DedupStrategy dedup_strategy_from_string(const std::string& s);
std::string to_string(DedupStrategy s);

// One training batch: sentences plus at most one assigned entity each.
// entity_subset_indices lists exactly the positions with an assignment.
struct Batch {
  std::vector<Sentence> sentences;
  std::vector<std::optional<EntityMention>> assignments;
  std::vector<int> entity_subset_indices;
};

// Cycles over a fixed sentence list, reshuffling deterministically at every
// epoch boundary.
class SentenceStream {
 public:
  SentenceStream(std::vector<Sentence> sentences, uint64_t seed);
  const Sentence& next();
  std::size_t size() const { return sentences_.size(); }

 private:
  void reshuffle();
  std::vector<Sentence> sentences_;
  std::vector<int> order_;
  std::size_t pos_ = 0;
  uint64_t seed_;
  uint64_t epoch_ = 0;
};

// Picks one mention uniformly at random among the sentence's dictionary
// mentions.
EntityMention assign_entity(const Sentence& sentence, Rng& rng);

// Draws `size` sentences from the stream, assigns entities, and enforces the
// duplicate-entity strategy. `pool` backs the replace strategy.
Batch make_batch(SentenceStream& stream, int size, DedupStrategy strategy,
                 const std::vector<Sentence>& pool, Rng& rng);

struct CollisionEstimate {
  double p_any_duplicate = 0.0;
  double mean_unique_fraction = 0.0;
};

// Monte-Carlo duplicate statistics for batches of entities drawn iid from
// the given frequency distribution.
CollisionEstimate duplicate_collision_rate(const std::map<std::string, double>& distribution,
                                           int batch_size, long long trials, uint64_t rng_seed);

// Closed-form birthday probability for a uniform distribution over k ids.
double uniform_collision_probability(int k, int batch_size);

}  // namespace medse
