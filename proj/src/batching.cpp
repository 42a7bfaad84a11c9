#include "medse/batching.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace medse {

DedupStrategy dedup_strategy_from_string(const std::string& s) {
  if (s == "naive") return DedupStrategy::naive;
  if (s == "remove") return DedupStrategy::remove;
  if (s == "replace") return DedupStrategy::replace;
  throw std::invalid_argument("unknown dedup strategy: " + s);
}

std::string to_string(DedupStrategy s) {
  switch (s) {
    case DedupStrategy::naive: return "naive";
    case DedupStrategy::remove: return "remove";
    case DedupStrategy::replace: return "replace";
  }
  return "?";
}

SentenceStream::SentenceStream(std::vector<Sentence> sentences, uint64_t seed)
    : sentences_(std::move(sentences)), seed_(seed) {
  if (sentences_.empty()) throw std::invalid_argument("SentenceStream: empty sentence list");
  order_.resize(sentences_.size());
  std::iota(order_.begin(), order_.end(), 0);
  reshuffle();
}

void SentenceStream::reshuffle() {
  Rng rng(Rng::mix({seed_, 0x73747265616dULL, epoch_}));
  rng.shuffle(order_.begin(), order_.end());
}

const Sentence& SentenceStream::next() {
  if (pos_ == order_.size()) {
    pos_ = 0;
    ++epoch_;
    reshuffle();
  }
  return sentences_[order_[pos_++]];
}

EntityMention assign_entity(const Sentence& sentence, Rng& rng) {
  if (sentence.mentions.empty())
    throw std::invalid_argument("assign_entity: sentence '" + sentence.id + "' has no mentions");
  return sentence.mentions[rng.uniform_int(int(sentence.mentions.size()))];
}

Batch make_batch(SentenceStream& stream, int size, DedupStrategy strategy,
                 const std::vector<Sentence>& pool, Rng& rng) {
  if (size < 1) throw std::invalid_argument("make_batch: size must be >= 1");
  if (strategy == DedupStrategy::replace && pool.empty())
    throw std::invalid_argument("make_batch: replace strategy needs a non-empty pool");

  Batch batch;
  for (int i = 0; i < size; ++i) {
    const Sentence& s = stream.next();
    batch.sentences.push_back(s);
    if (s.mentions.empty()) batch.assignments.emplace_back(std::nullopt);
    else batch.assignments.emplace_back(assign_entity(s, rng));
  }

  if (strategy == DedupStrategy::remove) {
    Batch kept;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < batch.sentences.size(); ++i) {
      if (batch.assignments[i] && !seen.insert(batch.assignments[i]->entity_id).second)
        continue;  // later duplicate dropped; batch may shrink
      kept.sentences.push_back(std::move(batch.sentences[i]));
      kept.assignments.push_back(std::move(batch.assignments[i]));
    }
    batch = std::move(kept);
  } else if (strategy == DedupStrategy::replace) {
    const long long budget = 10LL * size;
    long long used = 0;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < batch.sentences.size(); ++i) {
      if (!batch.assignments[i]) continue;
      while (!seen.insert(batch.assignments[i]->entity_id).second) {
        if (++used > budget) {
          std::set<std::string> pool_ids;
          for (const Sentence& s : pool)
            for (const EntityMention& m : s.mentions) pool_ids.insert(m.entity_id);
          throw std::runtime_error(
              "make_batch: replace budget exhausted; pool has " +
              std::to_string(pool_ids.size()) + " unique entities, batch needs " +
              std::to_string(size));
        }
        const Sentence& fresh = pool[rng.uniform_int(int(pool.size()))];
        batch.sentences[i] = fresh;
        batch.assignments[i] = assign_entity(fresh, rng);
      }
    }
  }

  for (std::size_t i = 0; i < batch.assignments.size(); ++i)
    if (batch.assignments[i]) batch.entity_subset_indices.push_back(int(i));
  return batch;
}

CollisionEstimate duplicate_collision_rate(const std::map<std::string, double>& distribution,
                                           int batch_size, long long trials, uint64_t rng_seed) {
  if (trials < 1) throw std::invalid_argument("duplicate_collision_rate: trials must be >= 1");
  if (distribution.empty())
    throw std::invalid_argument("duplicate_collision_rate: empty distribution");
  if (batch_size < 1) throw std::invalid_argument("duplicate_collision_rate: batch_size >= 1");

  std::vector<double> cdf;
  cdf.reserve(distribution.size());
  double total = 0.0;
  for (const auto& [id, w] : distribution) {
    if (w < 0.0) throw std::invalid_argument("duplicate_collision_rate: negative weight");
    total += w;
    cdf.push_back(total);
  }
  if (total <= 0.0) throw std::invalid_argument("duplicate_collision_rate: zero-mass distribution");
  for (double& v : cdf) v /= total;

  // Each trial draws from its own stream and both accumulators are integer,
  // so the result is identical for any thread count.
  long long collisions = 0;
  long long unique_total = 0;
#pragma omp parallel for schedule(static) reduction(+ : collisions, unique_total)
  for (long long t = 0; t < trials; ++t) {
    Rng rng(Rng::mix({rng_seed, 0x636f6cULL, uint64_t(t)}));
    std::vector<int> drawn(batch_size);
    for (int i = 0; i < batch_size; ++i) {
      double u = rng.uniform();
      drawn[i] = int(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    }
    std::sort(drawn.begin(), drawn.end());
    int unique = int(std::unique(drawn.begin(), drawn.end()) - drawn.begin());
    if (unique < batch_size) ++collisions;
    unique_total += unique;
  }

  CollisionEstimate est;
  est.p_any_duplicate = double(collisions) / double(trials);
  est.mean_unique_fraction = double(unique_total) / (double(trials) * double(batch_size));
  return est;
}

double uniform_collision_probability(int k, int batch_size) {
  double p_distinct = 1.0;
  for (int i = 0; i < batch_size; ++i) p_distinct *= 1.0 - double(i) / double(k);
  return 1.0 - p_distinct;
}

}  // namespace medse
