#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "medse/corpus.hpp"
#include "medse/sts.hpp"

namespace medse {

// Knobs for the generated desk-scale corpus. Entity usage follows a Zipf
// distribution over entity ranks; when top_decile_target > 0 the exponent is
// calibrated so the expected share of the top 10% entities hits the target.
struct SynthConfig {
  int entity_count = 48;
  int topic_count = 6;
  double zipf_exponent = 1.1;
  double top_decile_target = 0.0;  // 0 disables calibration
  int entity_template_count = 12;  // capped at the built-in template set
  int none_template_count = 6;
  int sentence_count = 6000;
  double none_fraction = 0.25;       // share of sentences without entities
  double two_entity_fraction = 0.15; // share of entity sentences with two slots
  int sts_pair_count = 300;
  double sts_train_fraction = 0.6;
};

struct SynthOutput {
  std::vector<std::string> raw_documents;
  DefinitionDictionary dictionary;
  std::vector<STSPair> sts_train;
  std::vector<STSPair> sts_test;
};

SynthOutput generate_synthetic_corpus(const SynthConfig& config, uint64_t rng_seed);

// Expected top-10% occurrence share of a Zipf(s) distribution over k ranks.
double zipf_top_decile_share(int k, double s);

// Exponent whose expected top-decile share matches `target`.
double calibrate_zipf_exponent(int k, double target);

}  // namespace medse
