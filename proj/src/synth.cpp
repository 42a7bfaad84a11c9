#include "medse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "medse/rng.hpp"

namespace medse {

namespace {

// Sentence templates. {E}/{E2} are entity slots, {W} topic-word slots,
// {G} neutral filler slots. Every template keeps at least 10 words even
// with single-word slot fills, so generated sentences survive the default
// length filter.
const std::vector<std::string> kEntityTemplates = {
    "the patient was admitted with {E} and showed {W} {W} during the first night",
    "clinical notes describe {E} with persistent {W} and intermittent {W} over several days",
    "history includes {E} managed with {W} therapy and daily {W} monitoring at home",
    "examination revealed {E} accompanied by {W} signs and stable {W} readings overnight",
    "the team documented {E} after repeated reports of {W} episodes and {W} complaints",
    "followup confirmed {E} with improving {W} status and reduced {W} burden since discharge",
    "imaging was consistent with {E} showing {W} changes near the {W} region",
    "records mention {E} complicated by {W} events requiring {W} support every morning",
    "assessment notes ongoing {E} with {W} fluctuations and occasional {W} spikes at rest",
    "the consult flagged {E} given recent {W} findings and elevated {W} markers",
};
const std::vector<std::string> kTwoEntityTemplates = {
    "the chart lists {E} together with {E2} plus recurring {W} issues this week",
    "differential included {E} versus {E2} pending further {W} testing and {W} review",
};
const std::vector<std::string> kNoneTemplates = {
    "the morning team reviewed the {G} chart and updated the {G} plan before rounds",
    "staff confirmed the {G} schedule and arranged {G} transport for later this afternoon",
    "family meeting covered the {G} summary and the plan for {G} support at home",
    "nursing notes list stable {G} checks with no new {G} concerns overnight",
    "the unit completed its {G} review and filed the {G} paperwork on time",
    "discharge planning discussed {G} followup visits and pending {G} results with the patient",
};
const std::vector<std::string> kDefinitionTemplates = {
    "{S} is a {W} {W} disorder of the {W} system often marked by {W} and {W}",
    "{S} refers to a {W} condition involving {W} and {W} with typical {W} features",
    "{S} denotes a {W} {W} syndrome associated with {W} episodes and {W} findings",
};
const std::vector<std::string> kGeneralBank = {
    "routine",  "standard", "weekly",   "regular", "careful",  "initial",
    "updated",  "complete", "ordinary", "planned", "detailed", "current",
    "brief",    "usual",    "formal",   "general", "basic",    "final",
    "periodic", "simple",   "combined", "written", "joint",    "open",
};
const std::vector<std::string> kSyllables = {
    "ba", "ce", "di",  "fo",  "gu",  "ka",  "le",  "mi",  "no",  "pu",
    "ra", "se", "ti",  "vo",  "wa",  "ze",  "bra", "cli", "dor", "fen",
    "gly", "lim", "nor", "pla", "sta", "tro", "vex", "zan",
};
constexpr int kTopicBankSize = 8;
constexpr int kDefinitionTopicWords = 5;

std::string make_pseudo_word(Rng& rng, std::set<std::string>& used) {
  for (;;) {
    int n = 2 + rng.uniform_int(2);
    std::string w;
    for (int i = 0; i < n; ++i) w += kSyllables[rng.uniform_int(int(kSyllables.size()))];
    if (used.insert(w).second) return w;
  }
}

struct SynthEntity {
  std::string id;
  std::string surface;
  int topic = 0;
  std::set<std::string> definition_words;  // topic words used in the definition
  std::string definition;
};

struct Realization {
  int template_idx = -1;       // into entity or none templates
  bool has_entity = false;
  int entity = -1;
  int entity2 = -1;            // -1 unless a two-entity template
  std::vector<std::string> fills;  // one per {W}/{G} slot, in order
};

class Generator {
 public:
  Generator(const SynthConfig& cfg, uint64_t seed) : cfg_(cfg) {
    if (cfg.entity_count <= 0 && cfg.none_fraction < 1.0)
      throw std::invalid_argument(
          "generate_synthetic_corpus: entity templates requested with zero entities");
    if (cfg.topic_count <= 0) throw std::invalid_argument("topic_count must be positive");

    Rng words_rng(Rng::mix({seed, 1}));
    std::set<std::string> used(kGeneralBank.begin(), kGeneralBank.end());
    topics_.resize(cfg.topic_count);
    for (auto& bank : topics_) {
      for (int i = 0; i < kTopicBankSize; ++i) bank.push_back(make_pseudo_word(words_rng, used));
    }

    Rng ent_rng(Rng::mix({seed, 2}));
    entities_.resize(std::max(0, cfg.entity_count));
    for (int e = 0; e < cfg.entity_count; ++e) {
      SynthEntity& ent = entities_[e];
      char buf[16];
      std::snprintf(buf, sizeof(buf), "e%03d", e);
      ent.id = buf;
      ent.surface = make_pseudo_word(ent_rng, used);
      if (ent_rng.uniform() < 0.4) ent.surface += " " + make_pseudo_word(ent_rng, used);
      ent.topic = ent_rng.uniform_int(cfg.topic_count);

      const auto& bank = topics_[ent.topic];
      std::vector<int> order(bank.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
      ent_rng.shuffle(order.begin(), order.end());
      std::vector<std::string> def_words;
      for (int i = 0; i < kDefinitionTopicWords; ++i) {
        def_words.push_back(bank[order[i]]);
        ent.definition_words.insert(bank[order[i]]);
      }
      ent.definition = fill_template(kDefinitionTemplates[e % kDefinitionTemplates.size()],
                                     ent.surface, "", def_words) + " .";
    }

    double s = cfg.zipf_exponent;
    if (cfg.top_decile_target > 0.0) s = calibrate_zipf_exponent(cfg.entity_count, cfg.top_decile_target);
    zipf_cdf_.resize(std::max(0, cfg.entity_count));
    double acc = 0.0;
    for (int i = 0; i < cfg.entity_count; ++i) {
      acc += 1.0 / std::pow(double(i + 1), s);
      zipf_cdf_[i] = acc;
    }
    for (double& v : zipf_cdf_) v /= acc;

    n_entity_templates_ = std::min<int>(cfg.entity_template_count, int(kEntityTemplates.size()));
    n_none_templates_ = std::min<int>(cfg.none_template_count, int(kNoneTemplates.size()));
  }

  SynthOutput run(uint64_t seed) {
    SynthOutput out;
    for (const SynthEntity& e : entities_) {
      std::vector<std::string> surfaces = {e.surface};
      out.dictionary.add_entry(e.id, e.surface, surfaces, e.definition);
    }

    Rng corpus_rng(Rng::mix({seed, 3}));
    std::vector<std::string> sentences;
    sentences.reserve(cfg_.sentence_count);
    for (int i = 0; i < cfg_.sentence_count; ++i) {
      bool none = corpus_rng.uniform() < cfg_.none_fraction;
      Realization r = none ? draw_none(corpus_rng) : draw_entity_sentence(corpus_rng);
      sentences.push_back(realize(r));
    }
    const int doc_size = 25;
    for (std::size_t i = 0; i < sentences.size(); i += doc_size) {
      std::string doc;
      for (std::size_t j = i; j < std::min(sentences.size(), i + doc_size); ++j) {
        if (!doc.empty()) doc += " ";
        doc += sentences[j];
      }
      out.raw_documents.push_back(std::move(doc));
    }

    Rng sts_rng(Rng::mix({seed, 4}));
    std::vector<STSPair> pairs = make_sts_pairs(sts_rng);
    sts_rng.shuffle(pairs.begin(), pairs.end());
    const int n_train = int(std::llround(cfg_.sts_train_fraction * double(pairs.size())));
    out.sts_train.assign(pairs.begin(), pairs.begin() + n_train);
    out.sts_test.assign(pairs.begin() + n_train, pairs.end());
    return out;
  }

 private:
  static std::string fill_template(const std::string& tmpl, const std::string& entity,
                                   const std::string& entity2,
                                   const std::vector<std::string>& fills) {
    std::string out;
    std::size_t fi = 0;
    std::istringstream iss(tmpl);
    std::string tok;
    while (iss >> tok) {
      std::string piece;
      if (tok == "{E}") piece = entity;
      else if (tok == "{E2}") piece = entity2;
      else if (tok == "{W}" || tok == "{G}") piece = fi < fills.size() ? fills[fi++] : "thing";
      else piece = tok;
      if (!out.empty()) out += " ";
      out += piece;
    }
    return out;
  }

  static int count_slots(const std::string& tmpl) {
    int n = 0;
    std::istringstream iss(tmpl);
    std::string tok;
    while (iss >> tok)
      if (tok == "{W}" || tok == "{G}") ++n;
    return n;
  }

  int draw_zipf(Rng& rng) const {
    double u = rng.uniform();
    return int(std::lower_bound(zipf_cdf_.begin(), zipf_cdf_.end(), u) - zipf_cdf_.begin());
  }

  std::string topic_or_general(Rng& rng, int topic) const {
    if (rng.uniform() < 0.3)
      return kGeneralBank[rng.uniform_int(int(kGeneralBank.size()))];
    return topics_[topic][rng.uniform_int(kTopicBankSize)];
  }

  Realization draw_entity_sentence(Rng& rng) const {
    Realization r;
    r.has_entity = true;
    r.entity = draw_zipf(rng);
    bool two = entities_.size() >= 2 && rng.uniform() < cfg_.two_entity_fraction;
    const std::string* tmpl;
    if (two) {
      r.template_idx = n_entity_templates_ + rng.uniform_int(int(kTwoEntityTemplates.size()));
      tmpl = &kTwoEntityTemplates[r.template_idx - n_entity_templates_];
      do {
        r.entity2 = draw_zipf(rng);
      } while (r.entity2 == r.entity);
    } else {
      r.template_idx = rng.uniform_int(n_entity_templates_);
      tmpl = &kEntityTemplates[r.template_idx];
    }
    const int slots = count_slots(*tmpl);
    for (int i = 0; i < slots; ++i)
      r.fills.push_back(topic_or_general(rng, entities_[r.entity].topic));
    return r;
  }

  Realization draw_none(Rng& rng) const {
    Realization r;
    r.template_idx = rng.uniform_int(n_none_templates_);
    const int slots = count_slots(kNoneTemplates[r.template_idx]);
    for (int i = 0; i < slots; ++i)
      r.fills.push_back(kGeneralBank[rng.uniform_int(int(kGeneralBank.size()))]);
    return r;
  }

  std::string realize(const Realization& r) const {
    const std::string* tmpl;
    if (!r.has_entity) {
      tmpl = &kNoneTemplates[r.template_idx];
    } else if (r.template_idx >= n_entity_templates_) {
      tmpl = &kTwoEntityTemplates[r.template_idx - n_entity_templates_];
    } else {
      tmpl = &kEntityTemplates[r.template_idx];
    }
    std::string e1 = r.entity >= 0 ? entities_[r.entity].surface : "";
    std::string e2 = r.entity2 >= 0 ? entities_[r.entity2].surface : "";
    return fill_template(*tmpl, e1, e2, r.fills) + " .";
  }

  double definition_relatedness(int e1, int e2) const {
    const auto& a = entities_[e1].definition_words;
    const auto& b = entities_[e2].definition_words;
    int inter = 0;
    for (const auto& w : a) inter += b.count(w) ? 1 : 0;
    int uni = int(a.size() + b.size()) - inter;
    return uni > 0 ? double(inter) / double(uni) : 0.0;
  }

  Realization neutral_entity_realization(Rng& rng, int entity) const {
    Realization r;
    r.has_entity = true;
    r.entity = entity;
    r.template_idx = rng.uniform_int(n_entity_templates_);
    const int slots = count_slots(kEntityTemplates[r.template_idx]);
    for (int i = 0; i < slots; ++i)
      r.fills.push_back(kGeneralBank[rng.uniform_int(int(kGeneralBank.size()))]);
    return r;
  }

  std::vector<STSPair> make_sts_pairs(Rng& rng) const {
    std::vector<STSPair> pairs;
    pairs.reserve(cfg_.sts_pair_count);
    const bool have_two_topics = cfg_.topic_count >= 2 && entities_.size() >= 2;
    for (int i = 0; i < cfg_.sts_pair_count; ++i) {
      double kind = rng.uniform();
      STSPair p;
      if (kind < 0.08) {
        // identical sentences
        Realization r = draw_entity_sentence(rng);
        p.sentence1 = p.sentence2 = realize(r);
        p.gold = 5.0;
      } else if (kind < 0.20) {
        // same template and entity, different fills
        Realization a = draw_entity_sentence(rng);
        Realization b = a;
        for (auto& f : b.fills) f = topic_or_general(rng, entities_[b.entity].topic);
        p.sentence1 = realize(a);
        p.sentence2 = realize(b);
        p.gold = 4.3;
      } else if (kind < 0.35) {
        // same entity, different templates
        int e = draw_zipf(rng);
        Realization a = neutral_entity_realization(rng, e);
        Realization b = neutral_entity_realization(rng, e);
        while (b.template_idx == a.template_idx)
          b.template_idx = rng.uniform_int(n_entity_templates_);
        b.fills.resize(count_slots(kEntityTemplates[b.template_idx]));
        for (auto& f : b.fills) f = kGeneralBank[rng.uniform_int(int(kGeneralBank.size()))];
        p.sentence1 = realize(a);
        p.sentence2 = realize(b);
        p.gold = 3.6;
      } else if (kind < 0.75 && have_two_topics) {
        // identical context, entity swapped: gold follows definition overlap
        int e1 = draw_zipf(rng);
        int e2 = e1;
        // Half the swaps stay within topic so the middle band has spread.
        if (rng.uniform() < 0.5) {
          for (int tries = 0; tries < 64 && (e2 == e1 || entities_[e2].topic != entities_[e1].topic);
               ++tries)
            e2 = rng.uniform_int(int(entities_.size()));
          if (e2 == e1 || entities_[e2].topic != entities_[e1].topic) e2 = -1;
        } else {
          for (int tries = 0; tries < 64 && (e2 == e1 || entities_[e2].topic == entities_[e1].topic);
               ++tries)
            e2 = rng.uniform_int(int(entities_.size()));
        }
        if (e2 < 0 || e2 == e1) {
          --i;
          continue;
        }
        Realization a = neutral_entity_realization(rng, e1);
        Realization b = a;
        b.entity = e2;
        p.sentence1 = realize(a);
        p.sentence2 = realize(b);
        p.gold = 1.0 + 3.0 * definition_relatedness(e1, e2);
        p.gold = std::round(p.gold * 100.0) / 100.0;
      } else if (kind < 0.90 || n_none_templates_ == 0) {
        // unrelated entity sentences from different topics
        int e1 = draw_zipf(rng);
        int e2 = e1;
        for (int tries = 0; tries < 64 && (e2 == e1 || entities_[e2].topic == entities_[e1].topic);
             ++tries)
          e2 = rng.uniform_int(int(entities_.size()));
        Realization a = draw_entity_sentence(rng);
        a.entity = e1;
        Realization b = draw_entity_sentence(rng);
        b.entity = e2;
        while (b.template_idx == a.template_idx && n_entity_templates_ > 1)
          b.template_idx = rng.uniform_int(n_entity_templates_);
        b.fills.resize(count_slots(kEntityTemplates[b.template_idx]));
        for (auto& f : b.fills) f = topic_or_general(rng, entities_[b.entity].topic);
        p.sentence1 = realize(a);
        p.sentence2 = realize(b);
        p.gold = 0.8;
      } else {
        // sentences without entities
        Realization a = draw_none(rng);
        Realization b = draw_none(rng);
        p.sentence1 = realize(a);
        p.sentence2 = realize(b);
        p.gold = a.template_idx == b.template_idx ? 2.5 : 1.0;
      }
      pairs.push_back(std::move(p));
    }
    return pairs;
  }

  SynthConfig cfg_;
  std::vector<std::vector<std::string>> topics_;
  std::vector<SynthEntity> entities_;
  std::vector<double> zipf_cdf_;
  int n_entity_templates_ = 0;
  int n_none_templates_ = 0;
};

}  // namespace

double zipf_top_decile_share(int k, double s) {
  if (k <= 0) return 0.0;
  double total = 0.0;
  for (int i = 1; i <= k; ++i) total += 1.0 / std::pow(double(i), s);
  const int top = int(std::ceil(0.1 * double(k)));
  double head = 0.0;
  for (int i = 1; i <= top; ++i) head += 1.0 / std::pow(double(i), s);
  return head / total;
}

double calibrate_zipf_exponent(int k, double target) {
  double lo = 0.0, hi = 8.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (zipf_top_decile_share(k, mid) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

SynthOutput generate_synthetic_corpus(const SynthConfig& config, uint64_t rng_seed) {
  Generator gen(config, rng_seed);
  return gen.run(rng_seed);
}

}  // namespace medse
