#pragma once

#include "medse/autodiff.hpp"
#include "medse/matrix.hpp"

namespace medse {

enum class LossReduction { sum, mean };

struct LossConfig {
  double temperature = 0.05;
  double lambda = 0.1;
  LossReduction reduction = LossReduction::sum;
};

// a.b / (|a||b|); throws on zero-norm input.
double cosine_similarity(const Matrix& a, const Matrix& b);

// Sentence-level contrastive objective: row-wise InfoNCE over the cosine
// similarity matrix between the batch and its positive views, diagonal
// targets. Rows of h / h_plus are per-sentence embeddings.
double sentence_cl_loss(const Matrix& h, const Matrix& h_plus, const LossConfig& cfg);

// Entity-level contrastive objective between entity embeddings and their
// definition embeddings; 0 when the entity subset is empty.
double entity_cl_loss(const Matrix& h_ent, const Matrix& h_def, const LossConfig& cfg);

double combined_loss(double l_sen, double l_ent, const LossConfig& cfg);

// Differentiable forms used by the training loop.
ad::Var contrastive_loss(ad::Graph& g, const ad::Var& h, const ad::Var& h_plus,
                         const LossConfig& cfg);

}  // namespace medse
