#include "medse/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace medse {

double cosine_similarity(const Matrix& a, const Matrix& b) {
  if (a.size() != b.size() || a.size() == 0)
    throw std::invalid_argument("cosine_similarity: size mismatch");
  double na = l2_norm(a.data.data(), int(a.size()));
  double nb = l2_norm(b.data.data(), int(b.size()));
  if (na == 0.0 || nb == 0.0)
    throw std::invalid_argument("cosine_similarity: zero-norm input");
  return dot(a.data.data(), b.data.data(), int(a.size())) / (na * nb);
}

namespace {

// InfoNCE with diagonal targets over cosine similarities, computed without
// graph machinery.
double plain_nce(const Matrix& h, const Matrix& h_plus, const LossConfig& cfg) {
  if (h.rows != h_plus.rows || h.cols != h_plus.cols)
    throw std::invalid_argument("contrastive loss: embedding shape mismatch");
  if (cfg.temperature <= 0.0) throw std::invalid_argument("temperature must be positive");
  const int n = h.rows;
  if (n == 0) return 0.0;

  Matrix sim(n, n);
  std::vector<double> norm_a(n), norm_b(n);
  for (int i = 0; i < n; ++i) {
    norm_a[i] = std::max(l2_norm(h.row(i), h.cols), 1e-150);
    norm_b[i] = std::max(l2_norm(h_plus.row(i), h_plus.cols), 1e-150);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      sim(i, j) = dot(h.row(i), h_plus.row(j), h.cols) / (norm_a[i] * norm_b[j] * cfg.temperature);

  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    double mx = sim(i, 0);
    for (int j = 1; j < n; ++j) mx = std::max(mx, sim(i, j));
    double lse = 0.0;
    for (int j = 0; j < n; ++j) lse += std::exp(sim(i, j) - mx);
    loss += mx + std::log(lse) - sim(i, i);
  }
  if (cfg.reduction == LossReduction::mean) loss /= double(n);
  return loss;
}

}  // namespace

double sentence_cl_loss(const Matrix& h, const Matrix& h_plus, const LossConfig& cfg) {
  if (h.rows < 1) throw std::invalid_argument("sentence_cl_loss: empty batch");
  return plain_nce(h, h_plus, cfg);
}

double entity_cl_loss(const Matrix& h_ent, const Matrix& h_def, const LossConfig& cfg) {
  if (h_ent.rows != h_def.rows)
    throw std::invalid_argument("entity_cl_loss: embedding count mismatch");
  return plain_nce(h_ent, h_def, cfg);
}

double combined_loss(double l_sen, double l_ent, const LossConfig& cfg) {
  return l_sen + cfg.lambda * l_ent;
}

ad::Var contrastive_loss(ad::Graph& g, const ad::Var& h, const ad::Var& h_plus,
                         const LossConfig& cfg) {
  if (h->val.rows != h_plus->val.rows || h->val.cols != h_plus->val.cols)
    throw std::invalid_argument("contrastive loss: embedding shape mismatch");
  if (cfg.temperature <= 0.0) throw std::invalid_argument("temperature must be positive");
  ad::Var sim = g.matmul_nt(g.row_normalize(h), g.row_normalize(h_plus));
  ad::Var loss = g.nce_diag_loss(g.scale(sim, 1.0 / cfg.temperature));
  if (cfg.reduction == LossReduction::mean) loss = g.scale(loss, 1.0 / double(h->val.rows));
  return loss;
}

}  // namespace medse
