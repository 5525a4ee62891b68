#include "steerbench/model/transformer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/Dense>

#include "steerbench/common/error.hpp"
#include "steerbench/common/rng.hpp"

namespace steerbench::model {
namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Row = Eigen::Matrix<double, 1, Eigen::Dynamic>;
using MatMap = Eigen::Map<Mat>;
using CMatMap = Eigen::Map<const Mat>;
using RowMap = Eigen::Map<Row>;
using CRowMap = Eigen::Map<const Row>;

struct LayerOffsets {
  std::size_t wq, bq, wk, bk, wv, bv, wo, bo, ln1_g, ln1_b, w1, b1, w2, b2, ln2_g, ln2_b;
};

double round_to_float(double x) { return static_cast<double>(static_cast<float>(x)); }

double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

double gelu_grad(double x) {
  constexpr double kInvSqrt2Pi = 0.3989422804014327;
  return 0.5 * (1.0 + std::erf(x / std::sqrt(2.0))) + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

std::size_t effective_length(std::span<const TokenId> ids) {
  std::size_t n = ids.size();
  while (n > 0 && ids[n - 1] == Vocabulary::pad) --n;
  return n;
}

}  // namespace

struct Transformer::Layout {
  std::size_t tok = 0, pos = 0, emb_g = 0, emb_b = 0, w_out = 0, b_out = 0, total = 0;
  std::vector<LayerOffsets> layers;

  explicit Layout(const ModelConfig& c) {
    const std::size_t d = c.hidden_size, f = c.intermediate_size;
    std::size_t at = 0;
    auto take = [&at](std::size_t n) {
      const std::size_t o = at;
      at += n;
      return o;
    };
    tok = take(c.vocab_size * d);
    pos = take(c.sequence_length * d);
    emb_g = take(d);
    emb_b = take(d);
    for (std::size_t l = 0; l < c.layers; ++l) {
      LayerOffsets o{};
      o.wq = take(d * d);
      o.bq = take(d);
      o.wk = take(d * d);
      o.bk = take(d);
      o.wv = take(d * d);
      o.bv = take(d);
      o.wo = take(d * d);
      o.bo = take(d);
      o.ln1_g = take(d);
      o.ln1_b = take(d);
      o.w1 = take(d * f);
      o.b1 = take(f);
      o.w2 = take(f * d);
      o.b2 = take(d);
      o.ln2_g = take(d);
      o.ln2_b = take(d);
      layers.push_back(o);
    }
    w_out = take(d * c.vocab_size);
    b_out = take(c.vocab_size);
    total = at;
  }
};

namespace {

struct LnCache {
  Mat xhat;
  Eigen::VectorXd inv_std;
};

Mat layer_norm(const Mat& x, CRowMap gamma, CRowMap beta, double eps, LnCache* cache) {
  const auto d = static_cast<double>(x.cols());
  Mat xhat(x.rows(), x.cols());
  Eigen::VectorXd inv(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).sum() / d;
    const Row centered = x.row(r).array() - mean;
    const double var = centered.squaredNorm() / d;
    inv(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = centered * inv(r);
  }
  Mat y = (xhat.array().rowwise() * gamma.array()).rowwise() + beta.array();
  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv);
  }
  return y;
}

Mat layer_norm_backward(const Mat& dy, const LnCache& cache, CRowMap gamma, RowMap dgamma, RowMap dbeta) {
  dgamma += (dy.array() * cache.xhat.array()).colwise().sum().matrix();
  dbeta += dy.colwise().sum();
  const Mat dxhat = dy.array().rowwise() * gamma.array();
  const auto d = static_cast<double>(dy.cols());
  Mat dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const double mean_dxhat = dxhat.row(r).sum() / d;
    const double mean_dxhat_xhat = dxhat.row(r).dot(cache.xhat.row(r)) / d;
    dx.row(r) = cache.inv_std(r) *
                (dxhat.row(r).array() - mean_dxhat - cache.xhat.row(r).array() * mean_dxhat_xhat).matrix();
  }
  return dx;
}

}  // namespace

struct Transformer::Cache {
  struct Layer {
    Mat x_in, q, k, v, ctx, y, h_pre, h;
    std::vector<Mat> attn;
    LnCache ln1, ln2;
  };
  std::size_t n = 0;
  LnCache emb;
  std::vector<Layer> layers;
  Row final_state;
  Row probs;
};

void ModelConfig::check() const {
  if (layers < 1) throw PreconditionError("layers must be at least 1");
  if (attention_heads < 1) throw PreconditionError("attention_heads must be at least 1");
  if (hidden_size < 1 || hidden_size % attention_heads != 0) {
    throw PreconditionError("hidden_size must be a positive multiple of attention_heads");
  }
  if (intermediate_size < 1) throw PreconditionError("intermediate_size must be at least 1");
  if (sequence_length < 5) throw PreconditionError("sequence_length must be at least 5");
  if (vocab_size <= static_cast<std::size_t>(Vocabulary::meta_count)) {
    throw PreconditionError("vocab_size must exceed the meta-token count");
  }
  if (warmup_steps > train_steps) throw PreconditionError("warmup_steps must not exceed train_steps");
  if (batch_size < 1) throw PreconditionError("batch_size must be at least 1");
  if (!(peak_learning_rate >= 0.0)) throw PreconditionError("peak_learning_rate must be non-negative");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw PreconditionError("Adam betas must be in [0, 1)");
  }
  if (!(adam_epsilon > 0.0) || !(init_stddev > 0.0) || !(layer_norm_epsilon > 0.0)) {
    throw PreconditionError("epsilons and init_stddev must be positive");
  }
}

nlohmann::ordered_json ModelConfig::to_json() const {
  return {{"layers", layers},
          {"attention_heads", attention_heads},
          {"hidden_size", hidden_size},
          {"intermediate_size", intermediate_size},
          {"sequence_length", sequence_length},
          {"vocab_size", vocab_size},
          {"peak_learning_rate", peak_learning_rate},
          {"warmup_steps", warmup_steps},
          {"train_steps", train_steps},
          {"batch_size", batch_size},
          {"adam_beta1", adam_beta1},
          {"adam_beta2", adam_beta2},
          {"adam_epsilon", adam_epsilon},
          {"init_stddev", init_stddev},
          {"layer_norm_epsilon", layer_norm_epsilon},
          {"seed", seed}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& doc) {
  ModelConfig c;
  c.layers = doc.at("layers").get<std::size_t>();
  c.attention_heads = doc.at("attention_heads").get<std::size_t>();
  c.hidden_size = doc.at("hidden_size").get<std::size_t>();
  c.intermediate_size = doc.at("intermediate_size").get<std::size_t>();
  c.sequence_length = doc.at("sequence_length").get<std::size_t>();
  c.vocab_size = doc.at("vocab_size").get<std::size_t>();
  c.peak_learning_rate = doc.at("peak_learning_rate").get<double>();
  c.warmup_steps = doc.at("warmup_steps").get<std::size_t>();
  c.train_steps = doc.at("train_steps").get<std::size_t>();
  c.batch_size = doc.at("batch_size").get<std::size_t>();
  c.adam_beta1 = doc.at("adam_beta1").get<double>();
  c.adam_beta2 = doc.at("adam_beta2").get<double>();
  c.adam_epsilon = doc.at("adam_epsilon").get<double>();
  c.init_stddev = doc.at("init_stddev").get<double>();
  c.layer_norm_epsilon = doc.at("layer_norm_epsilon").get<double>();
  c.seed = doc.at("seed").get<std::uint64_t>();
  c.check();
  return c;
}

double ModelConfig::learning_rate(std::size_t step) const {
  if (step == 0) return 0.0;
  if (step <= warmup_steps) return peak_learning_rate * static_cast<double>(step) / static_cast<double>(warmup_steps);
  if (step >= train_steps) return 0.0;
  return peak_learning_rate * static_cast<double>(train_steps - step) /
         static_cast<double>(train_steps - warmup_steps);
}

std::size_t Transformer::parameter_count(const ModelConfig& cfg) { return Layout(cfg).total; }

Transformer::Transformer(Vocabulary vocab, ModelConfig cfg) : vocab_(std::move(vocab)), cfg_(cfg) {
  cfg_.check();
  if (cfg_.vocab_size != vocab_.size()) throw PreconditionError("vocab_size does not match the vocabulary");
  const Layout lay(cfg_);
  params_.assign(lay.total, 0.0);
  Rng rng(mix_seed(cfg_.seed, 0x696e6974ULL));
  auto fill_normal = [&](std::size_t offset, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) params_[offset + i] = round_to_float(rng.normal(0.0, cfg_.init_stddev));
  };
  auto fill_ones = [&](std::size_t offset, std::size_t count) {
    std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(offset), count, 1.0);
  };
  const std::size_t d = cfg_.hidden_size, f = cfg_.intermediate_size;
  fill_normal(lay.tok, cfg_.vocab_size * d);
  fill_normal(lay.pos, cfg_.sequence_length * d);
  fill_ones(lay.emb_g, d);
  for (const auto& o : lay.layers) {
    fill_normal(o.wq, d * d);
    fill_normal(o.wk, d * d);
    fill_normal(o.wv, d * d);
    fill_normal(o.wo, d * d);
    fill_ones(o.ln1_g, d);
    fill_normal(o.w1, d * f);
    fill_normal(o.w2, f * d);
    fill_ones(o.ln2_g, d);
  }
  fill_normal(lay.w_out, d * cfg_.vocab_size);
}

Transformer::Transformer(Vocabulary vocab, ModelConfig cfg, std::vector<double> params)
    : vocab_(std::move(vocab)), cfg_(cfg), params_(std::move(params)) {
  cfg_.check();
  if (cfg_.vocab_size != vocab_.size()) throw PreconditionError("vocab_size does not match the vocabulary");
  if (params_.size() != Layout(cfg_).total) throw PreconditionError("parameter count does not match the config");
}

std::vector<double> Transformer::forward(std::span<const TokenId> ids, std::size_t position, Cache* cache) const {
  if (ids.size() != cfg_.sequence_length) throw PreconditionError("input length does not match the model");
  const std::size_t n = effective_length(ids);
  if (position >= n) throw PreconditionError("readout position lies in the padding");
  for (std::size_t i = 0; i < n; ++i) {
    if (!vocab_.contains(ids[i])) throw PreconditionError("input id outside the vocabulary");
  }
  const Layout lay(cfg_);
  const double* p = params_.data();
  const auto d = static_cast<Eigen::Index>(cfg_.hidden_size);
  const auto f = static_cast<Eigen::Index>(cfg_.intermediate_size);
  const auto v = static_cast<Eigen::Index>(cfg_.vocab_size);
  const auto rows = static_cast<Eigen::Index>(n);
  const auto heads = static_cast<Eigen::Index>(cfg_.attention_heads);
  const Eigen::Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const double eps = cfg_.layer_norm_epsilon;

  // Trailing [PAD] positions are masked as attention keys, so dropping them
  // leaves every remaining hidden state unchanged.
  const CMatMap tok(p + lay.tok, v, d);
  const CMatMap pos(p + lay.pos, static_cast<Eigen::Index>(cfg_.sequence_length), d);
  Mat x(rows, d);
  for (Eigen::Index i = 0; i < rows; ++i) x.row(i) = tok.row(ids[static_cast<std::size_t>(i)]) + pos.row(i);
  x = layer_norm(x, CRowMap(p + lay.emb_g, d), CRowMap(p + lay.emb_b, d), eps, cache ? &cache->emb : nullptr);
  if (cache) {
    cache->n = n;
    cache->layers.assign(lay.layers.size(), {});
  }

  for (std::size_t l = 0; l < lay.layers.size(); ++l) {
    const LayerOffsets& o = lay.layers[l];
    Mat q = (x * CMatMap(p + o.wq, d, d)).rowwise() + CRowMap(p + o.bq, d);
    Mat k = (x * CMatMap(p + o.wk, d, d)).rowwise() + CRowMap(p + o.bk, d);
    Mat val = (x * CMatMap(p + o.wv, d, d)).rowwise() + CRowMap(p + o.bv, d);
    Mat ctx(rows, d);
    std::vector<Mat> attn(static_cast<std::size_t>(heads));
    for (Eigen::Index h = 0; h < heads; ++h) {
      Mat s = q.middleCols(h * dh, dh) * k.middleCols(h * dh, dh).transpose() * scale;
      for (Eigen::Index r = 0; r < rows; ++r) {
        const double m = s.row(r).maxCoeff();
        s.row(r) = (s.row(r).array() - m).exp();
        s.row(r) /= s.row(r).sum();
      }
      ctx.middleCols(h * dh, dh) = s * val.middleCols(h * dh, dh);
      attn[static_cast<std::size_t>(h)] = std::move(s);
    }
    Mat attn_out = (ctx * CMatMap(p + o.wo, d, d)).rowwise() + CRowMap(p + o.bo, d);
    Cache::Layer* lc = cache ? &cache->layers[l] : nullptr;
    Mat y = layer_norm(x + attn_out, CRowMap(p + o.ln1_g, d), CRowMap(p + o.ln1_b, d), eps, lc ? &lc->ln1 : nullptr);
    Mat h_pre = (y * CMatMap(p + o.w1, d, f)).rowwise() + CRowMap(p + o.b1, f);
    Mat h = h_pre.unaryExpr(&gelu);
    Mat ffn = (h * CMatMap(p + o.w2, f, d)).rowwise() + CRowMap(p + o.b2, d);
    Mat out = layer_norm(y + ffn, CRowMap(p + o.ln2_g, d), CRowMap(p + o.ln2_b, d), eps, lc ? &lc->ln2 : nullptr);
    if (lc) {
      lc->x_in = std::move(x);
      lc->q = std::move(q);
      lc->k = std::move(k);
      lc->v = std::move(val);
      lc->ctx = std::move(ctx);
      lc->attn = std::move(attn);
      lc->y = std::move(y);
      lc->h_pre = std::move(h_pre);
      lc->h = std::move(h);
    }
    x = std::move(out);
  }

  const Row state = x.row(static_cast<Eigen::Index>(position));
  const Row logits = state * CMatMap(p + lay.w_out, d, v) + CRowMap(p + lay.b_out, v);
  if (cache) cache->final_state = state;
  return {logits.data(), logits.data() + logits.size()};
}

std::vector<double> Transformer::hole_logits(std::span<const TokenId> ids, std::size_t hole_index) const {
  if (hole_index >= ids.size() || ids[hole_index] != Vocabulary::hole) {
    throw PreconditionError("hole_index does not point at [HOLE]");
  }
  return forward(ids, hole_index, nullptr);
}

double Transformer::loss_and_gradient(std::span<const TokenId> ids, std::size_t position, TokenId target,
                                      std::vector<double>* grad) const {
  if (!vocab_.contains(target)) throw PreconditionError("target id outside the vocabulary");
  Cache cache;
  const std::vector<double> logits = forward(ids, position, grad ? &cache : nullptr);
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - m);
  const double log_z = m + std::log(z);
  const double loss = log_z - logits[static_cast<std::size_t>(target)];
  if (!grad) return loss;
  if (grad->size() != params_.size()) throw PreconditionError("gradient buffer has the wrong size");

  const Layout lay(cfg_);
  const double* p = params_.data();
  double* g = grad->data();
  const auto d = static_cast<Eigen::Index>(cfg_.hidden_size);
  const auto f = static_cast<Eigen::Index>(cfg_.intermediate_size);
  const auto v = static_cast<Eigen::Index>(cfg_.vocab_size);
  const auto rows = static_cast<Eigen::Index>(cache.n);
  const auto heads = static_cast<Eigen::Index>(cfg_.attention_heads);
  const Eigen::Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Row dlogits(v);
  for (Eigen::Index i = 0; i < v; ++i) dlogits(i) = std::exp(logits[static_cast<std::size_t>(i)] - log_z);
  dlogits(target) -= 1.0;
  MatMap(g + lay.w_out, d, v) += cache.final_state.transpose() * dlogits;
  RowMap(g + lay.b_out, v) += dlogits;
  Mat dx = Mat::Zero(rows, d);
  dx.row(static_cast<Eigen::Index>(position)) = dlogits * CMatMap(p + lay.w_out, d, v).transpose();

  for (std::size_t li = lay.layers.size(); li-- > 0;) {
    const LayerOffsets& o = lay.layers[li];
    const Cache::Layer& c = cache.layers[li];
    // out = LN2(y + ffn)
    const Mat dsum2 = layer_norm_backward(dx, c.ln2, CRowMap(p + o.ln2_g, d), RowMap(g + o.ln2_g, d),
                                          RowMap(g + o.ln2_b, d));
    MatMap(g + o.w2, f, d) += c.h.transpose() * dsum2;
    RowMap(g + o.b2, d) += dsum2.colwise().sum();
    const Mat dh_act = dsum2 * CMatMap(p + o.w2, f, d).transpose();
    const Mat dh_pre = dh_act.array() * c.h_pre.unaryExpr(&gelu_grad).array();
    MatMap(g + o.w1, d, f) += c.y.transpose() * dh_pre;
    RowMap(g + o.b1, f) += dh_pre.colwise().sum();
    const Mat dy = dsum2 + dh_pre * CMatMap(p + o.w1, d, f).transpose();
    // y = LN1(x_in + attn_out)
    const Mat dsum1 = layer_norm_backward(dy, c.ln1, CRowMap(p + o.ln1_g, d), RowMap(g + o.ln1_g, d),
                                          RowMap(g + o.ln1_b, d));
    MatMap(g + o.wo, d, d) += c.ctx.transpose() * dsum1;
    RowMap(g + o.bo, d) += dsum1.colwise().sum();
    const Mat dctx = dsum1 * CMatMap(p + o.wo, d, d).transpose();
    Mat dq(rows, d), dk(rows, d), dv(rows, d);
    for (Eigen::Index h = 0; h < heads; ++h) {
      const Mat& a = c.attn[static_cast<std::size_t>(h)];
      const auto dctx_h = dctx.middleCols(h * dh, dh);
      const Mat da = dctx_h * c.v.middleCols(h * dh, dh).transpose();
      dv.middleCols(h * dh, dh) = a.transpose() * dctx_h;
      const Eigen::VectorXd row_dot = (da.array() * a.array()).rowwise().sum();
      const Mat ds = a.array() * (da.array().colwise() - row_dot.array());
      dq.middleCols(h * dh, dh) = ds * c.k.middleCols(h * dh, dh) * scale;
      dk.middleCols(h * dh, dh) = ds.transpose() * c.q.middleCols(h * dh, dh) * scale;
    }
    MatMap(g + o.wq, d, d) += c.x_in.transpose() * dq;
    RowMap(g + o.bq, d) += dq.colwise().sum();
    MatMap(g + o.wk, d, d) += c.x_in.transpose() * dk;
    RowMap(g + o.bk, d) += dk.colwise().sum();
    MatMap(g + o.wv, d, d) += c.x_in.transpose() * dv;
    RowMap(g + o.bv, d) += dv.colwise().sum();
    dx = dsum1 + dq * CMatMap(p + o.wq, d, d).transpose() + dk * CMatMap(p + o.wk, d, d).transpose() +
         dv * CMatMap(p + o.wv, d, d).transpose();
  }

  const Mat demb = layer_norm_backward(dx, cache.emb, CRowMap(p + lay.emb_g, d), RowMap(g + lay.emb_g, d),
                                       RowMap(g + lay.emb_b, d));
  MatMap tok(g + lay.tok, v, d);
  MatMap pos(g + lay.pos, static_cast<Eigen::Index>(cfg_.sequence_length), d);
  for (Eigen::Index i = 0; i < rows; ++i) {
    tok.row(ids[static_cast<std::size_t>(i)]) += demb.row(i);
    pos.row(i) += demb.row(i);
  }
  return loss;
}

std::vector<LossPoint> Transformer::train(datagen::InfillStream& stream, std::size_t steps,
                                          const std::function<void(const LossPoint&)>& on_step) {
  for (const auto& k : stream.kernels()) {
    if (k.ids.size() != cfg_.sequence_length) {
      throw PreconditionError("dataset sequence length " + std::to_string(k.ids.size()) +
                              " does not match the model's " + std::to_string(cfg_.sequence_length));
    }
    for (TokenId id : k.ids) {
      if (!vocab_.contains(id)) throw PreconditionError("dataset contains ids outside the model vocabulary");
    }
  }
  std::vector<LossPoint> curve;
  if (steps == 0) return curve;
  std::vector<double> grad(params_.size());
  std::vector<double> m(params_.size(), 0.0), s(params_.size(), 0.0);
  const double inv_batch = 1.0 / static_cast<double>(cfg_.batch_size);
  for (std::size_t local = 1; local <= steps; ++local) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double batch_loss = 0.0;
    for (std::size_t b = 0; b < cfg_.batch_size; ++b) {
      const datagen::TrainingInstance inst = stream.next();
      batch_loss += loss_and_gradient(inst.input_ids, inst.hole_index, inst.target, &grad);
    }
    ++step_;
    const double lr = cfg_.learning_rate(step_);
    const double c1 = 1.0 - std::pow(cfg_.adam_beta1, static_cast<double>(local));
    const double c2 = 1.0 - std::pow(cfg_.adam_beta2, static_cast<double>(local));
    for (std::size_t i = 0; i < params_.size(); ++i) {
      const double gi = grad[i] * inv_batch;
      m[i] = cfg_.adam_beta1 * m[i] + (1.0 - cfg_.adam_beta1) * gi;
      s[i] = cfg_.adam_beta2 * s[i] + (1.0 - cfg_.adam_beta2) * gi * gi;
      params_[i] = round_to_float(params_[i] - lr * (m[i] / c1) / (std::sqrt(s[i] / c2) + cfg_.adam_epsilon));
    }
    last_loss_ = batch_loss * inv_batch;
    curve.push_back({step_, last_loss_});
    if (on_step) on_step(curve.back());
  }
  return curve;
}

Checkpoint Transformer::to_checkpoint() const {
  Checkpoint ckpt;
  ckpt.kind = "transformer";
  ckpt.config = cfg_.to_json();
  ckpt.vocab_hash = vocab_.hash();
  ckpt.step = step_;
  ckpt.final_loss = last_loss_;
  ckpt.parameters.assign(params_.begin(), params_.end());
  return ckpt;
}

Transformer Transformer::from_checkpoint(const Checkpoint& ckpt, const Vocabulary& vocab) {
  if (ckpt.kind != "transformer") {
    throw PreconditionError("checkpoint holds a '" + ckpt.kind + "' model, not a transformer");
  }
  if (ckpt.vocab_hash != vocab.hash()) throw PreconditionError("checkpoint was built for a different vocabulary");
  Transformer t(vocab, ModelConfig::from_json(ckpt.config),
                std::vector<double>(ckpt.parameters.begin(), ckpt.parameters.end()));
  t.step_ = ckpt.step;
  t.last_loss_ = ckpt.final_loss;
  return t;
}

double mean_cross_entropy(const Generator& gen, std::span<const datagen::TrainingInstance> instances) {
  if (instances.empty()) throw PreconditionError("cannot evaluate the loss on an empty slice");
  double total = 0.0;
  for (const auto& inst : instances) {
    const auto probs = hole_distribution(gen, inst.input_ids, 1.0);
    total -= std::log(std::max(probs[static_cast<std::size_t>(inst.target)], std::numeric_limits<double>::min()));
  }
  return total / static_cast<double>(instances.size());
}

void write_loss_csv(const std::filesystem::path& path, std::span<const LossPoint> curve) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write loss curve: " + path.string());
  out << "step,loss\n";
  char buf[64];
  for (const auto& pt : curve) {
    std::snprintf(buf, sizeof buf, "%zu,%.9g\n", pt.step, pt.loss);
    out << buf;
  }
}

}  // namespace steerbench::model
