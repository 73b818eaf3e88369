/*
 * Copyright 2026 The wcnslu Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Test-only helpers: random inputs and independent reference
// implementations used as oracles.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "wcnslu/encoder.hpp"
#include "wcnslu/frame.hpp"
#include "wcnslu/params.hpp"
#include "wcnslu/rng.hpp"
#include "wcnslu/subword.hpp"
#include "wcnslu/wcn.hpp"

namespace wcnslu::testing {

inline const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> words = {
      "i", "want", "wont", "cheap", "chinese", "food", "in", "the", "north", "um",
      "expensive", "restaurant", "playing", "a", "uh", "oh", "!null", "thai", "area", "price"};
  return words;
}

inline Vocab small_vocab() {
  std::vector<std::string> tokens(Vocab::special_tokens().begin(), Vocab::special_tokens().end());
  for (const char* t : {"i", "want", "wont", "cheap", "chinese", "food", "in", "the", "north",
                        "ex", "##pen", "##sive", "restaurant", "play", "##ing", "a", "thai", "area",
                        "price", "range", "request", "inform", "##s", "won't", "um", "##ten"}) {
    tokens.push_back(t);
  }
  return Vocab::from_tokens(tokens);
}

inline WordConfusionNetwork random_wcn(Rng& rng, std::size_t max_bins = 6,
                                       std::size_t max_cands = 4) {
  WordConfusionNetwork w;
  const std::size_t bins = 1 + rng.below(max_bins);
  for (std::size_t m = 0; m < bins; ++m) {
    Bin b;
    const std::size_t n = 1 + rng.below(max_cands);
    std::set<std::string> used;
    for (std::size_t k = 0; k < n; ++k) {
      const std::string& word = word_pool()[rng.below(word_pool().size())];
      if (!used.insert(word).second) continue;
      // Occasionally below the pruning threshold.
      const double p = rng.bernoulli(0.15) ? 0.0005 * rng.uniform() : rng.uniform();
      b.candidates.push_back({word, p});
    }
    w.bins.push_back(std::move(b));
  }
  return w;
}

inline SystemAct random_act(Rng& rng) {
  static const std::vector<Triplet> pool = {{"request", "food", ""},
                                            {"inform", "pricerange", "cheap"},
                                            {"expl-conf", "area", "north"},
                                            {"welcomemsg", "", ""}};
  SystemAct act;
  const std::size_t n = rng.below(3);
  for (std::size_t i = 0; i < n; ++i) act.triplets.push_back(pool[rng.below(pool.size())]);
  return act;
}

// Plain-loop transformer encoder (post-LN, no posterior term), written
// independently of the autograd ops.
using Mat = std::vector<std::vector<double>>;

inline Mat to_mat(const Tensor& t) {
  Mat m(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) m[r][c] = t(r, c);
  return m;
}

inline Mat affine(const Mat& x, const Tensor& w, const Tensor& b) {
  Mat y(x.size(), std::vector<double>(w.cols(), 0.0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < w.rows(); ++k) s += x[i][k] * w(k, j);
      y[i][j] = s + b[j];
    }
  }
  return y;
}

inline Mat add_norm(const Mat& a, const Mat& b, const Tensor& gain, const Tensor& bias) {
  Mat y = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t n = a[i].size();
    std::vector<double> s(n);
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      s[j] = a[i][j] + b[i][j];
      mean += s[j];
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + 1e-12);
    for (std::size_t j = 0; j < n; ++j) y[i][j] = (s[j] - mean) * inv * gain[j] + bias[j];
  }
  return y;
}

inline Mat reference_encoder(const ParamStore& store, const EncoderParams& p,
                             const EncodedInput& in,
                             std::vector<std::vector<Mat>>* weights_out = nullptr) {
  const std::size_t t_len = in.length();
  const std::size_t d = p.config.d_model;
  const std::size_t heads = p.config.heads;
  const std::size_t dh = d / heads;
  const Tensor& tok = store[p.embeddings.token].value;
  const Tensor& pos = store[p.embeddings.position].value;
  const Tensor& seg = store[p.embeddings.segment].value;
  Mat x(t_len, std::vector<double>(d));
  for (std::size_t t = 0; t < t_len; ++t)
    for (std::size_t j = 0; j < d; ++j)
      x[t][j] = tok(in.token_ids[t], j) + pos(in.position_ids[t], j) + seg(in.segment_ids[t], j);

  for (const auto& layer : p.layers) {
    const auto& a = layer.attn;
    const Mat q = affine(x, store[a.wq].value, store[a.bq].value);
    const Mat k = affine(x, store[a.wk].value, store[a.bk].value);
    const Mat v = affine(x, store[a.wv].value, store[a.bv].value);
    Mat ctx(t_len, std::vector<double>(d, 0.0));
    std::vector<Mat> layer_weights;
    for (std::size_t h = 0; h < heads; ++h) {
      Mat w(t_len, std::vector<double>(t_len));
      for (std::size_t i = 0; i < t_len; ++i) {
        double mx = -INFINITY;
        for (std::size_t j = 0; j < t_len; ++j) {
          double s = 0.0;
          for (std::size_t c = 0; c < dh; ++c) s += q[i][h * dh + c] * k[j][h * dh + c];
          w[i][j] = s / std::sqrt(static_cast<double>(dh));
          mx = std::max(mx, w[i][j]);
        }
        double z = 0.0;
        for (std::size_t j = 0; j < t_len; ++j) {
          w[i][j] = std::exp(w[i][j] - mx);
          z += w[i][j];
        }
        for (std::size_t j = 0; j < t_len; ++j) w[i][j] /= z;
        for (std::size_t c = 0; c < dh; ++c) {
          double s = 0.0;
          for (std::size_t j = 0; j < t_len; ++j) s += w[i][j] * v[j][h * dh + c];
          ctx[i][h * dh + c] = s;
        }
      }
      layer_weights.push_back(std::move(w));
    }
    if (weights_out) weights_out->push_back(std::move(layer_weights));
    const Mat attn = affine(ctx, store[a.wo].value, store[a.bo].value);
    const Mat h1 = add_norm(x, attn, store[layer.ln1_gain].value, store[layer.ln1_bias].value);
    Mat ff = affine(h1, store[layer.ff1_w].value, store[layer.ff1_b].value);
    for (auto& row : ff)
      for (double& val : row) val = std::max(0.0, val);
    ff = affine(ff, store[layer.ff2_w].value, store[layer.ff2_b].value);
    x = add_norm(h1, ff, store[layer.ln2_gain].value, store[layer.ln2_bias].value);
  }
  return x;
}

// Per-utterance set comparison over normalized triplets.
struct BruteCounts {
  std::size_t tp = 0, fp = 0, fn = 0, exact = 0;
};

inline BruteCounts brute_force_counts(const std::vector<SemanticFrame>& preds,
                                      const std::vector<SemanticFrame>& golds) {
  BruteCounts c;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    std::vector<Triplet> p, g;
    for (const auto& t : preds[i].triplets) p.push_back(normalize(t));
    for (const auto& t : golds[i].triplets) g.push_back(normalize(t));
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    for (const auto& t : p) {
      bool hit = false;
      for (const auto& u : g) hit = hit || (t == u);
      hit ? ++c.tp : ++c.fp;
    }
    for (const auto& u : g) {
      bool hit = false;
      for (const auto& t : p) hit = hit || (t == u);
      if (!hit) ++c.fn;
    }
    if (p == g) ++c.exact;
  }
  return c;
}

inline std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("wcnslu_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace wcnslu::testing
