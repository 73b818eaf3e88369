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

#include "wcnslu/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

#include "wcnslu/error.hpp"

namespace wcnslu::ops {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Map = Eigen::Map<RowMat>;
using CMap = Eigen::Map<const RowMat>;

CMap view(const Tensor& t) {
  return CMap(t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
}
Map view(Tensor& t) {
  return Map(t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
}

[[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) {
  throw Error(ErrorCode::kShapeMismatch,
              std::string(op) + ": " + a.shape_string() + " vs " + b.shape_string());
}

void require_same_graph(Var a, Var b) {
  if (&a.graph() != &b.graph()) {
    throw Error(ErrorCode::kInvalidArgument, "operands belong to different graphs");
  }
}

Var unary(Var a, Tensor out, Tensor local_grad) {
  return a.graph().emit(std::move(out), {a},
                        [a, d = std::move(local_grad)](Graph& g, const Tensor& go) {
                          if (Tensor* ga = g.grad_sink(a)) {
                            for (std::size_t i = 0; i < go.size(); ++i) (*ga)[i] += go[i] * d[i];
                          }
                        });
}

}  // namespace

Var matmul(Var a, Var b) {
  require_same_graph(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.rows()) shape_error("matmul", av, bv);
  Tensor out(av.rows(), bv.cols());
  view(out).noalias() = view(av) * view(bv);
  return a.graph().emit(std::move(out), {a, b}, [a, b](Graph& g, const Tensor& go) {
    if (Tensor* ga = g.grad_sink(a)) view(*ga).noalias() += view(go) * view(b.value()).transpose();
    if (Tensor* gb = g.grad_sink(b)) view(*gb).noalias() += view(a.value()).transpose() * view(go);
  });
}

Var matmul_nt(Var a, Var b) {
  require_same_graph(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.cols()) shape_error("matmul_nt", av, bv);
  Tensor out(av.rows(), bv.rows());
  view(out).noalias() = view(av) * view(bv).transpose();
  return a.graph().emit(std::move(out), {a, b}, [a, b](Graph& g, const Tensor& go) {
    if (Tensor* ga = g.grad_sink(a)) view(*ga).noalias() += view(go) * view(b.value());
    if (Tensor* gb = g.grad_sink(b)) view(*gb).noalias() += view(go).transpose() * view(a.value());
  });
}

Var transpose(Var a) {
  const Tensor& av = a.value();
  Tensor out(av.cols(), av.rows());
  view(out) = view(av).transpose();
  return a.graph().emit(std::move(out), {a}, [a](Graph& g, const Tensor& go) {
    if (Tensor* ga = g.grad_sink(a)) view(*ga) += view(go).transpose();
  });
}

Var add(Var a, Var b) {
  require_same_graph(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (!av.same_shape(bv)) shape_error("add", av, bv);
  Tensor out = av;
  out.add_scaled(bv);
  return a.graph().emit(std::move(out), {a, b}, [a, b](Graph& g, const Tensor& go) {
    if (Tensor* ga = g.grad_sink(a)) ga->add_scaled(go);
    if (Tensor* gb = g.grad_sink(b)) gb->add_scaled(go);
  });
}

Var add_row(Var a, Var bias) {
  require_same_graph(a, bias);
  const Tensor& av = a.value();
  const Tensor& bv = bias.value();
  if (bv.rows() != 1 || bv.cols() != av.cols()) shape_error("add_row", av, bv);
  Tensor out = av;
  view(out).rowwise() += view(bv).row(0);
  return a.graph().emit(std::move(out), {a, bias}, [a, bias](Graph& g, const Tensor& go) {
    if (Tensor* ga = g.grad_sink(a)) ga->add_scaled(go);
    if (Tensor* gb = g.grad_sink(bias)) view(*gb).row(0) += view(go).colwise().sum();
  });
}

Var add_const(Var a, const Tensor& c) {
  const Tensor& av = a.value();
  if (!av.same_shape(c)) shape_error("add_const", av, c);
  Tensor out = av;
  out.add_scaled(c);
  return a.graph().emit(std::move(out), {a}, [a](Graph& g, const Tensor& go) {
    if (Tensor* ga = g.grad_sink(a)) ga->add_scaled(go);
  });
}

Var scale(Var a, double factor) {
  Tensor out = a.value();
  for (double& v : out.values()) v *= factor;
  return a.graph().emit(std::move(out), {a}, [a, factor](Graph& g, const Tensor& go) {
    if (Tensor* ga = g.grad_sink(a)) ga->add_scaled(go, factor);
  });
}

Var mul(Var a, Var b) {
  require_same_graph(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (!av.same_shape(bv)) shape_error("mul", av, bv);
  Tensor out(av.rows(), av.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return a.graph().emit(std::move(out), {a, b}, [a, b](Graph& g, const Tensor& go) {
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    if (Tensor* ga = g.grad_sink(a)) {
      for (std::size_t i = 0; i < go.size(); ++i) (*ga)[i] += go[i] * bv[i];
    }
    if (Tensor* gb = g.grad_sink(b)) {
      for (std::size_t i = 0; i < go.size(); ++i) (*gb)[i] += go[i] * av[i];
    }
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw Error(ErrorCode::kShapeMismatch, "concat_cols of nothing");
  const std::size_t rows = parts[0].rows();
  std::size_t cols = 0;
  for (const Var& p : parts) {
    require_same_graph(parts[0], p);
    if (p.rows() != rows) shape_error("concat_cols", parts[0].value(), p.value());
    cols += p.cols();
  }
  Tensor out(rows, cols);
  std::size_t offset = 0;
  for (const Var& p : parts) {
    view(out).middleCols(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(p.cols())) =
        view(p.value());
    offset += p.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts[0].graph().emit(std::move(out), parts, [inputs](Graph& g, const Tensor& go) {
    std::size_t off = 0;
    for (const Var& p : inputs) {
      const auto c = static_cast<Eigen::Index>(p.cols());
      if (Tensor* gp = g.grad_sink(p)) {
        view(*gp) += view(go).middleCols(static_cast<Eigen::Index>(off), c);
      }
      off += p.cols();
    }
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw Error(ErrorCode::kShapeMismatch, "concat_rows of nothing");
  const std::size_t cols = parts[0].cols();
  std::size_t rows = 0;
  for (const Var& p : parts) {
    require_same_graph(parts[0], p);
    if (p.cols() != cols) shape_error("concat_rows", parts[0].value(), p.value());
    rows += p.rows();
  }
  Tensor out(rows, cols);
  std::size_t offset = 0;
  for (const Var& p : parts) {
    std::copy(p.value().data(), p.value().data() + p.value().size(), out.data() + offset * cols);
    offset += p.rows();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts[0].graph().emit(std::move(out), parts, [inputs](Graph& g, const Tensor& go) {
    std::size_t off = 0;
    for (const Var& p : inputs) {
      if (Tensor* gp = g.grad_sink(p)) {
        const double* src = go.data() + off * go.cols();
        for (std::size_t i = 0; i < gp->size(); ++i) (*gp)[i] += src[i];
      }
      off += p.rows();
    }
  });
}

Var slice_cols(Var a, std::size_t start, std::size_t count) {
  const Tensor& av = a.value();
  if (start + count > av.cols()) {
    throw Error(ErrorCode::kIndexOutOfRange, "slice_cols beyond " + av.shape_string());
  }
  Tensor out(av.rows(), count);
  view(out) = view(av).middleCols(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(count));
  return a.graph().emit(std::move(out), {a}, [a, start, count](Graph& g, const Tensor& go) {
    if (Tensor* ga = g.grad_sink(a)) {
      view(*ga).middleCols(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(count)) +=
          view(go);
    }
  });
}

Var slice_rows(Var a, std::size_t start, std::size_t count) {
  const Tensor& av = a.value();
  if (start + count > av.rows()) {
    throw Error(ErrorCode::kIndexOutOfRange, "slice_rows beyond " + av.shape_string());
  }
  Tensor out(count, av.cols());
  std::copy(av.data() + start * av.cols(), av.data() + (start + count) * av.cols(), out.data());
  return a.graph().emit(std::move(out), {a}, [a, start](Graph& g, const Tensor& go) {
    if (Tensor* ga = g.grad_sink(a)) {
      double* dst = ga->data() + start * ga->cols();
      for (std::size_t i = 0; i < go.size(); ++i) dst[i] += go[i];
    }
  });
}

Var gather_rows(Var table, std::span<const std::size_t> ids) {
  const Tensor& tv = table.value();
  Tensor out(ids.size(), tv.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= tv.rows()) {
      throw Error(ErrorCode::kIndexOutOfRange, "row id " + std::to_string(ids[i]) +
                                                   " outside table " + tv.shape_string());
    }
    std::copy_n(tv.data() + ids[i] * tv.cols(), tv.cols(), out.data() + i * tv.cols());
  }
  std::vector<std::size_t> idx(ids.begin(), ids.end());
  return table.graph().emit(std::move(out), {table}, [table, idx](Graph& g, const Tensor& go) {
    if (Tensor* gt = g.grad_sink(table)) {
      const std::size_t c = go.cols();
      for (std::size_t i = 0; i < idx.size(); ++i) {
        double* dst = gt->data() + idx[i] * c;
        const double* src = go.data() + i * c;
        for (std::size_t j = 0; j < c; ++j) dst[j] += src[j];
      }
    }
  });
}

Var repeat_rows(Var a, std::size_t n) {
  const Tensor& av = a.value();
  if (av.rows() != 1) throw Error(ErrorCode::kShapeMismatch, "repeat_rows expects 1 x m");
  Tensor out(n, av.cols());
  for (std::size_t i = 0; i < n; ++i) std::copy_n(av.data(), av.cols(), out.data() + i * av.cols());
  return a.graph().emit(std::move(out), {a}, [a](Graph& g, const Tensor& go) {
    if (Tensor* ga = g.grad_sink(a)) view(*ga).row(0) += view(go).colwise().sum();
  });
}

Var mean_rows(Var a) {
  const Tensor& av = a.value();
  if (av.rows() == 0) throw Error(ErrorCode::kShapeMismatch, "mean_rows of empty tensor");
  Tensor out(1, av.cols());
  view(out).row(0) = view(av).colwise().mean();
  const double inv = 1.0 / static_cast<double>(av.rows());
  return a.graph().emit(std::move(out), {a}, [a, inv](Graph& g, const Tensor& go) {
    if (Tensor* ga = g.grad_sink(a)) view(*ga).rowwise() += view(go).row(0) * inv;
  });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  return a.graph().emit(Tensor::scalar(s), {a}, [a](Graph& g, const Tensor& go) {
    if (Tensor* ga = g.grad_sink(a)) {
      for (double& v : ga->values()) v += go[0];
    }
  });
}

Var softmax_rows(Var a) {
  const Tensor& av = a.value();
  Tensor out(av.rows(), av.cols());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    auto in = av.row_span(r);
    auto o = out.row_span(r);
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : in) mx = std::max(mx, v);
    double z = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      o[j] = std::exp(in[j] - mx);
      z += o[j];
    }
    for (double& v : o) v /= z;
  }
  Tensor y = out;
  return a.graph().emit(std::move(out), {a}, [a, y = std::move(y)](Graph& g, const Tensor& go) {
    Tensor* ga = g.grad_sink(a);
    if (!ga) return;
    for (std::size_t r = 0; r < y.rows(); ++r) {
      double dot = 0.0;
      for (std::size_t j = 0; j < y.cols(); ++j) dot += y(r, j) * go(r, j);
      for (std::size_t j = 0; j < y.cols(); ++j) (*ga)(r, j) += y(r, j) * (go(r, j) - dot);
    }
  });
}

Var tanh(Var a) {
  const Tensor& av = a.value();
  Tensor out(av.rows(), av.cols()), d(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.size(); ++i) {
    out[i] = std::tanh(av[i]);
    d[i] = 1.0 - out[i] * out[i];
  }
  return unary(a, std::move(out), std::move(d));
}

Var relu(Var a) {
  const Tensor& av = a.value();
  Tensor out(av.rows(), av.cols()), d(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.size(); ++i) {
    out[i] = av[i] > 0.0 ? av[i] : 0.0;
    d[i] = av[i] > 0.0 ? 1.0 : 0.0;
  }
  return unary(a, std::move(out), std::move(d));
}

Var sigmoid(Var a) {
  const Tensor& av = a.value();
  Tensor out(av.rows(), av.cols()), d(av.rows(), av.cols());
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double x = av[i];
    out[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    d[i] = out[i] * (1.0 - out[i]);
  }
  return unary(a, std::move(out), std::move(d));
}

Var layer_norm(Var x, Var gain, Var bias, double eps) {
  require_same_graph(x, gain);
  require_same_graph(x, bias);
  const Tensor& xv = x.value();
  const std::size_t n = xv.rows(), m = xv.cols();
  if (gain.rows() != 1 || gain.cols() != m) shape_error("layer_norm gain", xv, gain.value());
  if (bias.rows() != 1 || bias.cols() != m) shape_error("layer_norm bias", xv, bias.value());
  Tensor normed(n, m);
  std::vector<double> inv_std(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto in = xv.row_span(r);
    double mean = 0.0;
    for (double v : in) mean += v;
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (double v : in) var += (v - mean) * (v - mean);
    var /= static_cast<double>(m);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < m; ++j) normed(r, j) = (in[j] - mean) * inv_std[r];
  }
  Tensor out(n, m);
  const Tensor& gv = gain.value();
  const Tensor& bv = bias.value();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < m; ++j) out(r, j) = normed(r, j) * gv[j] + bv[j];
  }
  return x.graph().emit(
      std::move(out), {x, gain, bias},
      [x, gain, bias, normed = std::move(normed), inv_std = std::move(inv_std)](
          Graph& g, const Tensor& go) {
        const std::size_t n = go.rows(), m = go.cols();
        if (Tensor* gg = g.grad_sink(gain)) {
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t j = 0; j < m; ++j) (*gg)[j] += go(r, j) * normed(r, j);
        }
        if (Tensor* gb = g.grad_sink(bias)) {
          for (std::size_t r = 0; r < n; ++r)
            for (std::size_t j = 0; j < m; ++j) (*gb)[j] += go(r, j);
        }
        if (Tensor* gx = g.grad_sink(x)) {
          const Tensor& gv = gain.value();
          std::vector<double> dn(m);
          for (std::size_t r = 0; r < n; ++r) {
            double mean_dn = 0.0, mean_dn_n = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
              dn[j] = go(r, j) * gv[j];
              mean_dn += dn[j];
              mean_dn_n += dn[j] * normed(r, j);
            }
            mean_dn /= static_cast<double>(m);
            mean_dn_n /= static_cast<double>(m);
            for (std::size_t j = 0; j < m; ++j) {
              (*gx)(r, j) += inv_std[r] * (dn[j] - mean_dn - normed(r, j) * mean_dn_n);
            }
          }
        }
      });
}

Var dropout(Var x, double p) {
  if (p < 0.0 || p >= 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "dropout probability must be in [0,1)");
  }
  Graph& graph = x.graph();
  if (!graph.training() || p == 0.0) return x;
  const Tensor& xv = x.value();
  Tensor mask(xv.rows(), xv.cols());
  const double keep_scale = 1.0 / (1.0 - p);
  Rng& rng = graph.rng();
  for (double& m : mask.values()) m = rng.uniform() >= p ? keep_scale : 0.0;
  Tensor out(xv.rows(), xv.cols());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * mask[i];
  return unary(x, std::move(out), std::move(mask));
}

Var add_prob_bias(Var scores, Var lambda, std::size_t head, std::span<const double> probs) {
  require_same_graph(scores, lambda);
  const Tensor& sv = scores.value();
  if (probs.size() != sv.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "probability sequence length " +
                                               std::to_string(probs.size()) + " vs scores " +
                                               sv.shape_string());
  }
  if (lambda.rows() != 1 || head >= lambda.cols()) {
    throw Error(ErrorCode::kIndexOutOfRange, "head index outside lambda row");
  }
  const double lam = lambda.value()[head];
  Tensor out = sv;
  for (std::size_t i = 0; i < sv.rows(); ++i)
    for (std::size_t j = 0; j < sv.cols(); ++j) out(i, j) += lam * probs[j];
  std::vector<double> p(probs.begin(), probs.end());
  return scores.graph().emit(std::move(out), {scores, lambda},
                             [scores, lambda, head, p](Graph& g, const Tensor& go) {
                               if (Tensor* gs = g.grad_sink(scores)) gs->add_scaled(go);
                               if (Tensor* gl = g.grad_sink(lambda)) {
                                 double acc = 0.0;
                                 for (std::size_t i = 0; i < go.rows(); ++i)
                                   for (std::size_t j = 0; j < go.cols(); ++j)
                                     acc += go(i, j) * p[j];
                                 (*gl)[head] += acc;
                               }
                             });
}

Var cross_entropy(Var logits, std::span<const std::size_t> targets) {
  const Tensor& lv = logits.value();
  if (targets.size() != lv.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "cross_entropy: " + std::to_string(targets.size()) +
                                               " targets for " + lv.shape_string());
  }
  Tensor probs(lv.rows(), lv.cols());
  double loss = 0.0;
  for (std::size_t r = 0; r < lv.rows(); ++r) {
    if (targets[r] >= lv.cols()) throw Error(ErrorCode::kIndexOutOfRange, "cross_entropy target");
    auto in = lv.row_span(r);
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : in) mx = std::max(mx, v);
    double z = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) {
      probs(r, j) = std::exp(in[j] - mx);
      z += probs(r, j);
    }
    for (std::size_t j = 0; j < in.size(); ++j) probs(r, j) /= z;
    loss += std::log(z) + mx - in[targets[r]];
  }
  std::vector<std::size_t> t(targets.begin(), targets.end());
  return logits.graph().emit(Tensor::scalar(loss), {logits},
                             [logits, t, probs = std::move(probs)](Graph& g, const Tensor& go) {
                               if (Tensor* gl = g.grad_sink(logits)) {
                                 for (std::size_t r = 0; r < probs.rows(); ++r) {
                                   for (std::size_t j = 0; j < probs.cols(); ++j) {
                                     const double onehot = j == t[r] ? 1.0 : 0.0;
                                     (*gl)(r, j) += go[0] * (probs(r, j) - onehot);
                                   }
                                 }
                               }
                             });
}

Var bce_with_logits(Var logits, const Tensor& targets) {
  const Tensor& lv = logits.value();
  if (!lv.same_shape(targets)) shape_error("bce_with_logits", lv, targets);
  double loss = 0.0;
  Tensor d(lv.rows(), lv.cols());
  for (std::size_t i = 0; i < lv.size(); ++i) {
    const double x = lv[i];
    const double t = targets[i];
    loss += std::max(x, 0.0) - x * t + std::log1p(std::exp(-std::abs(x)));
    const double s = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    d[i] = s - t;
  }
  return logits.graph().emit(Tensor::scalar(loss), {logits},
                             [logits, d = std::move(d)](Graph& g, const Tensor& go) {
                               if (Tensor* gl = g.grad_sink(logits)) gl->add_scaled(d, go[0]);
                             });
}

Var nll(Var probs, std::span<const std::size_t> targets, double floor) {
  const Tensor& pv = probs.value();
  if (targets.size() != pv.rows()) {
    throw Error(ErrorCode::kShapeMismatch, "nll: target count vs " + pv.shape_string());
  }
  double loss = 0.0;
  for (std::size_t r = 0; r < pv.rows(); ++r) {
    if (targets[r] >= pv.cols()) throw Error(ErrorCode::kIndexOutOfRange, "nll target");
    loss -= std::log(std::max(pv(r, targets[r]), floor));
  }
  std::vector<std::size_t> t(targets.begin(), targets.end());
  return probs.graph().emit(Tensor::scalar(loss), {probs},
                            [probs, t, floor](Graph& g, const Tensor& go) {
                              if (Tensor* gp = g.grad_sink(probs)) {
                                const Tensor& pv = probs.value();
                                for (std::size_t r = 0; r < t.size(); ++r) {
                                  const double v = pv(r, t[r]);
                                  if (v > floor) (*gp)(r, t[r]) -= go[0] / v;
                                }
                              }
                            });
}

Var gate_mix(Var gate, Var a, Var b) {
  require_same_graph(gate, a);
  require_same_graph(gate, b);
  const Tensor& gv = gate.value();
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (!av.same_shape(bv)) shape_error("gate_mix", av, bv);
  if (gv.cols() != 1 || gv.rows() != av.rows()) shape_error("gate_mix gate", gv, av);
  Tensor out(av.rows(), av.cols());
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t j = 0; j < av.cols(); ++j)
      out(r, j) = gv[r] * av(r, j) + (1.0 - gv[r]) * bv(r, j);
  return gate.graph().emit(std::move(out), {gate, a, b}, [gate, a, b](Graph& g, const Tensor& go) {
    const Tensor& gv = gate.value();
    const Tensor& av = a.value();
    const Tensor& bv = b.value();
    Tensor* gg = g.grad_sink(gate);
    Tensor* ga = g.grad_sink(a);
    Tensor* gb = g.grad_sink(b);
    for (std::size_t r = 0; r < go.rows(); ++r) {
      double acc = 0.0;
      for (std::size_t j = 0; j < go.cols(); ++j) {
        if (ga) (*ga)(r, j) += gv[r] * go(r, j);
        if (gb) (*gb)(r, j) += (1.0 - gv[r]) * go(r, j);
        acc += go(r, j) * (av(r, j) - bv(r, j));
      }
      if (gg) (*gg)[r] += acc;
    }
  });
}

}  // namespace wcnslu::ops
