// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#include "patchsep/autoenc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "patchsep/errors.hpp"
#include "patchsep/rng.hpp"

namespace patchsep {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Z = sigmoid(A * W^T + b). A is B x in, W is out x in, Z becomes B x out.
// W is transposed into a scratch first so the accumulation runs along
// contiguous Z rows; per output element the sum runs over ascending j, the
// same order a plain dot product uses, so batched and single-vector passes
// agree bit for bit.
void affine_sigmoid(const Matrix& A, const Matrix& W,
                    const std::vector<double>& b, Matrix& Z) {
  const long batch = static_cast<long>(A.rows());
  const long in = static_cast<long>(W.cols());
  const long out = static_cast<long>(W.rows());
  Matrix wt(in, out);
  for (long i = 0; i < out; ++i) {
    for (long j = 0; j < in; ++j) {
      wt(j, i) = W(i, j);
    }
  }
  Z = Matrix(batch, out);
#pragma omp parallel for schedule(static)
  for (long r = 0; r < batch; ++r) {
    double* z = Z.row(r);
    for (long i = 0; i < out; ++i) z[i] = b[i];
    const double* a = A.row(r);
    for (long j = 0; j < in; ++j) {
      const double aj = a[j];
      const double* w = wt.row(j);
      for (long i = 0; i < out; ++i) z[i] += aj * w[i];
    }
    for (long i = 0; i < out; ++i) z[i] = sigmoid(z[i]);
  }
}

void check_input_dim(const AutoencoderModel& m, std::size_t dim) {
  if (static_cast<int>(dim) != m.input_size()) {
    throw DimensionMismatch("input dimension " + std::to_string(dim) +
                            " does not match model input " +
                            std::to_string(m.input_size()));
  }
}

Gradients zero_like(const AutoencoderModel& m) {
  Gradients g;
  g.weights.reserve(m.transitions());
  g.biases.reserve(m.transitions());
  for (std::size_t t = 0; t < m.transitions(); ++t) {
    g.weights.emplace_back(m.weights[t].rows(), m.weights[t].cols());
    g.biases.emplace_back(m.biases[t].size(), 0.0);
  }
  return g;
}

// Optimizer state shared across batches: Adam first/second moments, or the
// momentum velocity (kept in the first-moment slots).
struct OptimizerState {
  Gradients first;
  Gradients second;
  long step = 0;
};

void apply_update(AutoencoderModel& m, const Gradients& g,
                  const TrainConfig& cfg, OptimizerState& state) {
  ++state.step;
  if (cfg.optimizer == TrainConfig::Optimizer::kAdam) {
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t t = 0; t < m.transitions(); ++t) {
      auto update = [&](double* w, double* mo, double* vo, const double* grad,
                        long n) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) {
          mo[i] = cfg.beta1 * mo[i] + (1.0 - cfg.beta1) * grad[i];
          vo[i] = cfg.beta2 * vo[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
          const double mh = mo[i] / c1;
          const double vh = vo[i] / c2;
          w[i] -= cfg.learning_rate * mh / (std::sqrt(vh) + cfg.epsilon);
        }
      };
      update(m.weights[t].data().data(), state.first.weights[t].data().data(),
             state.second.weights[t].data().data(), g.weights[t].data().data(),
             static_cast<long>(m.weights[t].size()));
      update(m.biases[t].data(), state.first.biases[t].data(),
             state.second.biases[t].data(), g.biases[t].data(),
             static_cast<long>(m.biases[t].size()));
    }
  } else {
    for (std::size_t t = 0; t < m.transitions(); ++t) {
      auto update = [&](double* w, double* vel, const double* grad, long n) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) {
          vel[i] = cfg.momentum * vel[i] + grad[i];
          w[i] -= cfg.learning_rate * vel[i];
        }
      };
      update(m.weights[t].data().data(), state.first.weights[t].data().data(),
             g.weights[t].data().data(), static_cast<long>(m.weights[t].size()));
      update(m.biases[t].data(), state.first.biases[t].data(),
             g.biases[t].data(), static_cast<long>(m.biases[t].size()));
    }
  }
}

void format_float(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

AutoencoderModel init_model(const std::vector<int>& layer_sizes,
                            std::uint64_t seed) {
  const std::size_t n = layer_sizes.size();
  if (n < 3 || n % 2 == 0) {
    throw AsymmetricTopology("layer count must be odd and at least 3");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (layer_sizes[i] < 1) {
      throw AsymmetricTopology("layer sizes must be at least 1");
    }
    if (layer_sizes[i] != layer_sizes[n - 1 - i]) {
      throw AsymmetricTopology("layer sizes must be symmetric about the middle");
    }
  }

  AutoencoderModel m;
  m.layer_sizes = layer_sizes;
  m.code_index = static_cast<int>((n - 1) / 2);
  SeededRng rng(seed);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const int fan_in = layer_sizes[t];
    const int fan_out = layer_sizes[t + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Matrix w(fan_out, fan_in);
    for (double& v : w.data()) v = rng.uniform(-limit, limit);
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(fan_out, 0.0);
  }
  return m;
}

ForwardResult forward(const AutoencoderModel& m, const std::vector<double>& v) {
  check_input_dim(m, v.size());
  ForwardResult r;
  r.activations.resize(m.layer_sizes.size());
  r.activations[0] = v;
  for (std::size_t t = 0; t < m.transitions(); ++t) {
    const Matrix& w = m.weights[t];
    const std::vector<double>& a = r.activations[t];
    std::vector<double>& next = r.activations[t + 1];
    next.resize(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i) {
      double acc = m.biases[t][i];
      const double* wr = w.row(i);
      for (std::size_t j = 0; j < w.cols(); ++j) acc += a[j] * wr[j];
      next[i] = sigmoid(acc);
    }
  }
  r.code = r.activations[m.code_index];
  r.output = r.activations.back();
  return r;
}

std::vector<Matrix> forward_batch(const AutoencoderModel& m, const Matrix& batch) {
  check_input_dim(m, batch.cols());
  std::vector<Matrix> acts(m.layer_sizes.size());
  acts[0] = batch;
  for (std::size_t t = 0; t < m.transitions(); ++t) {
    affine_sigmoid(acts[t], m.weights[t], m.biases[t], acts[t + 1]);
  }
  return acts;
}

std::pair<double, Gradients> loss_and_grad(const AutoencoderModel& m,
                                           const Matrix& batch) {
  const std::vector<Matrix> acts = forward_batch(m, batch);
  const Matrix& out = acts.back();
  const long b_count = static_cast<long>(batch.rows());
  const long dim = static_cast<long>(batch.cols());

  double loss = 0.0;
  for (long r = 0; r < b_count; ++r) {
    const double* o = out.row(r);
    const double* x = batch.row(r);
    for (long c = 0; c < dim; ++c) {
      const double diff = o[c] - x[c];
      loss += diff * diff;
    }
  }
  loss /= static_cast<double>(b_count) * static_cast<double>(dim);

  Gradients g = zero_like(m);
  const double scale = 2.0 / (static_cast<double>(b_count) * static_cast<double>(dim));

  // delta holds dLoss/d(pre-activation) of the layer currently being peeled.
  Matrix delta(b_count, dim);
#pragma omp parallel for schedule(static)
  for (long r = 0; r < b_count; ++r) {
    double* d = delta.row(r);
    const double* o = out.row(r);
    const double* x = batch.row(r);
    for (long c = 0; c < dim; ++c) {
      d[c] = scale * (o[c] - x[c]) * o[c] * (1.0 - o[c]);
    }
  }

  for (long t = static_cast<long>(m.transitions()) - 1; t >= 0; --t) {
    const Matrix& a_prev = acts[t];
    const long out_n = static_cast<long>(m.weights[t].rows());
    const long in_n = static_cast<long>(m.weights[t].cols());

    // dW[i] = sum_b delta[b][i] * a_prev[b]; db[i] = sum_b delta[b][i].
    // Each i owns its output row, and batch rows are summed in ascending
    // order, so the result is independent of the thread count.
    Matrix& dw = g.weights[t];
    std::vector<double>& db = g.biases[t];
#pragma omp parallel for schedule(static)
    for (long i = 0; i < out_n; ++i) {
      double* dwr = dw.row(i);
      double acc = 0.0;
      for (long b = 0; b < b_count; ++b) {
        const double dbi = delta(b, i);
        acc += dbi;
        const double* a = a_prev.row(b);
        for (long j = 0; j < in_n; ++j) dwr[j] += dbi * a[j];
      }
      db[i] = acc;
    }

    if (t > 0) {
      Matrix prev(b_count, in_n);
#pragma omp parallel for schedule(static)
      for (long b = 0; b < b_count; ++b) {
        double* dp = prev.row(b);
        const double* dl = delta.row(b);
        for (long i = 0; i < out_n; ++i) {
          const double di = dl[i];
          const double* w = m.weights[t].row(i);
          for (long j = 0; j < in_n; ++j) dp[j] += di * w[j];
        }
        const double* a = a_prev.row(b);
        for (long j = 0; j < in_n; ++j) dp[j] *= a[j] * (1.0 - a[j]);
      }
      delta = std::move(prev);
    }
  }
  return {loss, std::move(g)};
}

std::pair<AutoencoderModel, TrainLog> train(AutoencoderModel model,
                                            const Matrix& data,
                                            const TrainConfig& cfg) {
  check_input_dim(model, data.cols());
  if (data.rows() == 0) {
    throw DimensionMismatch("training set is empty");
  }
  if (cfg.epochs < 1 || cfg.batch_size < 1 || cfg.learning_rate < 0) {
    throw Error("training config requires epochs >= 1, batch >= 1, lr >= 0");
  }

  const long n = static_cast<long>(data.rows());
  const long dim = static_cast<long>(data.cols());

  OptimizerState state;
  state.first = zero_like(model);
  if (cfg.optimizer == TrainConfig::Optimizer::kAdam) {
    state.second = zero_like(model);
  }

  SeededRng rng(cfg.seed);
  std::vector<long> order(n);
  std::iota(order.begin(), order.end(), 0);

  TrainLog log;
  log.epoch_loss.reserve(cfg.epochs);
  for (long epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle) rng.shuffle(order);
    double weighted_loss = 0.0;
    for (long start = 0; start < n; start += cfg.batch_size) {
      const long bsz = std::min(cfg.batch_size, n - start);
      Matrix batch(bsz, dim);
      for (long r = 0; r < bsz; ++r) {
        const double* src = data.row(order[start + r]);
        std::copy(src, src + dim, batch.row(r));
      }
      auto [loss, grads] = loss_and_grad(model, batch);
      if (!std::isfinite(loss)) {
        throw NonFiniteLoss("loss became non-finite at epoch " +
                            std::to_string(epoch));
      }
      weighted_loss += loss * static_cast<double>(bsz);
      apply_update(model, grads, cfg, state);
    }
    log.epoch_loss.push_back(weighted_loss / static_cast<double>(n));
  }
  return {std::move(model), std::move(log)};
}

std::pair<AutoencoderModel, TrainLog> train(AutoencoderModel model,
                                            const PatchSet& patches,
                                            const TrainConfig& cfg) {
  return train(std::move(model), patches.vectors, cfg);
}

namespace {

// Runs forward_batch over row chunks and copies one layer's activations into
// an N x size result. Chunking bounds memory; per-row results are identical
// regardless of the grouping.
Matrix layer_over_rows(const AutoencoderModel& m, const Matrix& rows,
                       std::size_t layer) {
  const long n = static_cast<long>(rows.rows());
  const long dim = static_cast<long>(rows.cols());
  const long size = m.layer_sizes[layer];
  const long chunk = 512;
  Matrix out(n, size);
  for (long start = 0; start < n; start += chunk) {
    const long bsz = std::min(chunk, n - start);
    Matrix batch(bsz, dim);
    for (long r = 0; r < bsz; ++r) {
      const double* src = rows.row(start + r);
      std::copy(src, src + dim, batch.row(r));
    }
    const std::vector<Matrix> acts = forward_batch(m, batch);
    const Matrix& layer_acts = acts[layer];
    for (long r = 0; r < bsz; ++r) {
      const double* src = layer_acts.row(r);
      std::copy(src, src + size, out.row(start + r));
    }
  }
  return out;
}

}  // namespace

Matrix encode(const AutoencoderModel& m, const Matrix& rows) {
  return layer_over_rows(m, rows, static_cast<std::size_t>(m.code_index));
}

Matrix encode(const AutoencoderModel& m, const PatchSet& patches) {
  return encode(m, patches.vectors);
}

Matrix reconstruct(const AutoencoderModel& m, const Matrix& rows) {
  return layer_over_rows(m, rows, m.layer_sizes.size() - 1);
}

Matrix reconstruct(const AutoencoderModel& m, const PatchSet& patches) {
  return reconstruct(m, patches.vectors);
}

void save_model(const AutoencoderModel& m, const std::string& path) {
  std::string out = "PATCHSEP-AE v1\n";
  for (std::size_t i = 0; i < m.layer_sizes.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(m.layer_sizes[i]);
  }
  out += '\n';
  out += m.activation;
  out += '\n';
  for (std::size_t t = 0; t < m.transitions(); ++t) {
    const Matrix& w = m.weights[t];
    out += "W " + std::to_string(w.rows()) + ' ' + std::to_string(w.cols()) + '\n';
    for (std::size_t r = 0; r < w.rows(); ++r) {
      const double* row = w.row(r);
      for (std::size_t c = 0; c < w.cols(); ++c) {
        if (c) out += ' ';
        format_float(out, row[c]);
      }
      out += '\n';
    }
    const std::vector<double>& b = m.biases[t];
    out += "b " + std::to_string(b.size()) + '\n';
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (i) out += ' ';
      format_float(out, b[i]);
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure("cannot open " + path + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoFailure("short write to " + path);
}

AutoencoderModel load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoFailure("cannot open " + path);
  std::string magic;
  if (!std::getline(f, magic) || magic != "PATCHSEP-AE v1") {
    throw MalformedModelFile(path + ": bad magic line");
  }
  std::string sizes_line;
  if (!std::getline(f, sizes_line)) {
    throw MalformedModelFile(path + ": missing layer sizes");
  }
  AutoencoderModel m;
  {
    std::istringstream ss(sizes_line);
    int v;
    while (ss >> v) {
      if (v < 1) throw MalformedModelFile(path + ": layer size below 1");
      m.layer_sizes.push_back(v);
    }
  }
  if (m.layer_sizes.size() < 2) {
    throw MalformedModelFile(path + ": fewer than two layers");
  }
  m.code_index = static_cast<int>((m.layer_sizes.size() - 1) / 2);
  if (!std::getline(f, m.activation) || m.activation != "logistic") {
    throw MalformedModelFile(path + ": unknown activation tag");
  }

  for (std::size_t t = 0; t + 1 < m.layer_sizes.size(); ++t) {
    const std::size_t rows = m.layer_sizes[t + 1];
    const std::size_t cols = m.layer_sizes[t];
    std::string tag;
    std::size_t r = 0, c = 0;
    if (!(f >> tag >> r >> c) || tag != "W" || r != rows || c != cols) {
      throw MalformedModelFile(path + ": bad weight header for transition " +
                               std::to_string(t));
    }
    Matrix w(rows, cols);
    for (double& v : w.data()) {
      if (!(f >> v)) {
        throw MalformedModelFile(path + ": truncated weight matrix " +
                                 std::to_string(t));
      }
    }
    m.weights.push_back(std::move(w));
    std::size_t blen = 0;
    if (!(f >> tag >> blen) || tag != "b" || blen != rows) {
      throw MalformedModelFile(path + ": bad bias header for transition " +
                               std::to_string(t));
    }
    std::vector<double> b(blen);
    for (double& v : b) {
      if (!(f >> v)) {
        throw MalformedModelFile(path + ": truncated bias vector " +
                                 std::to_string(t));
      }
    }
    m.biases.push_back(std::move(b));
  }
  return m;
}

std::vector<Matrix> export_weight_windows(const AutoencoderModel& m,
                                          const PatchGridSpec& spec) {
  const Matrix& final_w = m.weights.back();
  const long dim = static_cast<long>(spec.h) * spec.l;
  if (static_cast<long>(final_w.rows()) != dim) {
    throw ShapeMismatch("final weight matrix has " +
                        std::to_string(final_w.rows()) + " rows, patch needs " +
                        std::to_string(dim));
  }
  std::vector<Matrix> windows;
  windows.reserve(final_w.cols());
  for (std::size_t u = 0; u < final_w.cols(); ++u) {
    Matrix win(spec.h, spec.l);
    for (int c = 0; c < spec.h; ++c) {
      for (int t = 0; t < spec.l; ++t) {
        win(c, t) = final_w(static_cast<std::size_t>(c) * spec.l + t, u);
      }
    }
    windows.push_back(std::move(win));
  }
  return windows;
}

}  // namespace patchsep
