// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "patchsep/matrix.hpp"
#include "patchsep/patching.hpp"

namespace patchsep {

// Fully-connected autoencoder with a logistic activation on every
// transition. Layer sizes are symmetric about the bottleneck, e.g.
// [150, 50, 18, 6, 18, 50, 150] with the 6-unit code layer in the middle.
struct AutoencoderModel {
  std::vector<int> layer_sizes;
  std::vector<Matrix> weights;              // weights[t]: sizes[t+1] x sizes[t]
  std::vector<std::vector<double>> biases;  // biases[t]: sizes[t+1]
  int code_index = 0;                       // bottleneck position, (L-1)/2
  std::string activation = "logistic";

  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  int code_size() const { return layer_sizes[code_index]; }
  std::size_t transitions() const { return weights.size(); }
};

struct TrainConfig {
  enum class Optimizer { kSgdMomentum, kAdam };

  Optimizer optimizer = Optimizer::kAdam;
  double learning_rate = 1e-3;
  double momentum = 0.9;  // sgd_momentum only
  double beta1 = 0.9;     // adam
  double beta2 = 0.999;   // adam
  double epsilon = 1e-8;  // adam
  long batch_size = 128;
  long epochs = 200;
  std::uint64_t seed = 1234;
  bool shuffle = true;
};

// Mean squared reconstruction error after each epoch, computed on the
// pre-update batches of that epoch.
struct TrainLog {
  std::vector<double> epoch_loss;
};

struct ForwardResult {
  std::vector<std::vector<double>> activations;  // one per layer, [0] = input
  std::vector<double> code;
  std::vector<double> output;
};

struct Gradients {
  std::vector<Matrix> weights;
  std::vector<std::vector<double>> biases;
};

// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases.
// Identical seeds produce bit-identical models.
AutoencoderModel init_model(const std::vector<int>& layer_sizes,
                            std::uint64_t seed);

// Single-vector forward pass: a0 = v, a_{t+1} = sigma(W_t a_t + b_t).
ForwardResult forward(const AutoencoderModel& m, const std::vector<double>& v);

// Batched forward pass; result[t] holds the activations of layer t for every
// batch row (result[0] is the input batch itself).
std::vector<Matrix> forward_batch(const AutoencoderModel& m, const Matrix& batch);

// Reconstruction loss (1/(B*d)) * sum ||output - input||^2 and its exact
// reverse-mode gradients.
std::pair<double, Gradients> loss_and_grad(const AutoencoderModel& m,
                                           const Matrix& batch);

// Seeded minibatch training; returns the trained model and per-epoch loss.
std::pair<AutoencoderModel, TrainLog> train(AutoencoderModel model,
                                            const Matrix& data,
                                            const TrainConfig& cfg);
std::pair<AutoencoderModel, TrainLog> train(AutoencoderModel model,
                                            const PatchSet& patches,
                                            const TrainConfig& cfg);

// Bottleneck activations, one row per input row (N x code_size).
Matrix encode(const AutoencoderModel& m, const Matrix& rows);
Matrix encode(const AutoencoderModel& m, const PatchSet& patches);

// Final-layer activations, one row per input row (N x d).
Matrix reconstruct(const AutoencoderModel& m, const Matrix& rows);
Matrix reconstruct(const AutoencoderModel& m, const PatchSet& patches);

// Textual model file; load(save(m)) reproduces every parameter bit-exactly.
void save_model(const AutoencoderModel& m, const std::string& path);
AutoencoderModel load_model(const std::string& path);

// Re-roll each column of the final weight matrix into an h x l window,
// one window per unit of the last hidden layer.
std::vector<Matrix> export_weight_windows(const AutoencoderModel& m,
                                          const PatchGridSpec& spec);

}  // namespace patchsep
