#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cft/numkernel.hpp"

namespace cft {

// Labels are stored as an n x K matrix of soft labels (row = probability
// vector over classes). One-hot at ingestion; mixed labels only appear on
// generated samples.
struct Dataset {
  Matrix features;  // n x d
  Matrix labels;    // n x K
  std::size_t class_count = 0;
  std::string split = "train";

  std::size_t size() const { return features.rows; }
};

// Index of the (first) maximal entry of a label row.
std::size_t label_argmax(std::span<const double> label);

// True iff the row is a valid one-hot vector.
bool is_one_hot(std::span<const double> label);

// Validates simplex invariants for every label row; throws on violation.
void validate_labels(const Matrix& labels);

// k isotropic Gaussian blobs, n_per_class samples each, balanced classes.
// Cluster centers are placed at mutual distance `separation`.
Dataset gen_blobs(std::size_t k, std::size_t n_per_class, double separation,
                  double noise, std::size_t d, std::uint64_t seed);

// Two interleaved half-circles in 2-D.
Dataset gen_two_moons(std::size_t n_per_class, double noise,
                      std::uint64_t seed);

// CSV with header "label,f0,...,f{d-1}"; integer labels in [0, K).
Dataset load_embeddings_csv(const std::string& path);

// Writes the documented CSV schema. Feature columns are named
// <prefix>0..<prefix>{d-1}. Labels written as argmax class ids.
void dump_embeddings_csv(const Dataset& ds, const std::string& path,
                         const std::string& prefix = "f");

struct Batch {
  std::vector<std::size_t> indices;
  Matrix features;
  Matrix labels;
};

// A seeded permutation of [0, n), chunked into batches. The permutation is
// distinct per epoch. A trailing chunk of size 1 is dropped (an anchor
// needs at least one other sample to form a pair).
std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n,
                                                    std::size_t batch_size,
                                                    std::uint64_t epoch,
                                                    std::uint64_t seed);

Batch make_batch(const Dataset& ds, const std::vector<std::size_t>& indices);

}  // namespace cft
