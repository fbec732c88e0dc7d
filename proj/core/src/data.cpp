#include "cft/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "cft/rng.hpp"

namespace cft {

std::size_t label_argmax(std::span<const double> label) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < label.size(); ++j) {
    if (label[j] > label[best]) best = j;
  }
  return best;
}

bool is_one_hot(std::span<const double> label) {
  std::size_t ones = 0;
  for (double x : label) {
    if (x == 1.0) {
      ++ones;
    } else if (x != 0.0) {
      return false;
    }
  }
  return ones == 1;
}

void validate_labels(const Matrix& labels) {
  for (std::size_t i = 0; i < labels.rows; ++i) {
    double sum = 0.0;
    for (double x : labels.row(i)) {
      if (!(x >= 0.0 && x <= 1.0 + 1e-9)) {
        throw std::invalid_argument("label entry out of [0,1] in row " +
                                    std::to_string(i));
      }
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("label row " + std::to_string(i) +
                                  " does not sum to 1");
    }
  }
}

namespace {

Matrix one_hot_labels(const std::vector<std::size_t>& classes, std::size_t k) {
  Matrix labels(classes.size(), k);
  for (std::size_t i = 0; i < classes.size(); ++i) labels.at(i, classes[i]) = 1.0;
  return labels;
}

}  // namespace

Dataset gen_blobs(std::size_t k, std::size_t n_per_class, double separation,
                  double noise, std::size_t d, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("gen_blobs: k must be >= 2");
  if (n_per_class < 1) throw std::invalid_argument("gen_blobs: n_per_class must be >= 1");
  if (d < 1) throw std::invalid_argument("gen_blobs: d must be >= 1");
  if (!(noise > 0.0)) throw std::invalid_argument("gen_blobs: noise must be > 0");
  if (separation < 0.0) throw std::invalid_argument("gen_blobs: separation must be >= 0");

  // Centers at mutual distance `separation`: scaled basis vectors when they
  // fit, random unit directions otherwise.
  auto centers = Matrix(k, d);
  auto center_rng = RngStream::make(seed, RngStream::kDataGen, 1);
  const double scale = separation / std::numbers::sqrt2;
  for (std::size_t c = 0; c < k; ++c) {
    if (c < d) {
      centers.at(c, c) = scale;
    } else {
      auto r = centers.row(c);
      for (std::size_t j = 0; j < d; ++j) r[j] = center_rng.next_normal();
      const double nrm = std::max(norm2(r), 1e-12);
      for (std::size_t j = 0; j < d; ++j) r[j] *= scale / nrm;
    }
  }

  const std::size_t n = k * n_per_class;
  Dataset ds;
  ds.features = Matrix(n, d);
  ds.class_count = k;
  std::vector<std::size_t> classes(n);
  auto rng = RngStream::make(seed, RngStream::kDataGen, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i / n_per_class;
    classes[i] = c;
    auto row = ds.features.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = centers.at(c, j) + noise * rng.next_normal();
    }
  }
  ds.labels = one_hot_labels(classes, k);
  return ds;
}

Dataset gen_two_moons(std::size_t n_per_class, double noise,
                      std::uint64_t seed) {
  if (n_per_class < 1) {
    throw std::invalid_argument("gen_two_moons: n_per_class must be >= 1");
  }
  if (noise < 0.0) throw std::invalid_argument("gen_two_moons: noise must be >= 0");

  const std::size_t n = 2 * n_per_class;
  Dataset ds;
  ds.features = Matrix(n, 2);
  ds.class_count = 2;
  std::vector<std::size_t> classes(n);
  auto rng = RngStream::make(seed, RngStream::kDataGen, 3);
  for (std::size_t i = 0; i < n_per_class; ++i) {
    const double t = n_per_class == 1
                         ? 0.0
                         : std::numbers::pi * static_cast<double>(i) /
                               static_cast<double>(n_per_class - 1);
    // upper moon, on the unit half-circle centered at the origin
    ds.features.at(i, 0) = std::cos(t) + noise * rng.next_normal();
    ds.features.at(i, 1) = std::sin(t) + noise * rng.next_normal();
    classes[i] = 0;
    // lower moon, shifted half-circle
    const std::size_t q = n_per_class + i;
    ds.features.at(q, 0) = 1.0 - std::cos(t) + noise * rng.next_normal();
    ds.features.at(q, 1) = 0.5 - std::sin(t) + noise * rng.next_normal();
    classes[q] = 1;
  }
  ds.labels = one_hot_labels(classes, 2);
  return ds;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Dataset load_embeddings_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "label") {
    throw std::runtime_error(path + ": header must start with \"label\"");
  }
  const std::size_t d = header.size() - 1;
  if (d == 0) throw std::runtime_error(path + ": no feature columns");

  std::vector<double> values;
  std::vector<std::size_t> classes;
  std::size_t lineno = 1;
  std::size_t max_label = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != d + 1) {
      throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                               ": expected " + std::to_string(d + 1) +
                               " fields, got " + std::to_string(fields.size()));
    }
    try {
      std::size_t pos = 0;
      const long lab = std::stol(fields[0], &pos);
      if (pos != fields[0].size()) throw std::invalid_argument("trailing chars");
      if (lab < 0) {
        throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                 ": negative label");
      }
      classes.push_back(static_cast<std::size_t>(lab));
      max_label = std::max(max_label, classes.back());
      for (std::size_t j = 1; j <= d; ++j) {
        const double v = std::stod(fields[j], &pos);
        if (pos != fields[j].size()) throw std::invalid_argument("trailing chars");
        values.push_back(v);
      }
    } catch (const std::invalid_argument&) {
      throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                               ": non-numeric field");
    } catch (const std::out_of_range&) {
      throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                               ": value out of range");
    }
  }
  if (classes.empty()) throw std::runtime_error(path + ": no samples");

  Dataset ds;
  ds.class_count = max_label + 1;
  ds.features = Matrix(classes.size(), d);
  std::copy(values.begin(), values.end(), ds.features.data.begin());
  ds.labels = one_hot_labels(classes, ds.class_count);
  return ds;
}

void dump_embeddings_csv(const Dataset& ds, const std::string& path,
                         const std::string& prefix) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "label";
  for (std::size_t j = 0; j < ds.features.cols; ++j) out << "," << prefix << j;
  out << "\n";
  char buf[40];
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << label_argmax(ds.labels.row(i));
    for (double v : ds.features.row(i)) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << "," << buf;
    }
    out << "\n";
  }
}

std::vector<std::vector<std::size_t>> epoch_batches(std::size_t n,
                                                    std::size_t batch_size,
                                                    std::uint64_t epoch,
                                                    std::uint64_t seed) {
  if (batch_size < 2) throw std::invalid_argument("batch_size must be >= 2");
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  auto rng = RngStream::make(seed, RngStream::kShuffle, epoch);
  for (std::size_t i = n; i > 1; --i) {  // Fisher-Yates
    std::swap(perm[i - 1], perm[rng.next_index(i)]);
  }
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    if (end - start < 2) break;  // drop trailing singleton
    batches.emplace_back(perm.begin() + start, perm.begin() + end);
  }
  return batches;
}

Batch make_batch(const Dataset& ds, const std::vector<std::size_t>& indices) {
  Batch b;
  b.indices = indices;
  b.features = Matrix(indices.size(), ds.features.cols);
  b.labels = Matrix(indices.size(), ds.labels.cols);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    auto fr = ds.features.row(indices[i]);
    std::copy(fr.begin(), fr.end(), b.features.row(i).begin());
    auto lr = ds.labels.row(indices[i]);
    std::copy(lr.begin(), lr.end(), b.labels.row(i).begin());
  }
  return b;
}

}  // namespace cft
