// Dataset ingestion: IDX image/label files, 188-column beat CSVs, the
// synthetic sine sequence, plus stratified subsetting/splitting and seeded
// batch iteration.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "heunflow/errors.hpp"
#include "heunflow/rng.hpp"
#include "heunflow/tensor.hpp"

namespace heunflow {

struct LabeledDataset {
  Tensor features;          // n x d, finite, normalized
  std::vector<int> labels;  // one class per row, in [0, n_classes)
  int n_classes = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.cols(); }
};

struct SequencePair {
  std::vector<double> inputs;
  std::vector<double> targets;  // same length; targets[t] follows inputs[t]
};

struct SequenceDataset {
  std::vector<SequencePair> series;
};

namespace detail {

inline std::uint32_t read_be32(std::istream& in, const std::string& path) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  if (!in) throw TruncatedFile(path + ": ended inside a header field");
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) |
         std::uint32_t(b[3]);
}

inline std::vector<unsigned char> read_exact(std::istream& in, std::size_t n,
                                             const std::string& path) {
  std::vector<unsigned char> buf(n);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n)
    throw TruncatedFile(path + ": expected " + std::to_string(n) + " data bytes, got " +
                        std::to_string(in.gcount()));
  return buf;
}

}  // namespace detail

// IDX pair as published: images carry magic 0x00000803 and three dimension
// fields, labels 0x00000801 and one; all integers big-endian, pixels one
// unsigned byte each. Pixels are scaled to [0, 1].
inline LabeledDataset load_mnist_idx(const std::string& images_path,
                                     const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw IoError("cannot open " + images_path);
  const std::uint32_t img_magic = detail::read_be32(img, images_path);
  if (img_magic != 0x00000803u)
    throw BadMagic(images_path + ": magic " + std::to_string(img_magic) +
                   " is not an IDX3 image file");
  const std::uint32_t n = detail::read_be32(img, images_path);
  const std::uint32_t rows = detail::read_be32(img, images_path);
  const std::uint32_t cols = detail::read_be32(img, images_path);

  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw IoError("cannot open " + labels_path);
  const std::uint32_t lab_magic = detail::read_be32(lab, labels_path);
  if (lab_magic != 0x00000801u)
    throw BadMagic(labels_path + ": magic " + std::to_string(lab_magic) +
                   " is not an IDX1 label file");
  const std::uint32_t n_labels = detail::read_be32(lab, labels_path);
  if (n != n_labels)
    throw CountMismatch(std::to_string(n) + " images vs " + std::to_string(n_labels) + " labels");

  const std::size_t dim = std::size_t(rows) * cols;
  std::vector<unsigned char> pixels = detail::read_exact(img, std::size_t(n) * dim, images_path);
  std::vector<unsigned char> raw_labels = detail::read_exact(lab, n, labels_path);

  std::vector<double> feats(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) feats[i] = pixels[i] / 255.0;

  LabeledDataset out;
  out.features = Tensor(Shape{n, dim}, std::move(feats));
  out.labels.reserve(n);
  out.n_classes = 10;
  for (unsigned char l : raw_labels) {
    if (l >= 10) throw BadLabel("label " + std::to_string(int(l)) + " outside [0, 10)");
    out.labels.push_back(int(l));
  }
  return out;
}

// Beat CSV: 188 comma-separated numbers per row, the first 187 the signal
// in [0, 1] and the last the class in {0..4}. The published preprocessing
// already normalized the signal, so values are validated, never rescaled.
inline LabeledDataset load_ecg_csv(const std::string& path, bool skip_header = false) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  constexpr std::size_t kFields = 188;
  constexpr int kClasses = 5;

  std::vector<double> feats;
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && skip_header) continue;
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(kFields);
    std::size_t begin = 0;
    while (begin <= line.size()) {
      std::size_t end = line.find(',', begin);
      if (end == std::string::npos) end = line.size();
      try {
        row.push_back(std::stod(line.substr(begin, end - begin)));
      } catch (const std::exception&) {
        throw NonFiniteValue(path + ":" + std::to_string(lineno) + ": unparseable field");
      }
      begin = end + 1;
      if (end == line.size()) break;
    }
    if (row.size() != kFields)
      throw BadRowLength(path + ":" + std::to_string(lineno) + ": " + std::to_string(row.size()) +
                         " fields, expected 188");
    const double lab = row.back();
    if (lab != std::floor(lab) || lab < 0 || lab >= kClasses)
      throw BadLabel(path + ":" + std::to_string(lineno) + ": label " + std::to_string(lab));
    for (std::size_t i = 0; i + 1 < row.size(); ++i) {
      if (!std::isfinite(row[i]))
        throw NonFiniteValue(path + ":" + std::to_string(lineno) + ": non-finite sample");
      if (row[i] < 0.0 || row[i] > 1.0)
        throw ValueOutOfRange(path + ":" + std::to_string(lineno) + ": sample " +
                              std::to_string(row[i]) + " outside [0, 1]");
    }
    feats.insert(feats.end(), row.begin(), row.end() - 1);
    labels.push_back(static_cast<int>(lab));
  }

  LabeledDataset out;
  out.features = Tensor(Shape{labels.size(), kFields - 1}, std::move(feats));
  out.labels = std::move(labels);
  out.n_classes = kClasses;
  return out;
}

// Next-step sine prediction: n_points samples of sin(t) on [0, total_length],
// inputs are the first n-1 values, targets the values one step ahead.
inline SequenceDataset gen_sine(double total_length = 16.0 * 3.14159265358979323846,
                                std::size_t n_points = 512) {
  if (n_points < 2) throw Error("gen_sine needs at least two points");
  std::vector<double> wave(n_points);
  for (std::size_t i = 0; i < n_points; ++i)
    wave[i] = std::sin(total_length * static_cast<double>(i) / static_cast<double>(n_points - 1));
  SequencePair pair;
  pair.inputs.assign(wave.begin(), wave.end() - 1);
  pair.targets.assign(wave.begin() + 1, wave.end());
  SequenceDataset out;
  out.series.push_back(std::move(pair));
  return out;
}

namespace detail {

inline std::vector<std::vector<std::size_t>> by_class(const LabeledDataset& d) {
  std::vector<std::vector<std::size_t>> groups(d.n_classes);
  for (std::size_t i = 0; i < d.size(); ++i) groups[d.labels[i]].push_back(i);
  return groups;
}

inline LabeledDataset take_rows(const LabeledDataset& d, const std::vector<std::size_t>& rows) {
  const std::size_t dim = d.dim();
  std::vector<double> feats(rows.size() * dim);
  std::vector<int> labels(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy_n(d.features.raw() + rows[r] * dim, dim, feats.data() + r * dim);
    labels[r] = d.labels[rows[r]];
  }
  LabeledDataset out;
  out.features = Tensor(Shape{rows.size(), dim}, std::move(feats));
  out.labels = std::move(labels);
  out.n_classes = d.n_classes;
  return out;
}

}  // namespace detail

// Seeded subset of n samples preserving class proportions to within one
// sample per class.
inline LabeledDataset stratified_subset(const LabeledDataset& d, std::size_t n,
                                        std::uint64_t seed) {
  if (n >= d.size()) return d;
  Rng rng(seed);
  auto groups = detail::by_class(d);
  std::vector<std::size_t> chosen;
  chosen.reserve(n);
  // Largest-remainder apportionment of n across classes.
  std::vector<double> exact(groups.size());
  std::vector<std::size_t> take(groups.size());
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < groups.size(); ++c) {
    exact[c] = static_cast<double>(n) * groups[c].size() / static_cast<double>(d.size());
    take[c] = static_cast<std::size_t>(std::floor(exact[c]));
    assigned += take[c];
  }
  std::vector<std::size_t> order(groups.size());
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ra = exact[a] - std::floor(exact[a]);
    const double rb = exact[b] - std::floor(exact[b]);
    return ra != rb ? ra > rb : a < b;
  });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) take[order[k % order.size()]] += 1;

  for (std::size_t c = 0; c < groups.size(); ++c) {
    rng.shuffle(groups[c]);
    const std::size_t t = std::min(take[c], groups[c].size());
    chosen.insert(chosen.end(), groups[c].begin(), groups[c].begin() + t);
  }
  std::sort(chosen.begin(), chosen.end());
  return detail::take_rows(d, chosen);
}

// Seeded stratified split into (train, test).
inline std::pair<LabeledDataset, LabeledDataset> stratified_split(const LabeledDataset& d,
                                                                  double test_fraction,
                                                                  std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error("test_fraction must lie in (0, 1)");
  Rng rng(seed);
  auto groups = detail::by_class(d);
  std::vector<std::size_t> train_rows, test_rows;
  for (auto& g : groups) {
    rng.shuffle(g);
    const std::size_t n_test = static_cast<std::size_t>(std::round(test_fraction * g.size()));
    test_rows.insert(test_rows.end(), g.begin(), g.begin() + n_test);
    train_rows.insert(train_rows.end(), g.begin() + n_test, g.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());
  return {detail::take_rows(d, train_rows), detail::take_rows(d, test_rows)};
}

struct Batch {
  Tensor features;          // b x d
  Tensor label_tensor;      // rank-1 class indices as doubles
  std::vector<int> labels;  // same classes as ints
};

// One epoch of batches under a seeded shuffle; the last partial batch is
// included. Passing the same Rng state reproduces the same order.
inline std::vector<Batch> shuffled_batches(const LabeledDataset& d, std::size_t batch_size,
                                           Rng& rng) {
  if (batch_size < 1) throw Error("batch_size must be >= 1");
  std::vector<std::size_t> order(d.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);

  std::vector<Batch> out;
  const std::size_t dim = d.dim();
  for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
    const std::size_t b = std::min(batch_size, order.size() - begin);
    std::vector<double> feats(b * dim);
    std::vector<double> labs(b);
    std::vector<int> labi(b);
    for (std::size_t r = 0; r < b; ++r) {
      const std::size_t src = order[begin + r];
      std::copy_n(d.features.raw() + src * dim, dim, feats.data() + r * dim);
      labs[r] = d.labels[src];
      labi[r] = d.labels[src];
    }
    out.push_back(Batch{Tensor(Shape{b, dim}, std::move(feats)),
                        Tensor(Shape{b}, std::move(labs)), std::move(labi)});
  }
  return out;
}

}  // namespace heunflow
