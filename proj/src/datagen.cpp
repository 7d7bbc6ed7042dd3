#include "plmcl/datagen.hpp"

#include "plmcl/error.hpp"
#include "plmcl/io.hpp"
#include "plmcl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

namespace plmcl {
namespace {

constexpr std::uint64_t kTeacherStream = 0;
constexpr std::uint64_t kTrainFeatureStream = 1;
constexpr std::uint64_t kTestFeatureStream = 2;
constexpr std::uint64_t kTrainNoiseStream = 3;
constexpr std::uint64_t kTestNoiseStream = 4;

void validate_spec(const SyntheticSpec& spec) {
  if (spec.n_images <= 0 || spec.n_features <= 0 || spec.n_classes <= 0) {
    throw ConfigError("synthetic spec: n_images, n_features, n_classes must be positive");
  }
  if (!(spec.target_label_cardinality >= 1.0 &&
        spec.target_label_cardinality <= static_cast<Real>(spec.n_classes))) {
    throw ConfigError("synthetic spec: target_label_cardinality must lie in [1, n_classes]");
  }
  if (spec.noise_std < 0.0) {
    throw ConfigError("synthetic spec: noise_std must be >= 0");
  }
}

Matrix random_features(Index n, Index d, Rng rng) {
  Matrix features(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) features(i, j) = rng.normal();
  return features;
}

IntMatrix labels_from_margins(const Matrix& margins, Real noise_std, Rng noise_rng) {
  IntMatrix labels(margins.rows(), margins.cols());
  for (Index i = 0; i < margins.rows(); ++i) {
    for (Index c = 0; c < margins.cols(); ++c) {
      const Real noise = noise_std > 0.0 ? noise_std * noise_rng.normal() : 0.0;
      labels(i, c) = margins(i, c) + noise > 0.0 ? 1 : 0;
    }
  }
  // Zero-positive rows get their max-margin class forced positive, which
  // keeps the single-positive settings applicable to every row.
  for (Index i = 0; i < labels.rows(); ++i) {
    if (labels.row(i).sum() > 0) continue;
    Index best = 0;
    margins.row(i).maxCoeff(&best);
    labels(i, best) = 1;
  }
  return labels;
}

std::string label_token(int value) { return std::to_string(value); }

std::vector<std::string> parse_csv_line(const std::string& line) {
  return split(line, ',');
}

int parse_label_value(const std::string& token, bool allow_unobserved,
                      const std::string& path, int line_no) {
  const std::string t = trim(token);
  if (t == "1") return 1;
  if (t == "0") return 0;
  if (allow_unobserved && t == "-1") return -1;
  throw DataError(path + ":" + std::to_string(line_no) + ": label value `" + t +
                  "` outside " + (allow_unobserved ? "{1, 0, -1}" : "{1, 0}"));
}

long parse_id(const std::string& token, const std::string& path, int line_no) {
  char* end = nullptr;
  const long value = std::strtol(token.c_str(), &end, 10);
  if (token.empty() || end != token.c_str() + token.size()) {
    throw DataError(path + ":" + std::to_string(line_no) + ": bad id `" + token + "`");
  }
  return value;
}

}  // namespace

SyntheticSpec load_synthetic_spec(const std::string& path) {
  const auto kv = parse_kv_file(path);
  SyntheticSpec spec;
  for (const auto& [key, value] : kv) {
    if (key == "n_images") {
      spec.n_images = static_cast<Index>(parse_int(value, key));
    } else if (key == "n_features") {
      spec.n_features = static_cast<Index>(parse_int(value, key));
    } else if (key == "n_classes") {
      spec.n_classes = static_cast<Index>(parse_int(value, key));
    } else if (key == "target_label_cardinality") {
      spec.target_label_cardinality = parse_real(value, key);
    } else if (key == "noise_std") {
      spec.noise_std = parse_real(value, key);
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(parse_int(value, key));
    } else {
      throw ConfigError(path + ": unknown synthetic spec key `" + key + "`");
    }
  }
  validate_spec(spec);
  return spec;
}

GeneratedData generate(const SyntheticSpec& spec) {
  validate_spec(spec);
  const Index n = spec.n_images;
  const Index d = spec.n_features;
  const Index L = spec.n_classes;
  const Rng root(spec.seed);

  Rng teacher_rng = root.split(kTeacherStream);
  Matrix teacher_w(L, d);
  const Real scale = 1.0 / std::sqrt(static_cast<Real>(d));
  for (Index c = 0; c < L; ++c)
    for (Index j = 0; j < d; ++j) teacher_w(c, j) = scale * teacher_rng.normal();

  GeneratedData out;
  out.train.features = random_features(n, d, root.split(kTrainFeatureStream));
  out.test.features = random_features(n, d, root.split(kTestFeatureStream));

  const Matrix train_margins_raw = out.train.features * teacher_w.transpose();

  // Quantile-calibrated bias: place each class's decision threshold so the
  // per-class positive rate on the train margins is cardinality / L.
  const Real positive_rate = spec.target_label_cardinality / static_cast<Real>(L);
  Vector bias(L);
  for (Index c = 0; c < L; ++c) {
    std::vector<Real> column(train_margins_raw.col(c).data(),
                             train_margins_raw.col(c).data() + n);
    std::sort(column.begin(), column.end());
    const Index k = std::clamp<Index>(
        static_cast<Index>(std::floor((1.0 - positive_rate) * static_cast<Real>(n))),
        Index{0}, n - 1);
    bias(c) = -column[static_cast<std::size_t>(k)];
  }

  const Matrix train_margins = train_margins_raw.rowwise() + bias.transpose();
  const Matrix test_margins =
      (out.test.features * teacher_w.transpose()).rowwise() + bias.transpose();

  out.train.gt.labels =
      labels_from_margins(train_margins, spec.noise_std, root.split(kTrainNoiseStream));
  out.test.gt.labels =
      labels_from_margins(test_margins, spec.noise_std, root.split(kTestNoiseStream));

  out.train.split = "train";
  out.test.split = "test";
  out.train.ids.resize(static_cast<std::size_t>(n));
  out.test.ids.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    out.train.ids[static_cast<std::size_t>(i)] = static_cast<long>(i);
    out.test.ids[static_cast<std::size_t>(i)] = static_cast<long>(n + i);
  }

  out.teacher.w1.resize(0, d);
  out.teacher.b1.resize(0);
  out.teacher.w2 = teacher_w;
  out.teacher.b2 = bias;
  return out;
}

void save_dataset_csv(const Dataset& dataset, const std::string& path) {
  const Index n = dataset.images();
  const Index d = dataset.features_dim();
  const Index L = dataset.classes();
  if (dataset.gt.labels.rows() != n || static_cast<Index>(dataset.ids.size()) != n) {
    throw DataError("save_dataset_csv: inconsistent dataset shapes");
  }
  std::ostringstream out;
  out << "id";
  for (Index j = 0; j < d; ++j) out << ",f" << j;
  for (Index c = 0; c < L; ++c) out << ",y" << c;
  out << "\n";
  for (Index i = 0; i < n; ++i) {
    out << dataset.ids[static_cast<std::size_t>(i)];
    for (Index j = 0; j < d; ++j) out << ',' << format_real(dataset.features(i, j));
    for (Index c = 0; c < L; ++c) out << ',' << label_token(dataset.gt.labels(i, c));
    out << "\n";
  }
  write_text_file(path, out.str());
}

Dataset load_dataset_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  const auto header = parse_csv_line(trim(line));
  if (header.empty() || header[0] != "id") {
    throw DataError(path + ":1: malformed header, expected leading `id` column");
  }
  Index d = 0;
  Index L = 0;
  std::size_t col = 1;
  while (col < header.size() && header[col] == "f" + std::to_string(d)) {
    ++d;
    ++col;
  }
  while (col < header.size() && header[col] == "y" + std::to_string(L)) {
    ++L;
    ++col;
  }
  if (col != header.size() || L == 0) {
    throw DataError(path + ":1: malformed header, expected `id,f0..,y0..`");
  }

  std::vector<std::vector<std::string>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    auto tokens = parse_csv_line(stripped);
    if (static_cast<Index>(tokens.size()) != 1 + d + L) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(1 + d + L) + " columns, got " +
                      std::to_string(tokens.size()));
    }
    rows.push_back(std::move(tokens));
  }

  Dataset dataset;
  const Index n = static_cast<Index>(rows.size());
  dataset.features.resize(n, d);
  dataset.gt.labels.resize(n, L);
  dataset.ids.resize(rows.size());
  for (Index i = 0; i < n; ++i) {
    const auto& tokens = rows[static_cast<std::size_t>(i)];
    const int row_line = static_cast<int>(i) + 2;
    dataset.ids[static_cast<std::size_t>(i)] = parse_id(tokens[0], path, row_line);
    for (Index j = 0; j < d; ++j) {
      const std::string& token = tokens[static_cast<std::size_t>(1 + j)];
      char* end = nullptr;
      const Real value = std::strtod(token.c_str(), &end);
      if (token.empty() || end != token.c_str() + token.size() || !std::isfinite(value)) {
        throw DataError(path + ":" + std::to_string(row_line) + ": bad feature value `" +
                        token + "`");
      }
      dataset.features(i, j) = value;
    }
    for (Index c = 0; c < L; ++c) {
      dataset.gt.labels(i, c) = parse_label_value(
          tokens[static_cast<std::size_t>(1 + d + c)], false, path, row_line);
    }
  }
  return dataset;
}

void save_observations_csv(const ObservationMatrix& obs, const std::vector<long>& ids,
                           const std::string& path) {
  const Index n = obs.images();
  if (static_cast<Index>(ids.size()) != n) {
    throw DataError("save_observations_csv: ids/observation row count mismatch");
  }
  std::ostringstream out;
  out << "id";
  for (Index c = 0; c < obs.classes(); ++c) out << ",y" << c;
  out << "\n";
  for (Index i = 0; i < n; ++i) {
    out << ids[static_cast<std::size_t>(i)];
    for (Index c = 0; c < obs.classes(); ++c) out << ',' << label_token(obs.obs(i, c));
    out << "\n";
  }
  write_text_file(path, out.str());
}

ObservationFile load_observations_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  const auto header = parse_csv_line(trim(line));
  if (header.empty() || header[0] != "id") {
    throw DataError(path + ":1: malformed header, expected leading `id` column");
  }
  Index L = 0;
  std::size_t col = 1;
  while (col < header.size() && header[col] == "y" + std::to_string(L)) {
    ++L;
    ++col;
  }
  if (col != header.size() || L == 0) {
    throw DataError(path + ":1: malformed header, expected `id,y0..`");
  }

  std::vector<std::vector<std::string>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    auto tokens = parse_csv_line(stripped);
    if (static_cast<Index>(tokens.size()) != 1 + L) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(1 + L) + " columns, got " +
                      std::to_string(tokens.size()));
    }
    rows.push_back(std::move(tokens));
  }

  ObservationFile out;
  const Index n = static_cast<Index>(rows.size());
  out.observations.obs.resize(n, L);
  out.ids.resize(rows.size());
  for (Index i = 0; i < n; ++i) {
    const auto& tokens = rows[static_cast<std::size_t>(i)];
    const int row_line = static_cast<int>(i) + 2;
    out.ids[static_cast<std::size_t>(i)] = parse_id(tokens[0], path, row_line);
    bool any_observed = false;
    for (Index c = 0; c < L; ++c) {
      const int value =
          parse_label_value(tokens[static_cast<std::size_t>(1 + c)], true, path, row_line);
      out.observations.obs(i, c) = value;
      any_observed = any_observed || value != kUnobserved;
    }
    if (any_observed) out.observations.labeled_set.push_back(i);
  }
  return out;
}

}  // namespace plmcl
