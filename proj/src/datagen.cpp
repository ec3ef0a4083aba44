#include "fedsae/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "fedsae/errors.hpp"
#include "fedsae/random.hpp"

namespace fedsae {

std::vector<long> power_law_sizes(long total, int count, double exponent) {
  if (count <= 0) throw ConfigError("power_law_sizes: count must be positive");
  if (total < count) throw ConfigError("power_law_sizes: fewer samples than clients");
  if (!std::isfinite(exponent)) throw ConfigError("power_law_sizes: exponent must be finite");

  const auto n = static_cast<std::size_t>(count);
  std::vector<double> raw(n);
  for (std::size_t k = 0; k < n; ++k) raw[k] = std::pow(static_cast<double>(k + 1), -exponent);
  const double scale = static_cast<double>(total) / std::accumulate(raw.begin(), raw.end(), 0.0);

  std::vector<long> sizes(n);
  std::vector<double> remainder(n);
  long assigned = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double exact = raw[k] * scale;
    sizes[k] = static_cast<long>(std::floor(exact));
    remainder[k] = exact - static_cast<double>(sizes[k]);
    assigned += sizes[k];
  }
  std::vector<std::size_t> by_remainder(n);
  std::iota(by_remainder.begin(), by_remainder.end(), std::size_t{0});
  std::stable_sort(by_remainder.begin(), by_remainder.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (long left = total - assigned, i = 0; left > 0; --left, ++i) {
    ++sizes[by_remainder[static_cast<std::size_t>(i) % n]];
  }

  // Raise small clients to the floor, taking from the last of the current maxima
  // so the sequence stays non-increasing.
  const long floor_size = total >= 2L * count ? 2 : 1;
  for (std::size_t k = 0; k < n; ++k) {
    while (sizes[k] < floor_size) {
      const long top = *std::max_element(sizes.begin(), sizes.end());
      std::size_t donor = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (sizes[j] == top) donor = j;
      }
      --sizes[donor];
      ++sizes[k];
    }
  }
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  return sizes;
}

std::pair<long, long> train_test_sizes(long n) {
  if (n < 2) return {n, 0};
  const long test = std::max(1L, std::lround(0.2 * static_cast<double>(n)));
  return {n - test, test};
}

namespace {

void validate(const SyntheticSpec& spec) {
  if (spec.num_classes < 2) throw ConfigError("synthetic: num_classes must be at least 2");
  if (spec.dim < 1) throw ConfigError("synthetic: dim must be at least 1");
  if (spec.num_clients <= 0) throw ConfigError("synthetic: num_clients must be positive");
  if (spec.total_samples < spec.num_clients) {
    throw ConfigError("synthetic: total_samples must be at least num_clients");
  }
  if (!(spec.alpha >= 0.0) || !(spec.beta >= 0.0)) {
    throw ConfigError("synthetic: alpha and beta must be non-negative");
  }
}

Dataset rows_of(const Dataset& all, std::size_t begin, std::size_t end) {
  std::vector<std::size_t> idx(end - begin);
  std::iota(idx.begin(), idx.end(), begin);
  return all.subset(idx);
}

}  // namespace

SyntheticDataset generate_synthetic_with_params(const SyntheticSpec& spec) {
  validate(spec);
  const std::vector<long> sizes =
      power_law_sizes(spec.total_samples, spec.num_clients, spec.power_law_exponent);

  Eigen::VectorXd feature_sd(spec.dim);
  for (int j = 0; j < spec.dim; ++j) feature_sd(j) = std::sqrt(std::pow(j + 1.0, -1.2));

  SyntheticDataset out;
  out.shards.reserve(static_cast<std::size_t>(spec.num_clients));
  out.params.reserve(static_cast<std::size_t>(spec.num_clients));
  for (int k = 0; k < spec.num_clients; ++k) {
    Rng rng = make_stream(spec.seed, StreamPurpose::kSyntheticClient, static_cast<std::uint64_t>(k));
    SyntheticClientParams p;
    p.model_mean = normal_draw(rng, 0.0, std::sqrt(spec.alpha));
    p.feature_mean = normal_draw(rng, 0.0, std::sqrt(spec.beta));
    p.feature_center.resize(spec.dim);
    for (int j = 0; j < spec.dim; ++j) p.feature_center(j) = normal_draw(rng, p.feature_mean, 1.0);
    p.labeler = ModelWeights::zeros(spec.num_classes, spec.dim);
    for (int c = 0; c < spec.num_classes; ++c) {
      for (int j = 0; j < spec.dim; ++j) p.labeler.weight(c, j) = normal_draw(rng, p.model_mean, 1.0);
    }
    for (int c = 0; c < spec.num_classes; ++c) p.labeler.bias(c) = normal_draw(rng, p.model_mean, 1.0);

    const long n = sizes[static_cast<std::size_t>(k)];
    Dataset all;
    all.features.resize(n, spec.dim);
    all.labels.resize(n);
    for (long i = 0; i < n; ++i) {
      for (int j = 0; j < spec.dim; ++j) {
        all.features(i, j) = normal_draw(rng, p.feature_center(j), feature_sd(j));
      }
    }
    const Eigen::MatrixXd scores = detail::logits(p.labeler, all.features);
    for (long i = 0; i < n; ++i) {
      Eigen::Index arg = 0;
      scores.row(i).maxCoeff(&arg);
      all.labels(i) = static_cast<int>(arg);
    }

    const auto [n_train, n_test] = train_test_sizes(n);
    ClientShard shard;
    shard.client_id = k;
    shard.train = rows_of(all, 0, static_cast<std::size_t>(n_train));
    shard.test = rows_of(all, static_cast<std::size_t>(n_train), static_cast<std::size_t>(n_train + n_test));
    out.shards.push_back(std::move(shard));
    out.params.push_back(std::move(p));
  }
  return out;
}

std::vector<ClientShard> generate_synthetic(const SyntheticSpec& spec) {
  return generate_synthetic_with_params(spec).shards;
}

std::vector<ClientShard> partition_label_skew(const std::vector<Sample>& samples, int num_clients,
                                              const PartitionOptions& options) {
  if (samples.empty()) throw EmptyDataset("partition: no samples");
  if (num_clients <= 0) throw ConfigError("partition: num_clients must be positive");
  if (options.classes_per_client < 1) throw ConfigError("partition: classes_per_client must be >= 1");

  int max_label = 0;
  for (const Sample& s : samples) {
    if (s.label < 0) throw DataError("partition: negative label");
    max_label = std::max(max_label, s.label);
  }
  const int num_classes = options.num_classes > 0 ? options.num_classes : max_label + 1;
  if (max_label >= num_classes) throw DataError("partition: label outside [0, num_classes)");
  if (options.classes_per_client > num_classes) {
    throw ConfigError("partition: classes_per_client exceeds the number of classes");
  }

  const std::vector<long> sizes =
      power_law_sizes(static_cast<long>(samples.size()), num_clients, options.power_law_exponent);
  Rng rng = make_stream(options.seed, StreamPurpose::kPartition);

  // Lay samples out in one sequence and cut it into contiguous client chunks.
  // Under label skew the sequence is grouped by class (class order shuffled),
  // so each chunk spans as few classes as its size allows.
  std::vector<std::size_t> sequence;
  sequence.reserve(samples.size());
  const bool skewed = options.classes_per_client < num_classes;
  if (skewed) {
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < samples.size(); ++i) {
      by_class[static_cast<std::size_t>(samples[i].label)].push_back(i);
    }
    std::vector<int> class_order(static_cast<std::size_t>(num_classes));
    std::iota(class_order.begin(), class_order.end(), 0);
    std::shuffle(class_order.begin(), class_order.end(), rng);
    for (int c : class_order) {
      auto& group = by_class[static_cast<std::size_t>(c)];
      std::shuffle(group.begin(), group.end(), rng);
      sequence.insert(sequence.end(), group.begin(), group.end());
    }
  } else {
    sequence.resize(samples.size());
    std::iota(sequence.begin(), sequence.end(), std::size_t{0});
    std::shuffle(sequence.begin(), sequence.end(), rng);
  }

  const Eigen::Index dim = samples.front().features.size();
  std::vector<ClientShard> shards;
  shards.reserve(static_cast<std::size_t>(num_clients));
  std::size_t cursor = 0;
  for (int k = 0; k < num_clients; ++k) {
    const auto n = static_cast<std::size_t>(sizes[static_cast<std::size_t>(k)]);
    std::vector<std::size_t> chunk(sequence.begin() + static_cast<std::ptrdiff_t>(cursor),
                                   sequence.begin() + static_cast<std::ptrdiff_t>(cursor + n));
    if (skewed) {
      std::set<int> seen;
      for (std::size_t idx : chunk) {
        const int label = samples[idx].label;
        if (seen.insert(label).second &&
            static_cast<int>(seen.size()) > options.classes_per_client) {
          throw InfeasiblePartition(
              label, "client " + std::to_string(k) + " needs " + std::to_string(n) +
                         " samples but its " + std::to_string(options.classes_per_client) +
                         " classes cannot supply them");
        }
      }
    }
    cursor += n;
    std::shuffle(chunk.begin(), chunk.end(), rng);

    const auto [n_train, n_test] = train_test_sizes(static_cast<long>(n));
    std::vector<Sample> train;
    std::vector<Sample> test;
    for (std::size_t i = 0; i < chunk.size(); ++i) {
      const Sample& s = samples[chunk[i]];
      if (s.features.size() != dim) throw DimensionMismatch("partition: inconsistent feature length");
      (static_cast<long>(i) < n_train ? train : test).push_back(s);
    }
    (void)n_test;
    ClientShard shard;
    shard.client_id = k;
    shard.train = Dataset::from_samples(train);
    shard.test = Dataset::from_samples(test);
    if (shard.test.empty()) shard.test.features.resize(0, dim);
    shards.push_back(std::move(shard));
  }
  return shards;
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <typename T>
bool parse_number(const std::string& text, T& value) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::vector<Sample> read_labeled_csv(const std::string& path, const std::string& label_column) {
  if (!std::filesystem::exists(path)) throw PathNotFound(path);
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!trim(line).empty()) header = split_fields(line);
  }
  if (header.empty()) throw EmptyDataset("csv has no header: " + path);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) throw DataError("label column '" + label_column + "' not in header");
  const auto label_idx = static_cast<std::size_t>(label_it - header.begin());
  const auto dim = static_cast<Eigen::Index>(header.size() - 1);

  std::vector<Sample> samples;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw ParseError(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    }
    Sample s;
    s.features.resize(dim);
    Eigen::Index j = 0;
    for (std::size_t f = 0; f < fields.size(); ++f) {
      if (f == label_idx) {
        if (!parse_number(fields[f], s.label) || s.label < 0) {
          throw ParseError(line_no, "label '" + fields[f] + "' is not a non-negative integer");
        }
      } else {
        double v = 0;
        if (!parse_number(fields[f], v)) {
          throw ParseError(line_no, "field '" + fields[f] + "' is not numeric");
        }
        s.features(j++) = v;
      }
    }
    samples.push_back(std::move(s));
  }
  if (samples.empty()) throw EmptyDataset("csv has no data rows: " + path);
  return samples;
}

std::vector<ClientShard> ingest_csv(const std::string& path, const std::string& label_column,
                                    int num_clients, const PartitionOptions& options) {
  return partition_label_skew(read_labeled_csv(path, label_column), num_clients, options);
}

}  // namespace fedsae
