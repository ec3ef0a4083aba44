#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <tuple>

#include "fedsae/datagen.hpp"

using namespace fedsae;

namespace {

std::vector<Sample> labeled_samples(int per_class, int classes, int dim) {
  std::vector<Sample> out;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      Sample s;
      s.features = Eigen::VectorXd::Constant(dim, c * 10000.0 + i);
      s.label = c;
      out.push_back(s);
    }
  }
  return out;
}

std::vector<std::tuple<int, double>> fingerprint(const std::vector<Sample>& samples) {
  std::vector<std::tuple<int, double>> out;
  for (const Sample& s : samples) out.emplace_back(s.label, s.features.sum());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Sample> all_samples(const std::vector<ClientShard>& shards) {
  std::vector<Sample> out;
  for (const ClientShard& s : shards) {
    for (const Dataset* d : {&s.train, &s.test}) {
      const auto part = d->to_samples();
      out.insert(out.end(), part.begin(), part.end());
    }
  }
  return out;
}

std::set<int> labels_of(const ClientShard& s) {
  std::set<int> out;
  for (Eigen::Index i = 0; i < s.train.labels.size(); ++i) out.insert(s.train.labels(i));
  for (Eigen::Index i = 0; i < s.test.labels.size(); ++i) out.insert(s.test.labels(i));
  return out;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("fedsae_test_" + name);
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_SUITE("datagen") {
  TEST_CASE("power-law sizes are exact, non-increasing and floored") {
    for (double exponent : {0.0, 0.5, 1.0, 2.0, 3.5}) {
      for (auto [total, count] : {std::pair{75349L, 100}, std::pair{1000L, 7}, std::pair{300L, 100}}) {
        const auto sizes = power_law_sizes(total, count, exponent);
        CHECK(sizes.size() == static_cast<std::size_t>(count));
        CHECK(std::accumulate(sizes.begin(), sizes.end(), 0L) == total);
        CHECK(std::is_sorted(sizes.begin(), sizes.end(), std::greater<>()));
        CHECK(sizes.back() >= 2);
      }
    }
  }

  TEST_CASE("exponent zero gives equal sizes up to one") {
    const auto sizes = power_law_sizes(1003, 10, 0.0);
    CHECK(sizes.front() - sizes.back() <= 1);
  }

  TEST_CASE("train/test split") {
    CHECK(train_test_sizes(100) == std::pair{80L, 20L});
    CHECK(train_test_sizes(2) == std::pair{1L, 1L});
    CHECK(train_test_sizes(3) == std::pair{2L, 1L});
  }

  TEST_CASE("Synthetic(1,1) at full scale") {
    SyntheticSpec spec;
    spec.seed = 3;
    const auto shards = generate_synthetic(spec);
    CHECK(shards.size() == 100);
    long total = 0;
    for (const ClientShard& s : shards) {
      CHECK(!s.train.empty());
      CHECK(!s.test.empty());
      CHECK(s.train.dim() == 60);
      total += static_cast<long>(s.train.size() + s.test.size());
    }
    CHECK(total == 75349);
  }

  TEST_CASE("zero alpha and beta share governing means") {
    SyntheticSpec spec;
    spec.alpha = 0;
    spec.beta = 0;
    spec.num_clients = 2;
    spec.total_samples = 40;
    const auto data = generate_synthetic_with_params(spec);
    CHECK(data.params[0].model_mean == data.params[1].model_mean);
    CHECK(data.params[0].feature_mean == data.params[1].feature_mean);
    CHECK(data.params[0].model_mean == 0.0);
  }

  TEST_CASE("same seed gives identical shards") {
    SyntheticSpec spec;
    spec.num_clients = 10;
    spec.total_samples = 2000;
    spec.seed = 7;
    const auto a = generate_synthetic(spec);
    const auto b = generate_synthetic(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].train.features == b[k].train.features);
      CHECK(a[k].train.labels == b[k].train.labels);
      CHECK(a[k].test.features == b[k].test.features);
    }
  }

  TEST_CASE("client parameters do not depend on how many clients are built") {
    SyntheticSpec small;
    small.num_clients = 5;
    small.total_samples = 500;
    small.seed = 11;
    SyntheticSpec large = small;
    large.num_clients = 12;
    const auto a = generate_synthetic_with_params(small);
    const auto b = generate_synthetic_with_params(large);
    for (std::size_t k = 0; k < 5; ++k) {
      CHECK(a.params[k].labeler == b.params[k].labeler);
      CHECK(a.params[k].feature_center == b.params[k].feature_center);
    }
  }

  TEST_CASE("stored labels are the argmax of the client's softmax") {
    SyntheticSpec spec;
    spec.num_clients = 6;
    spec.total_samples = 900;
    spec.seed = 5;
    const auto data = generate_synthetic_with_params(spec);
    for (std::size_t k = 0; k < data.shards.size(); ++k) {
      for (const Dataset* d : {&data.shards[k].train, &data.shards[k].test}) {
        const Eigen::MatrixXd p = predict_proba(data.params[k].labeler, d->features);
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
          Eigen::Index arg = 0;
          p.row(i).maxCoeff(&arg);
          CHECK(arg == d->labels(i));
        }
      }
    }
  }

  TEST_CASE("invalid synthetic specs are rejected") {
    SyntheticSpec spec;
    spec.num_classes = 1;
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
    spec = SyntheticSpec{};
    spec.dim = 0;
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
    spec = SyntheticSpec{};
    spec.total_samples = 50;
    CHECK_THROWS_AS(generate_synthetic(spec), ConfigError);
  }

  TEST_CASE("two-class skew over 1000 clients") {
    const auto samples = labeled_samples(2000, 10, 3);
    PartitionOptions opt;
    opt.classes_per_client = 2;
    opt.seed = 9;
    const auto shards = partition_label_skew(samples, 1000, opt);
    CHECK(shards.size() == 1000);
    for (const ClientShard& s : shards) {
      CHECK(labels_of(s).size() <= 2);
      CHECK(!s.train.empty());
    }
    CHECK(fingerprint(all_samples(shards)) == fingerprint(samples));
  }

  TEST_CASE("no skew when classes_per_client equals the class count") {
    const auto samples = labeled_samples(30, 4, 2);
    PartitionOptions opt;
    opt.classes_per_client = 4;
    const auto shards = partition_label_skew(samples, 20, opt);
    for (const ClientShard& s : shards) CHECK(s.train.size() + s.test.size() > 0);
    CHECK(fingerprint(all_samples(shards)) == fingerprint(samples));
  }

  TEST_CASE("exponent zero partition is balanced") {
    const auto samples = labeled_samples(101, 3, 2);
    PartitionOptions opt;
    opt.classes_per_client = 3;
    opt.power_law_exponent = 0.0;
    const auto shards = partition_label_skew(samples, 10, opt);
    std::size_t lo = 1000, hi = 0;
    for (const ClientShard& s : shards) {
      lo = std::min(lo, s.train.size() + s.test.size());
      hi = std::max(hi, s.train.size() + s.test.size());
    }
    CHECK(hi - lo <= 1);
  }

  TEST_CASE("infeasible skew names the offending class") {
    const auto samples = labeled_samples(10, 3, 2);
    PartitionOptions opt;
    opt.classes_per_client = 1;
    opt.power_law_exponent = 0.0;
    try {
      partition_label_skew(samples, 2, opt);
      FAIL("expected InfeasiblePartition");
    } catch (const InfeasiblePartition& e) {
      CHECK(e.offending_class() >= 0);
      CHECK(e.offending_class() < 3);
      CHECK(std::string(e.what()).find("class") != std::string::npos);
    }
  }

  TEST_CASE("partition is deterministic") {
    const auto samples = labeled_samples(50, 5, 2);
    PartitionOptions opt;
    opt.seed = 4;
    const auto a = partition_label_skew(samples, 8, opt);
    const auto b = partition_label_skew(samples, 8, opt);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].train.features == b[k].train.features);
  }

  TEST_CASE("csv ingestion covers every row") {
    const auto path = write_temp("four.csv", "x1,x2,label\n0.5,1.0,0\n1.5,-2,1\n3,4,0\n-1,0.25,1\n");
    PartitionOptions opt;
    const auto shards = ingest_csv(path.string(), "label", 2, opt);
    CHECK(shards.size() == 2);
    const auto samples = all_samples(shards);
    CHECK(samples.size() == 4);
    CHECK(fingerprint(samples) == fingerprint(read_labeled_csv(path.string(), "label")));
  }

  TEST_CASE("label column may sit anywhere") {
    const auto path = write_temp("middle.csv", "a,y,b\n1,2,3\n4,0,6\n");
    const auto samples = read_labeled_csv(path.string(), "y");
    REQUIRE(samples.size() == 2);
    CHECK(samples[0].label == 2);
    CHECK(samples[0].features(1) == 3.0);
  }

  TEST_CASE("csv errors") {
    CHECK_THROWS_AS(read_labeled_csv("/nonexistent/file.csv", "label"), PathNotFound);
    CHECK_THROWS_AS(read_labeled_csv(write_temp("hdr.csv", "x,label\n").string(), "label"), EmptyDataset);

    const auto ragged = write_temp("ragged.csv", "x,label\n1,0\n2\n");
    try {
      read_labeled_csv(ragged.string(), "label");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.row() == 3);
    }
    CHECK_THROWS_AS(read_labeled_csv(write_temp("frac.csv", "x,label\n1,0.5\n").string(), "label"), ParseError);
    CHECK_THROWS_AS(read_labeled_csv(write_temp("text.csv", "x,label\nabc,1\n").string(), "label"), ParseError);
    CHECK_THROWS_AS(read_labeled_csv(write_temp("nolabel.csv", "x,y\n1,0\n").string(), "label"), DataError);
  }
}
