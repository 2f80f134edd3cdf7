#include <cmath>
#include <random>

#include "doctest.h"
#include "dapca/dataset.hpp"
#include "dapca/error.hpp"
#include "dapca/toy.hpp"
#include "oracle.hpp"
#include "scratch.hpp"

using namespace dapca;
using dapca::testing::ScratchDir;

TEST_CASE("load_csv with a named label column") {
  ScratchDir dir("load");
  const auto path = dir.write("d.csv", "a,b,label\n1,2,A\n3,4,A\n5,6,B\n");
  const auto ds = load_csv(path, ColumnRef{std::string("label")});
  CHECK(ds.rows() == 3);
  CHECK(ds.cols() == 2);
  REQUIRE(ds.has_labels());
  CHECK(index_labels(*ds.labels).num_classes() == 2);
  CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(ds.values(2, 1) == 6.0);
}

TEST_CASE("load_csv without a label column keeps every column") {
  ScratchDir dir("load");
  const auto path = dir.write("d.csv", "a,b,label\n1,2,0\n3,4,0\n5,6,1\n");
  const auto ds = load_csv(path);
  CHECK(ds.rows() == 3);
  CHECK(ds.cols() == 3);
  CHECK_FALSE(ds.has_labels());
  CHECK(ds.values(2, 2) == 1.0);
}

TEST_CASE("load_csv by column index and headerless input") {
  ScratchDir dir("load");
  const auto path = dir.write("d.csv", "x,1.5,2\ny,-3,4e2\n");
  const auto ds = load_csv(path, ColumnRef{std::size_t{0}});
  CHECK(ds.rows() == 2);
  CHECK(ds.cols() == 2);
  CHECK(ds.feature_names.empty());
  CHECK(*ds.labels == std::vector<std::string>{"x", "y"});
  CHECK(ds.values(1, 1) == 400.0);
}

TEST_CASE("load_csv errors") {
  ScratchDir dir("load");
  SUBCASE("non-numeric cell names line and column") {
    const auto path = dir.write("d.csv", "a,b\n1,2\n3,x\n");
    try {
      load_csv(path);
      FAIL("expected an error");
    } catch (const InputError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("line 3") != std::string::npos);
      CHECK(msg.find("column 1") != std::string::npos);
      CHECK(msg.find("'b'") != std::string::npos);
      CHECK(msg.find("'x'") != std::string::npos);
    }
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load_csv(dir / "nope.csv"), InputError); }
  SUBCASE("ragged rows") {
    CHECK_THROWS_AS(load_csv(dir.write("r.csv", "1,2\n3\n")), InputError);
  }
  SUBCASE("empty table") {
    CHECK_THROWS_AS(load_csv(dir.write("e.csv", "")), InputError);
    CHECK_THROWS_AS(load_csv(dir.write("h.csv", "a,b\n")), InputError);
  }
  SUBCASE("unknown label column") {
    CHECK_THROWS_AS(load_csv(dir.write("l.csv", "a,b\n1,2\n"), ColumnRef{std::string("label")}), InputError);
    CHECK_THROWS_AS(load_csv(dir.write("l.csv", "a,b\n1,2\n"), ColumnRef{std::size_t{5}}), InputError);
  }
  SUBCASE("non-finite values") {
    CHECK_THROWS_AS(load_csv(dir.write("n.csv", "a\nnan\n")), InputError);
    CHECK_THROWS_AS(load_csv(dir.write("n.csv", "a\ninf\n")), InputError);
  }
}

TEST_CASE("save_csv round trip") {
  ScratchDir dir("save");
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 1e3);

  SUBCASE("labelled 10x4") {
    Dataset ds;
    ds.values = Eigen::MatrixXd::NullaryExpr(10, 4, [&] { return normal(rng); });
    ds.labels.emplace();
    for (int i = 0; i < 10; ++i) ds.labels->push_back(i % 3 == 0 ? "alpha" : "beta");
    save_csv(ds, dir / "l.csv");
    const auto back = load_csv(dir / "l.csv", ColumnRef{std::string("label")});
    CHECK(back.values == ds.values);
    CHECK(*back.labels == *ds.labels);
  }
  SUBCASE("unlabelled") {
    Dataset ds;
    ds.values = Eigen::MatrixXd::NullaryExpr(6, 3, [&] { return normal(rng) * 1e-7; });
    save_csv(ds, dir / "u.csv");
    const auto back = load_csv(dir / "u.csv");
    CHECK(back.values == ds.values);
    CHECK_FALSE(back.has_labels());
  }
  SUBCASE("header preserved") {
    Dataset ds;
    ds.values = Eigen::MatrixXd::NullaryExpr(2, 2, [&] { return normal(rng); });
    ds.feature_names = {"height", "width"};
    ds.labels = std::vector<std::string>{"a", "b"};
    ds.label_name = "kind";
    save_csv(ds, dir / "h.csv");
    const auto text = dapca::testing::read_file(dir / "h.csv");
    CHECK(text.substr(0, text.find('\n')) == "height,width,kind");
    const auto back = load_csv(dir / "h.csv", ColumnRef{std::string("kind")});
    CHECK(back.feature_names == ds.feature_names);
  }
}

TEST_CASE("format_real and parse_real") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    CHECK(parse_real(format_real(v)) == v);
  }
  CHECK(parse_real("+2") == 2.0);
  CHECK_THROWS_AS(parse_real("1.5x"), InputError);
  CHECK_THROWS_AS(parse_real(""), InputError);
}

TEST_CASE("center") {
  SUBCASE("two rows") {
    Dataset ds;
    ds.values = (Eigen::MatrixXd(2, 2) << 1, 1, 3, 3).finished();
    const auto c = center(ds);
    CHECK(c.data.values == (Eigen::MatrixXd(2, 2) << -1, -1, 1, 1).finished());
    CHECK(c.mean == Eigen::Vector2d(2, 2));
  }
  SUBCASE("already centered") {
    Dataset ds;
    ds.values = (Eigen::MatrixXd(3, 2) << -1, 2, 0, -4, 1, 2).finished();
    const auto c = center(ds);
    CHECK((c.data.values - ds.values).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(c.mean.cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("single row") {
    Dataset ds;
    ds.values = (Eigen::MatrixXd(1, 3) << 4, 5, 6).finished();
    const auto c = center(ds);
    CHECK(c.data.values.isZero());
    CHECK(c.mean == Eigen::Vector3d(4, 5, 6));
  }
  SUBCASE("random data restores") {
    std::mt19937_64 rng(3);
    Dataset ds;
    ds.values = dapca::testing::random_points(rng, 50, 4) * 1e4;
    const auto c = center(ds);
    const Eigen::VectorXd scale = ds.values.cwiseAbs().colwise().maxCoeff().transpose();
    const Eigen::VectorXd means = c.data.values.colwise().mean().transpose();
    for (Eigen::Index j = 0; j < means.size(); ++j) CHECK(std::abs(means(j)) <= 1e-12 * scale(j));
    const Eigen::MatrixXd restored = c.data.values.rowwise() + c.mean.transpose();
    CHECK((restored - ds.values).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

namespace {

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

Moments column_moments(const Dataset& ds, const std::vector<std::string>& labels, const std::string& cls,
                       Eigen::Index col) {
  std::vector<double> v;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == cls) v.push_back(ds.values(static_cast<Eigen::Index>(i), col));
  }
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  s /= static_cast<double>(v.size() - 1);
  return {m, std::sqrt(s / static_cast<double>(v.size()))};
}

}  // namespace

TEST_CASE("generate_toy default sizes") {
  ToyConfig cfg;
  cfg.seed = 42;
  const auto toy = generate_toy(cfg);
  CHECK(toy.source.rows() == 600);
  CHECK(toy.target.rows() == 440);
  CHECK(toy.source.cols() == 3);
  const auto src = index_labels(*toy.source.labels);
  CHECK(src.counts == std::vector<std::size_t>{400, 200});
  const auto tgt = index_labels(toy.target_labels);
  CHECK(tgt.counts == std::vector<std::size_t>{400, 40});
  CHECK_FALSE(toy.target.has_labels());
}

TEST_CASE("generate_toy is deterministic in the seed") {
  ToyConfig cfg;
  cfg.seed = 1234;
  const auto a = generate_toy(cfg);
  const auto b = generate_toy(cfg);
  CHECK(a.source.values == b.source.values);
  CHECK(a.target.values == b.target.values);
  CHECK(*a.source.labels == *b.source.labels);
  CHECK(a.target_labels == b.target_labels);
  cfg.seed = 1235;
  CHECK(generate_toy(cfg).source.values != a.source.values);
}

TEST_CASE("generate_toy without shift matches the source law") {
  ToyConfig cfg;
  cfg.seed = 99;
  cfg.n_source_class1 = cfg.n_source_class2 = 5000;
  cfg.n_target_class1 = cfg.n_target_class2 = 5000;
  cfg.target_shift_class1 = cfg.target_shift_class2 = 0.0;
  cfg.target_variance_scale_class2 = 1.0;
  const auto toy = generate_toy(cfg);
  for (const char* cls : {kToyClass1, kToyClass2}) {
    for (Eigen::Index c = 0; c < 3; ++c) {
      const auto s = column_moments(toy.source, *toy.source.labels, cls, c);
      const auto t = column_moments(toy.target, toy.target_labels, cls, c);
      CHECK(std::abs(s.mean - t.mean) <= 3.0 * std::hypot(s.se, t.se));
    }
  }
}

TEST_CASE("generate_toy shifts each target class along the second coordinate") {
  ToyConfig cfg;
  cfg.seed = 42;
  const auto toy = generate_toy(cfg);
  const std::pair<const char*, double> cases[] = {{kToyClass1, cfg.target_shift_class1},
                                                  {kToyClass2, cfg.target_shift_class2}};
  for (const auto& [cls, shift] : cases) {
    const auto s = column_moments(toy.source, *toy.source.labels, cls, 1);
    const auto t = column_moments(toy.target, toy.target_labels, cls, 1);
    CHECK(std::abs((t.mean - s.mean) - shift) <= 3.0 * std::hypot(s.se, t.se));
  }
}

TEST_CASE("generate_toy rejects invalid configs") {
  ToyConfig cfg;
  cfg.n_target_class2 = 1;
  CHECK_THROWS_AS(generate_toy(cfg), InputError);
  cfg = ToyConfig{};
  cfg.shared_covariance_diagonal[2] = 0.0;
  CHECK_THROWS_AS(generate_toy(cfg), InputError);
  cfg = ToyConfig{};
  cfg.target_variance_scale_class2 = -1.0;
  CHECK_THROWS_AS(generate_toy(cfg), InputError);
}

TEST_CASE("index_labels sorts classes") {
  const std::vector<std::string> labels{"b", "a", "b", "c"};
  const auto idx = index_labels(labels);
  CHECK(idx.classes == std::vector<std::string>{"a", "b", "c"});
  CHECK(idx.codes == std::vector<std::size_t>{1, 0, 1, 2});
  CHECK(idx.counts == std::vector<std::size_t>{1, 2, 1});
}
