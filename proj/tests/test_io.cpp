#include "pruneclust/io.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace pruneclust;
namespace t = pruneclust::testing;

namespace {

io::Dataset read(const std::string& text, io::DatasetFile options = {}) {
  std::istringstream in(text);
  return io::read_dataset(in, options);
}

std::string parse_error_message(const std::string& text) {
  try {
    read(text);
  } catch (const io::ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE_BEGIN("cli-io");

TEST_CASE("reading datasets") {
  SUBCASE("single column") {
    const auto ds = read("x\n13\n0\n10\n1\n3\n");
    CHECK(ds.data == t::simple_example());
    CHECK(ds.feature_names == std::vector<std::string>{"x"});
    CHECK_FALSE(ds.labels);
  }
  SUBCASE("no header, CRLF, no trailing newline") {
    io::DatasetFile opts;
    opts.has_header = false;
    const auto ds = read("1.5,2\r\n-3e2,4", opts);
    REQUIRE(ds.data.rows() == 2);
    CHECK(ds.data(1, 0) == -300.0);
    CHECK(ds.feature_names == std::vector<std::string>{"x1", "x2"});
  }
  SUBCASE("label column by name and by index") {
    io::DatasetFile opts;
    opts.label_column = "class";
    const std::string text = "a,class,b,c\n1,\"x, y\",2,3\n4,z,5,6\n";
    const auto ds = read(text, opts);
    CHECK(ds.data.cols() == 3);
    CHECK(ds.data.row(1) == Eigen::RowVector3d(4, 5, 6));
    CHECK(*ds.labels == std::vector<std::string>{"x, y", "z"});
    CHECK(ds.feature_names == std::vector<std::string>{"a", "b", "c"});
    opts.label_column = "1";
    CHECK(*read(text, opts).labels == *ds.labels);
    opts.label_column = "missing";
    CHECK_THROWS_AS(read(text, opts), ValidationError);
  }
  SUBCASE("quoted fields with escaped quotes") {
    const auto rec = [] {
      std::istringstream in("\"a\"\"b\",c\n\"multi\nline\",d\n");
      return io::parse_csv(in);
    }();
    REQUIRE(rec.rows.size() == 2);
    CHECK(rec.rows[0][0] == "a\"b");
    CHECK(rec.rows[1][0] == "multi\nline");
    CHECK(rec.line_numbers == std::vector<Index>{1, 2});
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(read(""), EmptyInputError);
    CHECK_THROWS_AS(read("x,y\n"), EmptyInputError);
    CHECK(parse_error_message("x,y\n1,2\n3\n").find("line 3") != std::string::npos);
    CHECK(parse_error_message("x,y\n1,2\n3,abc\n").find("line 3, column 2") != std::string::npos);
    CHECK(parse_error_message("x\n1\nnan\n").find("line 3") != std::string::npos);
    CHECK_THROWS_AS(read("x\n\"1\n"), io::ParseError);
  }
}

TEST_CASE("dataset CSV round trip") {
  Rng rng(5);
  const auto x = t::random_data(rng, 9, 3);
  const std::vector<int> labels{1, 2, 3, 1, 2, 3, 1, 2, 3};
  std::ostringstream out;
  io::write_dataset_csv(out, x, &labels);
  io::DatasetFile opts;
  opts.label_column = "label";
  const auto back = read(out.str(), opts);
  CHECK(back.data == x);
  CHECK(back.labels->at(4) == "2");
}

TEST_CASE("format_double") {
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(61.0 / 6.0) == "10.166666666666666");
  CHECK(io::format_double(NAN) == "NA");
}

TEST_CASE("dendrogram JSON") {
  const auto tree = agglomerate(pairwise_distances(t::simple_example()), LinkageKind::average);
  const auto doc = io::dendrogram_to_json(tree);
  CHECK(doc["merges"] == nlohmann::json::parse("[[-2,-4],[1,-5],[-1,-3],[2,3]]"));
  CHECK(doc["linkage"] == "average");
  CHECK(doc["n_leaves"] == 5);
  CHECK(doc["heights"][3].get<double>() == 61.0 / 6.0);
  CHECK(doc.dump().find("10.166666666666666") != std::string::npos);

  SUBCASE("round trip through a file") {
    Rng rng(606);
    const auto dir = std::filesystem::temp_directory_path() / "pruneclust_test_io";
    std::filesystem::create_directories(dir);
    for (int trial = 0; trial < 100; ++trial) {
      const auto data = t::random_data(rng, rng.uniform_int(1, 30), rng.uniform_int(1, 4), 3);
      const auto kind = static_cast<LinkageKind>(trial % 3);
      const auto original = agglomerate(pairwise_distances(data), kind);
      const auto path = dir / "tree.json";
      io::write_dendrogram(original, path);
      CHECK(io::read_dendrogram(path) == original);
    }
    std::filesystem::remove_all(dir);
  }
  SUBCASE("invalid documents") {
    auto bad = doc;
    bad["merges"][1][0] = 0;
    CHECK_THROWS_AS(io::dendrogram_from_json(bad), ValidationError);
    bad = doc;
    bad["merges"][2][0] = -2;  // leaf 2 used twice
    CHECK_THROWS_AS(io::dendrogram_from_json(bad), ValidationError);
    bad = doc;
    bad["heights"] = {1.0};
    CHECK_THROWS_AS(io::dendrogram_from_json(bad), ValidationError);
    bad = doc;
    bad.erase("linkage");
    CHECK_THROWS_AS(io::dendrogram_from_json(bad), io::ParseError);
    CHECK_THROWS_AS(io::read_dendrogram("/nonexistent/tree.json"), ValidationError);
  }
}

TEST_CASE("sequence and partition output") {
  const auto data = t::simple_example();
  const auto tree = agglomerate(pairwise_distances(data), LinkageKind::average);
  const auto seq = weakest_link_sequence(tree, node_losses(data, tree));
  const auto doc = io::sequence_to_json(seq);
  CHECK(doc["n_observations"] == 5);
  REQUIRE(doc["steps"].size() == 5);
  CHECK(doc["steps"][2]["n_leaves"] == 3);
  CHECK(doc["steps"][2]["loss_r"] == 10.0);
  CHECK(doc["steps"][2]["alpha"] == 9.0);

  std::ostringstream out;
  io::write_partition_csv(out, Partition({1, 2, 1, 2, 3}, 3));
  CHECK(out.str() == "row_index,cluster_id\n0,1\n1,2\n2,1\n3,2\n4,3\n");
}

TEST_CASE("compare CSV and summary") {
  std::vector<CompareRow> rows(3);
  rows[0] = {0, 2, 10.0, 5.0, 5.0, 5.0, 0.5};
  rows[1] = {0, 3, 4.0, 2.0, std::nullopt, 3.0, std::nullopt};
  rows[2] = {1, 2, 8.0, 8.0, 8.0, 8.0, 0.0};
  std::ostringstream out;
  io::write_compare_csv(out, rows);
  CHECK(out.str() ==
        "dataset_id,k,loss_horizontal,loss_weakest,loss_weakest_skip,loss_dp,rel_reduction\n"
        "0,2,10,5,5,5,0.5\n"
        "0,3,4,2,NA,3,NA\n"
        "1,2,8,8,8,8,0\n");

  const auto summary = io::summarize_compare(rows);
  CHECK(summary.rel_reduction_count == 2);
  CHECK(*summary.median_rel_reduction == 0.25);
  REQUIRE(summary.per_k.size() == 2);
  CHECK(summary.per_k[0].log_horizontal.mean == doctest::Approx(std::log(std::sqrt(80.0))));
  CHECK(summary.per_k[0].log_horizontal.se == doctest::Approx(std::log(10.0 / 8.0) / 2.0));
  CHECK(summary.per_k[1].log_weakest_skip.count == 0);
}

TEST_CASE("gap CSV") {
  GapCurve c;
  c.k_values = {1, 2};
  c.log_w = {2.0, 1.0};
  c.elog_w_ref = {2.5, NAN};
  c.gap = {0.5, NAN};
  c.se = {0.25, NAN};
  std::ostringstream out;
  io::write_gap_csv(out, c);
  CHECK(out.str() == "k,log_w,elog_w_ref,gap,se\n1,2,2.5,0.5,0.25\n2,1,NA,NA,NA\n");
}

TEST_SUITE_END();
