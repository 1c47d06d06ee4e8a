#include "pruneclust/model_selection.hpp"
#include "pruneclust/simulate.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace pruneclust;
namespace t = pruneclust::testing;

TEST_SUITE_BEGIN("model-selection");

TEST_CASE("reference sample") {
  Rng rng(3);
  DataMatrix x = t::random_data(rng, 17, 4);
  x.col(2).setConstant(6.5);
  const auto ref = reference_sample(x, 99);
  CHECK(ref.rows() == 17);
  CHECK(ref.cols() == 4);
  CHECK((ref.col(2).array() == 6.5).all());
  for (Index j = 0; j < 4; ++j) {
    CHECK(ref.col(j).minCoeff() >= x.col(j).minCoeff());
    CHECK(ref.col(j).maxCoeff() <= x.col(j).maxCoeff());
  }
  CHECK(reference_sample(x, 99) == ref);
  CHECK(reference_sample(x, 100) != ref);
}

TEST_CASE("log dispersion at k = 1 is the log root loss") {
  Rng rng(12);
  const auto x = t::random_data(rng, 15, 3, 2);
  const auto curve = gap_curve(x, 5, 4, 77);
  const auto tree = agglomerate(pairwise_distances(x), LinkageKind::average);
  CHECK(curve.log_w[0] == doctest::Approx(std::log(node_losses(x, tree).root_loss())).epsilon(1e-12));
  for (Index r = 0; r < 4; ++r) {
    const auto ref = reference_sample(x, derive_seed(77, static_cast<std::uint64_t>(r)));
    const auto ref_curve = log_dispersion_curve(ref, 5, {});
    const auto ref_tree = agglomerate(pairwise_distances(ref), LinkageKind::average);
    CHECK(ref_curve[0] == doctest::Approx(std::log(node_losses(ref, ref_tree).root_loss())).epsilon(1e-12));
  }
}

TEST_CASE("single reference replicate") {
  Rng rng(21);
  const auto x = t::random_data(rng, 12, 2, 3);
  const auto curve = gap_curve(x, 6, 1, 5);
  const auto ref = log_dispersion_curve(reference_sample(x, derive_seed(5, 0)), 6, {});
  for (std::size_t i = 0; i < ref.size(); ++i) {
    CHECK(curve.elog_w_ref[i] == ref[i]);
    CHECK(curve.se[i] == 0.0);
    CHECK(curve.gap[i] == curve.elog_w_ref[i] - curve.log_w[i]);
  }
  CHECK(curve.b == 1);
}

TEST_CASE("gap curve structure and determinism") {
  Rng rng(33);
  const auto x = t::random_data(rng, 20, 3, 2);
  GapOptions serial;
  serial.threads = 1;
  GapOptions parallel;
  parallel.threads = 4;
  const auto a = gap_curve(x, 8, 6, 1234, serial);
  const auto b = gap_curve(x, 8, 6, 1234, parallel);
  CHECK(a.log_w == b.log_w);
  CHECK(a.elog_w_ref == b.elog_w_ref);
  CHECK(a.se == b.se);
  REQUIRE(a.k_values.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(a.k_values[i] == static_cast<Index>(i) + 1);
    CHECK(a.se[i] >= 0.0);
    CHECK(a.gap[i] == a.elog_w_ref[i] - a.log_w[i]);
    if (i > 0) CHECK(a.log_w[i] <= a.log_w[i - 1]);
  }
  // B reference curves: se = sd * sqrt(1 + 1/B) with the 1/B variance
  std::vector<std::vector<double>> refs;
  for (Index r = 0; r < 6; ++r) {
    refs.push_back(log_dispersion_curve(reference_sample(x, derive_seed(1234, static_cast<std::uint64_t>(r))), 8, {}));
  }
  for (std::size_t i = 0; i < 8; ++i) {
    double mean = 0.0, ss = 0.0;
    for (const auto& r : refs) mean += r[i] / 6.0;
    for (const auto& r : refs) ss += (r[i] - mean) * (r[i] - mean);
    CHECK(a.elog_w_ref[i] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(a.se[i] == doctest::Approx(std::sqrt(ss / 6.0) * std::sqrt(1.0 + 1.0 / 6.0)).epsilon(1e-12));
  }
}

TEST_CASE("normalized dispersion uses centroid WSS") {
  Rng rng(44);
  const auto x = t::random_data(rng, 14, 2, 2);
  GapOptions opts;
  opts.normalized = true;
  const auto curve = log_dispersion_curve(x, 3, opts);
  const auto tree = agglomerate(pairwise_distances(x), LinkageKind::average);
  const auto table = node_losses(x, tree);
  const auto seq = weakest_link_sequence(tree, table);
  const auto step = select_for_k(seq, 3, SizePolicy::nearest_up);
  CHECK(curve[2] == doctest::Approx(std::log(wss_centroid(x, partition_of(tree, step->frontier)))).epsilon(1e-12));
}

TEST_CASE("skip policy leaves holes") {
  // {0,1} and {10,11} collapse together, so size 3 is skipped
  const auto x = t::column({0, 1, 10, 11});
  GapOptions opts;
  opts.size_policy = SizePolicy::skip;
  const auto curve = log_dispersion_curve(x, 3, opts);
  CHECK(std::isnan(curve[2]));
  CHECK_FALSE(std::isnan(curve[1]));
  opts.size_policy = SizePolicy::nearest_up;
  CHECK_THROWS_AS(log_dispersion_curve(x, 3, opts), DegenerateDispersionError);
}

TEST_CASE("degenerate dispersion and bad arguments") {
  const auto x = t::column({1, 1, 1, 5});
  try {
    gap_curve(x, 3, 2, 1);
    FAIL("expected DegenerateDispersionError");
  } catch (const DegenerateDispersionError& e) {
    CHECK(std::string(e.what()).find("k=2") != std::string::npos);
  }
  CHECK_THROWS_AS(gap_curve(t::column({1, 2, 3}), 1, 2, 1), DomainError);
  CHECK_THROWS_AS(gap_curve(t::column({1, 2, 3}), 4, 2, 1), DomainError);
  CHECK_THROWS_AS(gap_curve(t::column({1, 2, 3}), 2, 0, 1), DomainError);
}

TEST_CASE("choose_k rules") {
  GapCurve c;
  c.k_values = {1, 2, 3};
  c.se = {0, 0, 0};
  c.gap = {0.1, 0.5, 0.3};
  CHECK(choose_k(c, SelectionRule::argmax_gap) == 2);
  c.gap = {0.5, 0.5, 0.1};
  CHECK(choose_k(c, SelectionRule::argmax_gap) == 1);
  c.gap = {0.1, 0.4, 0.45};
  c.se = {0.0, 0.0, 0.1};
  CHECK(choose_k(c, SelectionRule::first_se) == 2);
  CHECK(choose_k(c, SelectionRule::argmax_gap) == 3);
  c.gap = {0.1, 0.2, 0.3};
  c.se = {0.0, 0.0, 0.0};
  CHECK(choose_k(c, SelectionRule::first_se) == 3);  // no k qualifies: argmax
  c.gap = {NAN, 0.2, NAN};
  CHECK(choose_k(c, SelectionRule::argmax_gap) == 2);
  CHECK(parse_selection_rule("first-se") == SelectionRule::first_se);
  CHECK_THROWS_AS(parse_selection_rule("elbow"), ValidationError);
}

TEST_CASE("well separated clusters are found") {
  // four groups 20 standard deviations apart
  const auto sample = gen_clustered(24, 6, 4, 2024);
  DataMatrix x = sample.data;
  for (Index i = 0; i < x.rows(); ++i) x.row(i).array() += 20.0 * sample.labels[i];
  const auto curve = gap_curve(x, 8, 20, 7);
  CHECK(choose_k(curve, SelectionRule::argmax_gap) == 4);
}

TEST_SUITE_END();
