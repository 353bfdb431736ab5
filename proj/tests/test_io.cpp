#include "pporb/io.hpp"
#include "pporb/polyline.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

using namespace pporb;

TEST_CASE("angle parsing requires a unit suffix") {
  CHECK(parse_angle("60deg") == doctest::Approx(M_PI / 3).epsilon(1e-15));
  CHECK(parse_angle("1.5rad") == 1.5);
  CHECK(parse_angle("-45deg") == doctest::Approx(-M_PI / 4).epsilon(1e-15));
  CHECK_THROWS_AS(parse_angle("60"), std::invalid_argument);
  CHECK_THROWS_AS(parse_angle("deg"), std::invalid_argument);
  CHECK_THROWS_AS(parse_angle("6x0deg"), std::invalid_argument);
}

TEST_CASE("grid parsing") {
  const auto g = parse_grid("30:15:90deg");
  REQUIRE(g.size() == 5);
  CHECK(g.front() == doctest::Approx(M_PI / 6).epsilon(1e-14));
  CHECK(g.back() == doctest::Approx(M_PI / 2).epsilon(1e-14));

  const auto single = parse_grid("60:15:60deg");
  REQUIRE(single.size() == 1);
  CHECK(single[0] == doctest::Approx(M_PI / 3).epsilon(1e-14));

  CHECK_THROWS_AS(parse_grid("90:15:30deg"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("30:15:90"), std::invalid_argument);
  CHECK_THROWS_AS(parse_grid("30:90deg"), std::invalid_argument);
}

TEST_CASE("trajectory CSV schema and round-trip precision") {
  BodyTracks tracks;
  tracks.times = {0.0, 0.1234567890123456789};
  tracks.bodies = {{{1.0 / 3.0, -2.0 / 7.0}, {0.5, 0.25}},
                   {{-1.0, 1.0}, {2.0, -2.0}}};
  const std::string csv = trajectory_csv(tracks);

  std::istringstream in(csv);
  std::string header, row1, row2, extra;
  REQUIRE(std::getline(in, header));
  REQUIRE(std::getline(in, row1));
  REQUIRE(std::getline(in, row2));
  CHECK(!std::getline(in, extra));  // exactly 2 data rows for k=2
  CHECK(header == "t,x1,y1,x2,y2");

  // 17 significant digits: values survive the round trip bit-for-bit
  std::replace(row1.begin(), row1.end(), ',', ' ');
  std::istringstream fields(row1);
  double t, x1, y1;
  fields >> t >> x1 >> y1;
  CHECK(t == 0.0);
  CHECK(x1 == 1.0 / 3.0);
  CHECK(y1 == -2.0 / 7.0);
}

TEST_CASE("SVG export is one polyline per body") {
  BodyTracks tracks;
  tracks.times = {0.0, 1.0, 2.0};
  tracks.bodies = {{{0, 0}, {1, 0}, {1, 1}}, {{0, 1}, {-1, 1}, {-1, 0}}};
  const std::string svg = trajectory_svg(tracks);
  CHECK(svg.find("<svg") != std::string::npos);
  size_t count = 0, at = 0;
  while ((at = svg.find("<polyline", at)) != std::string::npos) {
    ++count;
    ++at;
  }
  CHECK(count == 2);
}

TEST_CASE("atomic write lands the full payload") {
  namespace fs = std::filesystem;
  const auto path = (fs::temp_directory_path() / "pporb_io_test.txt").string();
  atomic_write(path, "first\n");
  atomic_write(path, "second\n");  // overwrite through the temp+rename path
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == "second\n");
  fs::remove(path);
}

TEST_CASE("point-segment distance") {
  CHECK(point_segment_distance({0, 1}, {-1, 0}, {1, 0}) == 1.0);
  CHECK(point_segment_distance({2, 0}, {-1, 0}, {1, 0}) == 1.0);  // beyond end
  CHECK(point_segment_distance({0, 0}, {0, 0}, {0, 0}) == 0.0);   // degenerate
}

TEST_CASE("hausdorff distance on simple shapes") {
  const auto circle = [](double radius, int k, double phase) {
    std::vector<Vec2> pts;
    for (int i = 0; i <= k; ++i) {
      const double a = phase + 2.0 * M_PI * i / k;
      pts.emplace_back(radius * std::cos(a), radius * std::sin(a));
    }
    return pts;
  };

  // identical curve, different sampling and phase: only discretization sag
  const auto a = circle(1.0, 500, 0.0);
  const auto b = circle(1.0, 700, 0.3);
  const double sag = 1.0 - std::cos(M_PI / 500);
  CHECK(hausdorff_distance(a, a) == 0.0);
  CHECK(hausdorff_distance(a, b) <= 2.0 * sag);

  // concentric circles: distance equals the gap
  const auto c = circle(1.5, 600, 0.0);
  CHECK(hausdorff_distance(a, c) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("json serialization carries the provenance fields") {
  const nlohmann::json j = to_json(IntegratorConfig{});
  CHECK(j.at("method") == "adaptive");
  CHECK(j.at("abs_tol") == 1e-12);
  CHECK(j.at("max_steps") == 10000000);

  SolverParams p;
  p.d0 = Eigen::ArrayXd::Constant(2, 0.5);
  p.d_min = Eigen::ArrayXd::Constant(2, 1e-12);
  const nlohmann::json js = to_json(p);
  CHECK(js.at("N") == 800);
  CHECK(js.at("d0").size() == 2);
}
