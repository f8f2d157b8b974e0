#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cpkernel/generators.hpp"
#include "cpkernel/io.hpp"

using namespace cpkernel;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("shortest-representation formatting round-trips") {
  Rng rng(51);
  for (int t = 0; t < 2000; ++t) {
    double x;
    switch (t % 4) {
      case 0: x = rng.uniform(-1.0, 1.0); break;
      case 1: x = rng.log_uniform(1e-300, 1e300) * (t % 8 < 4 ? 1.0 : -1.0); break;
      case 2: x = rng.uniform(-1e-10, 1e-10); break;
      default: x = double(t) - 1000.0; break;
    }
    const std::string s = format_shortest(x);
    REQUIRE(parse_double(s, "roundtrip") == x);
  }
  REQUIRE(format_shortest(0.0) == "0");
  REQUIRE(parse_double("  0.25\t", "ctx") == 0.25);
  REQUIRE_THROWS_AS(parse_double("abc", "ctx"), IoError);
  REQUIRE_THROWS_AS(parse_double("1.5x", "ctx"), IoError);
  REQUIRE_THROWS_AS(parse_double("", "ctx"), IoError);
}

TEST_CASE("kernel CSV round trip is exact") {
  Rng rng(52);
  const TriKernel k = random_kernel(rng, 25);
  std::stringstream buf;
  write_kernel_csv(buf, k);
  const TriKernel back = read_kernel_csv(buf);
  REQUIRE(back == k);
}

TEST_CASE("kernel CSV rejects malformed input with the line number") {
  SECTION("wrong row length") {
    std::stringstream buf("1\n2,3,4\n");
    try {
      read_kernel_csv(buf, "k");
      FAIL("expected IoError");
    } catch (const IoError& e) {
      REQUIRE(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SECTION("non-numeric field") {
    std::stringstream buf("1\nx,3\n");
    REQUIRE_THROWS_AS(read_kernel_csv(buf, "k"), IoError);
  }
  SECTION("empty input") {
    std::stringstream buf("");
    REQUIRE_THROWS_AS(read_kernel_csv(buf, "k"), IoError);
  }
  SECTION("non-finite entry") {
    std::stringstream buf("inf\n");
    REQUIRE_THROWS_AS(read_kernel_csv(buf, "k"), IoError);
  }
}

TEST_CASE("mesh file round trip") {
  const auto path = temp_file("cpkernel_test_mesh.txt");
  const Mesh mesh = make_graded_mesh(2.0, 17, 1.7);
  write_mesh_file(path.string(), mesh);
  const Mesh back = read_mesh_file(path.string());
  REQUIRE(back.points().size() == mesh.points().size());
  for (std::size_t i = 0; i < mesh.points().size(); ++i) {
    REQUIRE(back.t(i) == mesh.t(i));
  }
  std::filesystem::remove(path);
}

TEST_CASE("trajectory CSV layout") {
  const Mesh mesh = validate_mesh({0.0, 0.5, 1.0});
  Trajectory traj{mesh, {{1.0, 2.0}, {0.5, 1.0}, {0.25, 0.5}}, {}};
  const auto path = temp_file("cpkernel_test_traj.csv");
  write_trajectory_csv(path.string(), traj);
  std::ifstream f(path);
  std::string line;
  std::getline(f, line);
  REQUIRE(line == "t,u_1,u_2");
  std::getline(f, line);
  REQUIRE(line == "0,1,2");
  std::getline(f, line);
  REQUIRE(line == "0.5,0.5,1");
  std::getline(f, line);
  REQUIRE(line == "1,0.25,0.5");
  std::filesystem::remove(path);
}

TEST_CASE("json writer") {
  JsonWriter w;
  w.begin_object();
  w.key("name").value("x");
  w.key("v").value(0.1);
  w.key("n").value(std::size_t(3));
  w.key("flag").value(true);
  w.key("list").begin_array().value(1).value(2).end_array();
  w.key("nested").begin_object().key("a").value("q\"b").end_object();
  w.end_object();
  REQUIRE(w.str() ==
          "{\"name\":\"x\",\"v\":0.10000000000000001,\"n\":3,\"flag\":true,"
          "\"list\":[1,2],\"nested\":{\"a\":\"q\\\"b\"}}");
}
