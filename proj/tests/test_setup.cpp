#include <doctest.h>

#include "porecrys/checkpoint.hpp"
#include "porecrys/config.hpp"
#include "porecrys/diagnostics.hpp"
#include "porecrys/errors.hpp"
#include "porecrys/geometry.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace porecrys;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("porecrys_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

Index count_fluid(const PorosityField& e) { return (e.eps.data == 1.0).count(); }

}  // namespace

TEST_CASE("channel and slab geometries") {
  const Grid g({8, 16, 4}, 1e-6);
  CHECK(count_fluid(synthetic_geometry("channel", g, 0.05)) == g.size());
  GeometryParams p;
  p.values["width"] = 8;
  const auto c = synthetic_geometry("channel", g, 0.05, p);
  CHECK(count_fluid(c) == 8 * 8 * 4);
  // symmetric about the mid-plane
  for (int j = 0; j < 16; ++j) CHECK(c.eps(0, j, 0) == c.eps(0, 15 - j, 0));

  GeometryParams s;
  s.values["fraction"] = 0.25;
  const auto sl = synthetic_geometry("slab", g, 0.05, s);
  CHECK(sl.eps(1, 3, 2) == 0.05);
  CHECK(sl.eps(2, 3, 2) == 1.0);
  CHECK(count_fluid(sl) == 6 * 16 * 4);
  CHECK_THROWS_AS(synthetic_geometry("gyroid", g, 0.05), ParameterError);
}

TEST_CASE("throat narrows to the neck at its centre") {
  const Grid g({32, 32, 4}, 2e-6);
  GeometryParams p;
  p.values["width"] = 16;
  p.values["neck"] = 4;
  p.values["center"] = 16;
  p.values["length"] = 16;
  const auto e = synthetic_geometry("throat", g, 0.05, p);
  CHECK(open_area(e, 16) == doctest::Approx(4 * 4 * 4e-12));
  CHECK(open_area(e, 0) == doctest::Approx(16 * 4 * 4e-12));
  for (int i = 1; i < 16; ++i) CHECK(open_area(e, i) <= open_area(e, i - 1));
}

TEST_CASE("sphere pack is reproducible per seed") {
  const Grid g({20, 20, 20}, 1e-6);
  GeometryParams p;
  p.seed = 7;
  const auto a = synthetic_geometry("sphere-pack", g, 0.05, p);
  const auto b = synthetic_geometry("sphere-pack", g, 0.05, p);
  CHECK((a.eps.data == b.eps.data).all());
  p.seed = 8;
  const auto c = synthetic_geometry("sphere-pack", g, 0.05, p);
  CHECK(!(a.eps.data == c.eps.data).all());
  // eight spheres of radius 4: roughly 8·(4/3)π·64 solid cells
  const double solid = double(g.size() - count_fluid(a));
  CHECK(solid == doctest::Approx(8 * 4.0 / 3.0 * 3.14159 * 64).epsilon(0.15));
}

TEST_CASE("config parses sections and rejects bad input with a dotted path") {
  const auto c = parse_config(R"(
[run]
t_final = 0.5
[grid]
dims = [16, 16, 8]
h = 2e-6
[geometry]
name = "throat"
params = { neck = 3 }
[kinetics]
K_c = 100.0
[initial]
P_CO2 = 29.41
)");
  CHECK(c.t_final == 0.5);
  CHECK(c.dims == Dims{16, 16, 8});
  CHECK(c.geometry.params.get("neck", 0) == 3);
  CHECK(c.kinetics.K_c == 100.0);
  CHECK(c.init_CO3 == doctest::Approx(1000.0));
  CHECK(c.flow.accel == Acceleration::Anderson);

  auto path_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.path;
    }
    return std::string("<accepted>");
  };
  CHECK(path_of("[run]\nt_finl = 1\n") == "run.t_finl");
  CHECK(path_of("[nonsense]\n") == "nonsense");
  CHECK(path_of("[grid]\neps0 = 1.5\n") == "grid.eps0");
  CHECK(path_of("[kinetics]\nK3 = 6.6e-7\nK_eq = 3.311e-9\nK_minus3 = 150\n") == "kinetics.K_minus3");
  CHECK(path_of("[transport]\nkernel = \"cubic\"\n") == "transport.kernel");
  CHECK(path_of("[initial]\nC_CO3 = 1\nP_CO2 = 1\n") == "initial.P_CO2");
  CHECK(path_of("[grid]\ndims = [16, 16]\n") == "grid.dims");
  CHECK(path_of("[geometry]\nsource = \"voxels\"\n") == "geometry.file");
}

TEST_CASE("config hash ignores run length but not physics") {
  const auto a = parse_config("[run]\nt_final = 1\n");
  const auto b = parse_config("[run]\nt_final = 2\noutput_dir = \"elsewhere\"\n");
  const auto c = parse_config("[run]\nt_final = 1\n[kinetics]\nK_c = 100.0\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
}

TEST_CASE("history rows round-trip through csv") {
  const auto dir = scratch("history");
  HistoryRow r;
  r.step = 40;
  r.time = 1.0 / 3.0;
  r.kappa = 2.5e-12;
  r.budget = 1e-17;
  r.clogged = 3;
  write_history(dir / "h.csv", {r, r});
  const auto back = read_history(dir / "h.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[1].step == 40);
  CHECK(back[1].time == r.time);
  CHECK(back[1].kappa == r.kappa);
  CHECK(back[1].clogged == 3);
  std::ofstream(dir / "bad.csv") << "a,b\n1,2\n";
  CHECK_THROWS_AS(read_history(dir / "bad.csv"), FormatError);
}

TEST_CASE("slice profiles average planes") {
  const Grid g({8, 4, 4}, 1e-6);
  GeometryParams s;
  s.values["fraction"] = 0.5;
  const auto e = synthetic_geometry("slab", g, 0.05, s);
  ScalarField<double> p(g, 2.0);
  const auto rows = slice_profiles(e, p, 0.1);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0].eps == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(rows[7].eps == 1.0);
  CHECK(rows[3].precip == 2.0);
  CHECK(rows[5].x == doctest::Approx(5e-6));
}

TEST_CASE("k-phi exponent recovers a power law and detects clogging") {
  std::vector<double> phi, kap, t;
  for (int i = 0; i < 10; ++i) {
    t.push_back(i);
    phi.push_back(0.5 - 0.02 * i);
    kap.push_back(3e-12 * std::pow(phi.back(), 8));
  }
  CHECK(*kphi_exponent(phi, kap, 0, 9) == doctest::Approx(8).epsilon(1e-10));
  const auto rows = kphi_diagram(t, phi, kap);
  CHECK(!rows[0].exponent);
  CHECK(*rows[5].exponent == doctest::Approx(8).epsilon(1e-10));
  CHECK(rows[9].ref[1] == doctest::Approx(std::pow(phi[9] / phi[0], 3)));

  // slow decline never trips a 20% drop in a 5-sample window; a sudden one does
  std::vector<double> k2;
  for (int i = 0; i < 10; ++i) k2.push_back(1.0 - 0.02 * i);
  CHECK(detect_clogging(t, k2, 0.2, 5).empty());
  k2[6] = 0.5;
  k2[7] = 0.4;
  k2[8] = 0.4;
  k2[9] = 0.4;
  const auto ev = detect_clogging(t, k2, 0.2, 5, "upstream");
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].first == 6);
  CHECK(ev[0].time == 6);
  CHECK(ev[0].window == "upstream");
  CHECK(ev[0].drop == doctest::Approx(1 - 0.4 / 0.94));
  CHECK_THROWS_AS(detect_clogging({0, 1}, {1, 1}, 0.2, 5), ParameterError);
}

TEST_CASE("checkpoint round trip and corruption") {
  const auto dir = scratch("ckpt");
  Checkpoint c;
  c.config_hash = 0xdeadbeefcafef00dull;
  c.step = 123;
  c.time = 0.25;
  c.put("a", Eigen::ArrayXd::LinSpaced(17, -1, 1));
  c.put("empty", Eigen::ArrayXd());
  write_checkpoint(dir / "c.bin", c);
  const auto r = read_checkpoint(dir / "c.bin");
  CHECK(r.config_hash == c.config_hash);
  CHECK(r.step == 123);
  CHECK(r.time == 0.25);
  CHECK((r.get("a") == c.get("a")).all());
  CHECK(r.get("empty").size() == 0);
  CHECK_THROWS_AS(r.get("b"), FormatError);
  CHECK(std::filesystem::exists(dir / "c.bin.json"));

  const auto size = std::filesystem::file_size(dir / "c.bin");
  std::filesystem::resize_file(dir / "c.bin", size - 8);
  CHECK_THROWS_AS(read_checkpoint(dir / "c.bin"), FormatError);
  std::ofstream(dir / "junk.bin") << "not a checkpoint at all";
  CHECK_THROWS_AS(read_checkpoint(dir / "junk.bin"), FormatError);
  CHECK_THROWS_AS(read_checkpoint(dir / "missing.bin"), FormatError);
}
