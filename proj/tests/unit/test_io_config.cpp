#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/image.hpp"
#include "core/io.hpp"
#include "core/potential.hpp"
#include "core/sensitivity.hpp"
#include "core/spectral.hpp"
#include "test_support.hpp"

using namespace chinpaint;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("chinpaint_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_bytes(const std::string& path, const std::string& bytes) {
  std::ofstream(path, std::ios::binary) << bytes;
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text).validate();
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    return e.what();
  }
  FAIL("config accepted");
  return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("PGM levels binarise at one half") {
  const TempDir tmp;
  const double m = well_location(PotentialParams{});
  // 4x4 ASCII PGM, first row 0 128 255 255, the rest white.
  std::string text = "P2\n# comment\n4 4\n255\n0 128 255 255\n";
  for (int r = 0; r < 3; ++r) text += "255 255 255 255\n";
  write_bytes(tmp.file("levels.pgm"), text);
  const Grid g = Grid::make(4, 4, 1.0, 1.0);
  const Field u = load_image(tmp.file("levels.pgm"), g);
  CHECK(u(0, 3) == 0.0);
  CHECK(u(1, 3) == doctest::Approx(128.0 / 255.0));
  const Field phase = binarize_to_phase(u, m);
  CHECK(phase(0, 3) == -m);
  CHECK(phase(1, 3) == m);
  CHECK(phase(2, 3) == m);

  // Binary P5 carries the same pixels.
  GrayImage img{4, 4, {}};
  for (unsigned char c : std::string("\x00\x80\xff\xff", 4)) img.pixels.push_back(c);
  img.pixels.resize(16, 255);
  write_gray_image(img, tmp.file("levels_b.pgm"));
  CHECK(testing::max_abs_diff(load_image(tmp.file("levels_b.pgm"), g), u) == 0.0);
  write_gray_image(img, tmp.file("levels.png"));
  CHECK(testing::max_abs_diff(load_image(tmp.file("levels.png"), g), u) == 0.0);
}

TEST_CASE("binarisation examples") {
  const Grid g = Grid::make(8, 8, 1.0, 1.0);
  const double m = 0.9;
  Field mask(g);
  mask(4, 4) = 1.0;
  const Field white = binarize_to_phase(Field(g, 0.0), m, 0.5, &mask);
  for (int j = 0; j < 8; ++j)
    for (int i = 0; i < 8; ++i) CHECK(white(i, j) == (i == 4 && j == 4 ? 0.0 : -m));

  const Field checker = Field::from_function(g, [&](double x, double y) {
    return (static_cast<int>(x * 8) + static_cast<int>(y * 8)) % 2 ? 1.0 : 0.0;
  });
  const Field phase = binarize_to_phase(checker, m);
  for (std::size_t k = 0; k < phase.size(); ++k) CHECK(phase[k] == (checker[k] == 1.0 ? m : -m));
}

TEST_CASE("mask loading") {
  const TempDir tmp;
  const Grid g = Grid::make(8, 8, 2.0, 2.0);
  GrayImage img{8, 8, std::vector<std::uint8_t>(64, 0)};
  for (int r = 2; r < 5; ++r)
    for (int c = 2; c < 5; ++c) img.pixels[r * 8 + c] = 255;
  write_gray_image(img, tmp.file("mask.pgm"));
  const Field mask = load_mask(tmp.file("mask.pgm"), g);
  double area = 0.0;
  for (double v : mask.values()) area += v * g.cell_area();
  CHECK(area == doctest::Approx(9 * 0.0625));

  write_gray_image(GrayImage{8, 8, std::vector<std::uint8_t>(64, 0)}, tmp.file("empty.pgm"));
  write_gray_image(GrayImage{8, 8, std::vector<std::uint8_t>(64, 255)}, tmp.file("full.pgm"));
  CHECK(testing::error_code_of([&] { load_mask(tmp.file("empty.pgm"), g); }) == ErrorCode::EmptyOrFullMask);
  CHECK(testing::error_code_of([&] { load_mask(tmp.file("full.pgm"), g); }) == ErrorCode::EmptyOrFullMask);
  CHECK(testing::error_code_of([&] { load_mask(tmp.file("mask.pgm"), Grid::make(16, 8, 1, 1)); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(testing::error_code_of([&] { load_mask(tmp.file("missing.pgm"), g); }) == ErrorCode::Io);
  write_bytes(tmp.file("bad.pgm"), "GIF89a....");
  CHECK(testing::error_code_of([&] { load_mask(tmp.file("bad.pgm"), g); }) == ErrorCode::UnsupportedFormat);
}

TEST_CASE("initial guess") {
  const Grid g = Grid::make(16, 16, 1.0, 1.0);
  const double m = 0.9;
  Field mask(g);
  mask(8, 8) = 1.0;
  const Field stripes = Field::from_function(g, [&](double x, double) { return x < 0.5 ? -m : m; });
  const Field f = binarize_to_phase(Field::from_function(g, [](double x, double) { return x < 0.5 ? 0.0 : 1.0; }), m,
                                    0.5, &mask);

  const Field raw = initial_guess(f, mask, 0.0);
  Field scaled = f;
  scaled *= 1.0 - 1e-6;
  CHECK(testing::max_abs_diff(raw, scaled) == 0.0);

  const Field c = initial_guess(Field(g, 0.3), Field(g), 2.0);
  CHECK(testing::max_abs_diff(c, Field(g, 0.3 * (1.0 - 1e-6))) <= 1e-15);

  const Field blurred = initial_guess(stripes, Field(g), 1.5);
  CHECK(std::abs(blurred(7, 3)) < m);
  CHECK(std::abs(blurred(8, 3)) < m);
  CHECK(blurred.max_abs() < m);

  CHECK(testing::error_code_of([&] { initial_guess(Field(g, 2.0), Field(g), 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("phase images") {
  const TempDir tmp;
  const Grid g = Grid::make(8, 4, 2.0, 1.0);
  const double m = 0.8;
  auto gray = [&](double v) { return phase_to_image(Field(g, v), m).pixels; };
  for (auto p : gray(m)) CHECK(p == 255);
  for (auto p : gray(-m)) CHECK(p == 0);
  for (auto p : gray(0.0)) CHECK(p == 128);
  for (auto p : gray(1.0)) CHECK(p == 255);

  const Field phi = testing::random_field(g, 3, -m, m);
  write_phase_image(phi, m, tmp.file("phi.pgm"));
  const Field back = load_image(tmp.file("phi.pgm"), g);
  for (std::size_t k = 0; k < phi.size(); ++k) CHECK(std::abs(back[k] - (0.5 * phi[k] / m + 0.5)) <= 0.5 / 255 + 1e-12);
  // Orientation: the top image row is the last grid row.
  Field ramp = Field::from_function(g, [](double, double y) { return y - 0.5; });
  CHECK(phase_to_image(ramp, 1.0).pixels.front() > phase_to_image(ramp, 1.0).pixels.back());
}

TEST_CASE("configuration parsing and validation") {
  const RunConfig d;
  CHECK(d.nx == 64);
  CHECK(d.potential.theta_c == 1.5);

  const RunConfig c = parse_config("# comment\nnx = 32\n  eps=0.3   # trailing\n\ndecay_lambdas = 1, 2.5\npotential = quadratic\n");
  CHECK(c.nx == 32);
  CHECK(c.potential.eps == 0.3);
  CHECK(c.decay_lambdas == std::vector<double>{1.0, 2.5});
  CHECK(c.potential.kind == PotentialKind::Quadratic);

  const RunConfig r = parse_config(dump_config(c));
  CHECK(dump_config(r) == dump_config(c));
  CHECK(get_key(c, "eps") == "0.29999999999999999");

  RunConfig o = c;
  apply_override(o, "lambda_max=500");
  CHECK(o.lambda_max == 500.0);
  CHECK(testing::error_code_of([&] { apply_override(o, "no_equals"); }) == ErrorCode::Config);

  CHECK(contains(config_error("theta = 2\ntheta_c = 1.5\n"), "theta must be below theta_c"));
  CHECK(contains(config_error("lambda_min = 10\nlambda_max = 10\n"), "lambda_min must be below lambda_max"));
  CHECK(contains(config_error("alpha1 = 0\nalpha2 = 0\nbeta = 0\n"), "must not all be zero"));
  CHECK(contains(config_error("bogus = 1\n"), "<string>:1: unknown key 'bogus'"));
  CHECK(contains(config_error("nx = 3.5\n"), "nx"));
  CHECK(contains(config_error("nx 32\n"), "expected 'key = value'"));
  CHECK(testing::error_code_of([] { load_config("/nonexistent/run.cfg"); }) == ErrorCode::Io);
}

TEST_CASE("trajectory, field and CSV files") {
  const TempDir tmp;
  const Grid g = Grid::make(8, 8, 1.0, 1.0);
  PotentialParams pp;
  pp.eps = 0.3;
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.n_steps = 5;
  Field mask(g);
  mask(2, 2) = 1.0;
  const Field phi0 = testing::random_field(g, 4, -0.5, 0.5);
  auto run = [&] { return solve(phi0, FidelityField::constant(50.0, mask), Field(g, 0.2), cfg, Potential(pp)); };

  const Trajectory a = run();
  write_trajectory(a, tmp.file("a.bin"));
  const Trajectory back = read_trajectory(tmp.file("a.bin"));
  CHECK(back.n_steps() == 5);
  CHECK(max_l2_distance(back.states, a.states) == 0.0);

  write_field(phi0, tmp.file("f.bin"));
  CHECK(testing::max_abs_diff(read_field(tmp.file("f.bin")), phi0) == 0.0);

  write_diagnostics_csv(a, tmp.file("a.csv"));
  write_diagnostics_csv(run(), tmp.file("b.csv"));
  const std::string csv = read_bytes(tmp.file("a.csv"));
  CHECK(csv == read_bytes(tmp.file("b.csv")));
  CHECK(csv.rfind("step,time,energy,mass,min_phi,max_phi,clamp_events\n", 0) == 0);
  CHECK(csv.find('\r') == std::string::npos);

  write_bytes(tmp.file("short.bin"), std::string(20, '\0'));
  CHECK(testing::error_code_of([&] { read_trajectory(tmp.file("short.bin")); }) == ErrorCode::Io);
}
