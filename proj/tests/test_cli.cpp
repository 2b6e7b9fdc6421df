#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"
#include "nilray/image.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string out;  // stdout and stderr
};

CliResult run(const std::string& args) {
  const std::string cmd = std::string(NILRAY_CLI) + " " + args + " 2>&1";
  CliResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("nilray_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_scene(const json& doc, const std::string& name = "scene.json") {
    const fs::path p = dir_ / name;
    std::ofstream(p) << doc.dump(2);
    return p;
  }

  static json flat_scene() {
    return json::parse(R"({
      "objects": [{"name": "ball", "center": {"chart": "rot", "coords": [0, 0, -2]}, "radius": 0.5, "color": [0.9, 0.4, 0.2]}],
      "lights": [{"position": {"chart": "rot", "coords": [1, 1, 0.5]}}],
      "camera": {"position": {"chart": "rot", "coords": [0, 0, 0]}, "fov": 60},
      "background": "black",
      "output": {"width": 64, "height": 64}
    })");
  }

  fs::path dir_;
};

std::vector<std::uint8_t> mask_of(const nilray::Image& img) {
  std::vector<std::uint8_t> m(static_cast<std::size_t>(img.width) * img.height);
  for (std::size_t k = 0; k < m.size(); ++k)
    m[k] = img.rgb[3 * k] || img.rgb[3 * k + 1] || img.rgb[3 * k + 2];
  return m;
}

}  // namespace

TEST_F(Cli, RenderWritesImageAndStats) {
  const fs::path scene = write_scene(flat_scene());
  const CliResult r = run("render --scene " + scene.string() + " --out " + (dir_ / "a.png").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("hit_rate="), std::string::npos);
  EXPECT_NE(r.out.find("mean_steps="), std::string::npos);
  EXPECT_NE(r.out.find("newton_failures="), std::string::npos);
  const nilray::Image img = nilray::read_image(dir_ / "a.png");
  EXPECT_EQ(img.width, 64);
  EXPECT_EQ(img.height, 64);
  EXPECT_EQ(nilray::testing::components(mask_of(img), 64, 64).size(), 1u);

  ASSERT_EQ(run("render --scene " + scene.string() + " --width 40 --height 30 --out " + (dir_ / "b.ppm").string()).code, 0);
  EXPECT_EQ(slurp(dir_ / "b.ppm").rfind("P6\n40 30\n255\n", 0), 0u);
}

TEST_F(Cli, RenderIsDeterministic) {
  const fs::path scene = write_scene(flat_scene());
  const std::string base = "render --scene " + scene.string() + " --width 48 --height 48 --out ";
  ASSERT_EQ(run(base + (dir_ / "1.ppm").string() + " --threads 1").code, 0);
  ASSERT_EQ(run(base + (dir_ / "2.ppm").string() + " --threads 4").code, 0);
  ASSERT_EQ(run(base + (dir_ / "3.ppm").string() + " --threads 4").code, 0);
  const std::string a = slurp(dir_ / "1.ppm");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir_ / "2.ppm"));
  EXPECT_EQ(a, slurp(dir_ / "3.ppm"));
}

TEST_F(Cli, ExitCodes) {
  json bad = flat_scene();
  bad["objects"][0]["radious"] = 1;
  CliResult r = run("render --scene " + write_scene(bad).string() + " --out " + (dir_ / "x.ppm").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("radious"), std::string::npos);

  // Out-of-domain object under --quotient: named in the message.
  r = run("render --quotient --scene " + write_scene(flat_scene()).string() + " --out " + (dir_ / "q.ppm").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("object 0 (\"ball\")"), std::string::npos) << r.out;

  std::ofstream(dir_ / "broken.json") << "{";
  EXPECT_EQ(run("render --scene " + (dir_ / "broken.json").string()).code, 1);
  EXPECT_EQ(run("render --scene " + (dir_ / "missing.json").string()).code, 2);
  EXPECT_EQ(run("render --scene " + write_scene(flat_scene()).string() + " --out /nonexistent/dir/x.ppm").code, 2);
  json tex = flat_scene();
  tex["objects"][0]["texture"] = "nope.png";
  EXPECT_EQ(run("render --scene " + write_scene(tex).string()).code, 2);
  EXPECT_EQ(run("render --bogus-flag").code, 1);
  EXPECT_EQ(run("probe nonsense").code, 1);
  EXPECT_EQ(run("probe geodesic-trace --a 0.6 --c 0.9").code, 1);
  EXPECT_EQ(run("animate --scene " + write_scene(flat_scene()).string() + " --move 1,2:3 --out " + dir_.string()).code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, AnimateZeroPathEqualsRender) {
  const fs::path scene = write_scene(flat_scene());
  ASSERT_EQ(run("render --scene " + scene.string() + " --out " + (dir_ / "still.ppm").string()).code, 0);
  ASSERT_EQ(run("animate --scene " + scene.string() + " --out " + (dir_ / "frames").string()).code, 0);
  EXPECT_EQ(slurp(dir_ / "still.ppm"), slurp(dir_ / "frames" / "frame_0000.ppm"));
  EXPECT_FALSE(fs::exists(dir_ / "frames" / "frame_0001.ppm"));
}

TEST_F(Cli, AnimateFlightAlongAxisFormsRing) {
  // Fly away from a unit sphere along the axis: one disk near it, a ring past h*.
  const fs::path scene = fs::path(NILRAY_SCENES_DIR) / "mirage_pre.json";
  const CliResult r = run("animate --scene " + scene.string() + " --width 96 --height 96 --move 0,0,2.5:3 --format png --out " +
                    (dir_ / "f").string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::vector<std::size_t> counts;
  for (int k = 0; k < 4; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04d.png", k);
    const nilray::Image img = nilray::read_image(dir_ / "f" / name);
    std::size_t big = 0;
    for (const auto& c : nilray::testing::components(mask_of(img), img.width, img.height)) big += c.size >= 4;
    counts.push_back(big);
  }
  EXPECT_EQ(counts.front(), 1u);
  EXPECT_GE(counts.back(), 2u);
}

TEST_F(Cli, HorizontalFlightShrinks) {
  json doc = flat_scene();
  doc["objects"][0]["center"]["coords"] = {3, 0, 0};
  doc["phong"] = {{"ambient", 1.0}};
  // Looking along +x: back = -e1, up = e3, right = up x back = -e2.
  doc["camera"] = {{"position", {{"chart", "rot"}, {"coords", {0, 0, 0}}}}, {"frame", {0, 0, -1, -1, 0, 0, 0, 1, 0}}, {"fov", 60}};
  const CliResult r = run("animate --scene " + write_scene(doc).string() + " --move 0,0,0.7:4 --format png --out " + (dir_ / "h").string());
  ASSERT_EQ(r.code, 0) << r.out;
  int prev = 1 << 30;
  for (int k = 0; k < 5; ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04d.png", k);
    const auto m = mask_of(nilray::read_image(dir_ / "h" / name));
    int area = 0;
    for (auto v : m) area += v;
    EXPECT_GT(area, 0);
    EXPECT_LE(area, prev + 2);
    prev = area;
  }
}

TEST_F(Cli, ProbeTraceAndCsv) {
  const fs::path csv = dir_ / "trace.csv";
  ASSERT_EQ(run("probe geodesic-trace --a 0.6 --c 0.8 --t-max 10 --samples 200 --out " + csv.string()).code, 0);
  std::istringstream in(slurp(csv));
  std::string line;
  double worst = 0;
  int rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      EXPECT_EQ(line, "t,x,y,z,x_ode,y_ode,z_ode");
      header = true;
      continue;
    }
    std::array<double, 7> v{};
    char comma;
    std::istringstream ls(line);
    ls >> v[0];
    for (int k = 1; k < 7; ++k) ls >> comma >> v[k];
    for (int k = 1; k <= 3; ++k) worst = std::max(worst, std::fabs(v[k] - v[k + 3]));
    ++rows;
  }
  EXPECT_EQ(rows, 200);
  EXPECT_LT(worst, 1e-6);

  const CliResult conj = run("probe conjugate --h-min 1 --h-max 14 --samples 14");
  ASSERT_EQ(conj.code, 0);
  EXPECT_NE(conj.out.find("h,count,solutions"), std::string::npos);
  EXPECT_NE(conj.out.find("h*="), std::string::npos);

  const CliResult q = run("probe geodesic-trace --quotient --start 0.5 0.2 0.5 --a 1 --c 0.2 --t-max 4 --samples 20");
  ASSERT_EQ(q.code, 0) << q.out;
  EXPECT_NE(q.out.find("t,x,y,z,hx,hy,hz,word"), std::string::npos);
}
