#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <json.hpp>
#include <sys/wait.h>

#include "geom_data.hpp"
#include "physcon/data_io.hpp"
#include "physcon/scene_io.hpp"

using namespace physcon;
namespace fs = std::filesystem;

namespace {

const fs::path kData = PHYSCON_TEST_DATA;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "physcon_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + PHYSCON_CLI + "\" " + args + " > \"" +
                          scratch("stdout.txt").string() + "\" 2> \"" + scratch("stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("synth, refine, eval and collisions") {
  const fs::path scene = scratch("s.json"), gt = scratch("gt.json"), report = scratch("r.json"),
                 refined = scratch("refined.json"), csv = scratch("eval.csv");
  REQUIRE(run("synth --seed 4 --objects 4 --out " + q(scene) + " --gt " + q(gt)) == 0);
  REQUIRE(run("refine --scene " + q(scene) + " --out " + q(report) + " --scene-out " + q(refined)) == 0);
  const auto doc = nlohmann::json::parse(read_file(report));
  CHECK(doc.at("objects").size() == 4);
  CHECK(doc.at("final_cost").get<double>() <= doc.at("initial_cost").get<double>());

  // Identical inputs give byte-identical reports.
  const fs::path again = scratch("r2.json");
  REQUIRE(run("refine --scene " + q(scene) + " --out " + q(again) + " --threads 3") == 0);
  CHECK(read_file(again) == read_file(report));

  REQUIRE(run("eval --scene " + q(refined) + " --gt " + q(gt) + " --out " + q(csv)) == 0);
  const std::string table = read_file(csv);
  CHECK(table.rfind("object_id,mssd_m,mspd_px\n", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 5);

  CHECK(run("collisions --scene " + q(scene)) == 0);
  CHECK(read_file(scratch("stdout.txt")).find("depth") != std::string::npos);
}

TEST_CASE("scene-geom") {
  const auto pc = geomdata::plane_cloud(1, Vec3(0, 0.2, 0.9), Vec3(0, -1, -0.5), 1500, 1e-3, 0.2);
  PointCloud cloud;
  cloud.points = pc.points;
  cloud.confidence.assign(pc.points.size(), 1.0);
  const fs::path ply = scratch("cloud.ply"), csv = scratch("corr.csv"), out = scratch("plane.json");
  write_point_cloud(ply, cloud);
  write_correspondences(csv, geomdata::scale_pairs(2, 1.0, 2, 10, 0.0));
  REQUIRE(run("scene-geom --cloud " + q(ply) + " --corr " + q(csv) + " --out " + q(out)) == 0);
  const auto doc = nlohmann::json::parse(read_file(out));
  CHECK(std::abs(doc.at("scale").get<double>() - 1.0) < 1e-9);
  const Vec3 n(doc.at("plane").at("normal")[0].get<double>(), doc.at("plane").at("normal")[1].get<double>(),
               doc.at("plane").at("normal")[2].get<double>());
  CHECK(geomdata::angle_deg(n, pc.normal) < 1.0);
}

TEST_CASE("exit codes") {
  CHECK(run("") == 1);
  CHECK(run("refine --bogus") == 1);
  CHECK(run("refine --scene " + q(kData / "missing_mesh.json") + " --out " + q(scratch("x.json"))) == 1);
  CHECK(run("refine --scene " + q(scratch("nope.json")) + " --out " + q(scratch("x.json"))) == 1);
  // Coincident cloud points give no usable pair: an input error.
  const fs::path csv = scratch("bad.csv");
  write_file_atomic(csv, "a,0,0,0,0,0,0\na,0,0,0,1,1,1\n");
  const auto pc = geomdata::plane_cloud(1, Vec3(0, 0, 1), Vec3(0, 0, -1), 200, 0.0, 0.0);
  PointCloud cloud;
  cloud.points = pc.points;
  cloud.confidence.assign(pc.points.size(), 1.0);
  write_point_cloud(scratch("ok.ply"), cloud);
  CHECK(run("scene-geom --cloud " + q(scratch("ok.ply")) + " --corr " + q(csv) + " --out " +
            q(scratch("p.json"))) == 1);

  // A plane fit with no consensus is a numerical failure.
  std::vector<Vec3> scatter;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 500; ++i) scatter.emplace_back(u(rng), u(rng), 3 + u(rng));
  cloud.points = scatter;
  cloud.confidence.assign(scatter.size(), 1.0);
  write_point_cloud(scratch("scatter.ply"), cloud);
  write_correspondences(scratch("good.csv"), geomdata::scale_pairs(2, 1.0, 1, 5, 0.0));
  CHECK(run("scene-geom --cloud " + q(scratch("scatter.ply")) + " --corr " + q(scratch("good.csv")) +
            " --inlier-mm 0.01 --out " + q(scratch("p.json"))) == 2);
}
