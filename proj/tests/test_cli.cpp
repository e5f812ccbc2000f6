#include "hardy/cli.hpp"
#include "hardy/parallel.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hardy;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig config_for(const Settings& s) { return resolve_config(s); }

}  // namespace

TEST_CASE("config file sections and overrides") {
  std::istringstream in("[run]\ncommand = solve\nseed = 9\n[domain]\ndomain = disk:2\n[mesh]\nh = 0.2\nlevels = 3\n"
                        "[solver]\np = 3\n[sweep]\namplitudes = 0.2, 0.1\n");
  Settings s = read_config(in);
  CHECK(s.at("domain") == "disk:2");
  s["p"] = "2.5";
  const RunConfig c = config_for(s);
  CHECK(c.command == "solve");
  CHECK(c.p == 2.5);
  CHECK(c.levels == 3);
  CHECK(c.mesh.h == 0.2);
  CHECK(c.seed == 9u);
  CHECK(c.amplitudes == std::vector<double>{0.2, 0.1});

  std::istringstream wrong("[mesh]\np = 2\n");
  CHECK_THROWS_AS(read_config(wrong), Error);
  std::istringstream unknown("[mesh]\nsize = 2\n");
  CHECK_THROWS_AS(read_config(unknown), Error);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(config_for({{"command", "solve"}, {"p", "1"}}), Error);
  CHECK_THROWS_AS(config_for({{"command", "solve"}, {"levels", "0"}}), Error);
  CHECK_THROWS_AS(config_for({{"command", "launch"}}), Error);
  CHECK_THROWS_AS(config_for({{"command", "derivative"}}), Error);
  CHECK_THROWS_AS(config_for({{"command", "solve"}, {"domain", "polygon:/nonexistent/file"}}), Error);
  CHECK_THROWS_AS(config_for({{"command", "solve"}, {"h", "abc"}}), Error);
  CHECK_NOTHROW(config_for({{"command", "alpha"}, {"H", "0.1"}}));
}

TEST_CASE("domain and field specs") {
  CHECK(parse_domain("disk:2", 256).area() == doctest::Approx(4.0 * M_PI).epsilon(1e-3));
  CHECK(parse_domain("rectangle:2,1", 64).area() == doctest::Approx(2.0));
  CHECK(parse_domain("square", 64).area() == doctest::Approx(1.0));
  CHECK(parse_domain("peanut", 1024).area() == doctest::Approx(M_PI * (1.0 + 0.55 * 0.55 / 2.0)).epsilon(1e-4));
  CHECK_NOTHROW(parse_domain("star:0.3,5", 512));
  CHECK_NOTHROW(parse_domain("cassini:1,1.2", 512));
  CHECK_NOTHROW(parse_domain("ellipse:1,0.5", 512));
  CHECK_THROWS_AS(parse_domain("blob", 64), Error);
  CHECK_THROWS_AS(parse_domain("rectangle:2", 64), Error);

  const Domain d = parse_domain("peanut", 1024);
  const FieldPtr b = parse_field("bump:0.3,0.45:0.3:0,1:2", d);
  CHECK(b->value(Vec2(0.3, 0.45)).y() == doctest::Approx(2.0));
  CHECK(parse_field("translation:1,2", d)->value(Vec2(5, 5)).x() == doctest::Approx(1.0));
  CHECK(parse_field("dilation", d)->value(Vec2(0.5, 0.25)).y() == doctest::Approx(0.25));
  CHECK(parse_field("rotation:1,0", d)->value(Vec2(1, 1)).x() == doctest::Approx(-1.0));
  CHECK(parse_field("bump:0.3,0.45:0.3:0,1:1:auto", d)->value(Vec2(0.0, 0.0)).norm() == 0.0);
  CHECK_THROWS_AS(parse_field("bump:0.3,0.45", d), Error);
  CHECK_THROWS_AS(parse_field("swirl", d), Error);

  const Cylinder c = parse_cylinder("-0.3,0.3,0,0.9:0.5,0:1.5707963267948966");
  CHECK(c.w1 == 0.3);
  CHECK(c.frame.normal.x() == doctest::Approx(-1.0));
  CHECK_THROWS_AS(parse_cylinder("0.3,-0.3,0,1"), Error);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorKind::parameter) == exit_validation);
  CHECK(exit_code_for(ErrorKind::convergence_failure) == exit_solver);
  CHECK(exit_code_for(ErrorKind::applicability) == exit_inapplicable);

  const auto dir = std::filesystem::temp_directory_path() / "hardylab_cli_test";
  std::filesystem::remove_all(dir);
  RunConfig c = config_for({{"command", "alpha"}, {"p", "2"}, {"H", "0.1875"}});
  c.out_dir = dir.string();
  std::ostringstream out, err;
  CHECK(run(c, out, err) == exit_ok);
  CHECK(out.str() == "0.75\n");
  const Json j = Json::parse(slurp(dir / "alpha.json"));
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["config"]["H"] == 0.1875);
  CHECK(std::filesystem::exists(dir / "alpha.meta.json"));

  RunConfig d = config_for({{"command", "derivative"},
                            {"domain", "disk"},
                            {"psi", "bump:0.3,0.45:0.3:0,1"},
                            {"h", "0.25"}});
  d.out_dir = dir.string();
  std::ostringstream out2, err2;
  CHECK(run(d, out2, err2) == exit_inapplicable);
  const Json rec = Json::parse(err2.str());
  CHECK(rec["error"]["kind"] == "applicability");
  CHECK(Json::parse(slurp(dir / "derivative.json"))["status"] == exit_inapplicable);

  RunConfig e = config_for({{"command", "alpha"}, {"p", "2"}, {"H", "0.5"}});
  e.out_dir = dir.string();
  std::ostringstream out3, err3;
  CHECK(run(e, out3, err3) == exit_validation);
  CHECK(Json::parse(err3.str())["error"]["exit_code"] == exit_validation);
  std::filesystem::remove_all(dir);
}

TEST_CASE("JSON output is byte-identical across thread counts") {
  const auto base = std::filesystem::temp_directory_path() / "hardylab_det_test";
  std::filesystem::remove_all(base);
  std::string first;
  for (int threads : {1, 3}) {
    RunConfig c = config_for({{"command", "solve"}, {"domain", "peanut"}, {"h", "0.25"}, {"levels", "2"}});
    c.threads = threads;
    c.out_dir = (base / std::to_string(threads)).string();
    std::ostringstream out, err;
    REQUIRE(run(c, out, err) == exit_ok);
    const std::string text = slurp(base / std::to_string(threads) / "solve.json");
    if (first.empty()) first = text;
    else CHECK(text == first);
  }
  set_num_threads(0);
  std::filesystem::remove_all(base);
}

TEST_CASE("numbers are written with 17 significant digits") {
  Json j;
  j["x"] = 0.1;
  j["n"] = std::nan("");
  CHECK(dump_json(j, 0) == "{\"x\":0.10000000000000001,\"n\":null}\n");
}
