#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

using json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(MOYAL_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("catalog --format json").code == 0);
  CHECK(run("catalog --catalog " MOYAL_SOURCE_DIR "/tests/fixtures/catalog_corrupted.json").code == 1);
  CHECK(run("example 7").code == 2);
  CHECK(run("example 1 --epsilon 2,0").code == 2);
  CHECK(run("example 1 --tol nonsense=1").code == 2);
  CHECK(run("example 1 --format yaml").code == 2);
  CHECK(run("coeffs --nu 0.5").code == 2);
  CHECK(run("coeffs --nu x").code == 2);
  CHECK(run("").code == 2);
}

TEST_CASE("example output and the output directory") {
  auto dir = std::filesystem::temp_directory_path() / "moyal-cli-test";
  std::filesystem::remove_all(dir);
  Run r = run("example 2 --a 0.5,0 --format json --out " + dir.string());
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["scenario"] == "example-2");
  std::ifstream in(dir / "example-2.json");
  REQUIRE(in);
  CHECK(json::parse(in) == j);
  std::string env = "MOYAL_OUTPUT_DIR=" + (dir / "env").string() + " ";
  std::string cmd = env + MOYAL_CLI + " catalog --format csv > /dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(std::filesystem::exists(dir / "env" / "catalog.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("coeffs output") {
  Run r = run("coeffs --domain product --a 0,0 --nu 5,10 --mmax 2 --format json");
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["records"].size() == 6);
  for (const auto& rec : j["records"]) CHECK(rec["pass"] == true);
}

TEST_CASE("verify-all passes and every anchor resolves") {
  std::ifstream in(MOYAL_SOURCE_DIR "/data/anchors.json");
  REQUIRE(in);
  std::set<std::string> ids;
  json manifest = json::parse(in);
  for (const auto& [k, v] : manifest.at("anchors").items()) ids.insert(k);
  Run r = run("verify-all --format json --seed 20061");
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["summary"]["failed"] == 0);
  CHECK(j["summary"]["expected_failures"] == 1);
  for (const auto& rec : j["records"]) CHECK_MESSAGE(ids.count(rec["anchor"].get<std::string>()) == 1, rec["anchor"]);
}
