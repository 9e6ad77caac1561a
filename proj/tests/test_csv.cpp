#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hjnet/csv.hpp"
#include "hjnet/detail/random.hpp"

using namespace hjnet;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "hjnet_csv_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("csv") {
  TEST_CASE("format_real round-trips") {
    detail::Rng rng(1);
    for (int k = 0; k < 1000; ++k) {
      const double v = rng.uniform(-1, 1) * std::pow(10.0, rng.uniform(-30, 30));
      CHECK(std::strtod(format_real(v).c_str(), nullptr) == v);
    }
    CHECK(format_real(0.0) == "0");
    CHECK(format_real(0.5) == "0.5");
  }

  TEST_CASE("empty table is a header-only file") {
    ResultTable t;
    t.columns = {"a", "b"};
    CHECK(to_csv(t) == "a,b\n");
  }

  TEST_CASE("1x1 table") {
    ResultTable t;
    t.columns = {"v"};
    t.add_row({2.0});
    CHECK(to_csv(t) == "v\n2.0\n");
    CHECK_THROWS(t.add_row({1.0, 2.0}));
  }

  TEST_CASE("round trip with quoting") {
    ResultTable t;
    t.columns = {"name", "x", "n", "note"};
    t.add_row({std::string("a,b"), 0.1, std::int64_t{3}, std::string("say \"hi\"\nthere")});
    t.add_row({std::string("plain"), -1e-300, std::int64_t{-7}, std::string()});
    t.add_row({std::string("x"), 1e300, std::int64_t{0}, std::string("1.5")});
    const auto back = parse_csv(to_csv(t));
    CHECK(back.columns == t.columns);
    REQUIRE(back.rows.size() == 3);
    CHECK(back.rows[0] == t.rows[0]);
    CHECK(back.rows[1] == t.rows[1]);
    CHECK(back.rows[2] == t.rows[2]);
    CHECK(back.number(0, "x") == 0.1);
  }

  TEST_CASE("files and sidecars") {
    ResultTable t;
    t.columns = {"x"};
    t.add_row({1.5});
    t.metadata = "{\"k\": 1}";
    const auto p = scratch("sub/dir/t.csv");
    std::filesystem::remove_all(p.parent_path());
    write_csv(t, p);
    CHECK(slurp(p) == "x\n1.5\n");
    CHECK(slurp(p.string() + ".meta.json") == "{\"k\": 1}");
    CHECK_FALSE(std::filesystem::exists(p.string() + ".tmp"));
  }

  TEST_CASE("I/O errors name the path") {
    const auto blocker = scratch("blocker");
    { std::ofstream(blocker) << "x"; }
    try {
      write_file_atomic(blocker / "inner.csv", "data");
      FAIL("expected an IoError");
    } catch (const IoError& e) {
      CHECK(std::string(e.what()).find("blocker") != std::string::npos);
    }
  }
}
