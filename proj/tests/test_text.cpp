#include <doctest.h>

#include <filesystem>

#include "termclass/io.hpp"
#include "termclass/text.hpp"

using namespace termclass;

TEST_SUITE("text") {
  TEST_CASE("utf8 round trip") {
    const std::string s = "Zürich Αθήνα Москва €";
    const auto cps = text::decode_utf8(s);
    CHECK(cps.size() == 21);
    CHECK(text::encode_utf8(cps) == s);
  }

  TEST_CASE("malformed bytes become replacement characters") {
    const auto cps = text::decode_utf8(std::string("a\xff" "b"));
    REQUIRE(cps.size() == 3);
    CHECK(cps[1] == U'�');
  }

  TEST_CASE("lowercasing beyond ascii") {
    CHECK(text::lower(std::string_view("ÉCOLE Ωmega БАНК")) == "école ωmega банк");
    CHECK(text::is_upper(U'A'));
    CHECK_FALSE(text::is_upper(U'%'));
    CHECK(text::is_lower(U'ß'));
  }

  TEST_CASE("whitespace handling") {
    CHECK(text::split_whitespace("  Apple   Inc. \t x") == std::vector<std::string>{"Apple", "Inc.", "x"});
    CHECK(text::split_whitespace("   ").empty());
    CHECK(text::trim("  a b \n") == "a b");
    CHECK(text::normalize_key("  Interest   RATE\tSwap ") == "interest rate swap");
  }

  TEST_CASE("shortest round-trip doubles") {
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(1.0) == "1");
    for (double v : {1.0 / 3.0, -2.5e-300, 123456.789, 1e22}) {
      CHECK(std::stod(io::format_double(v)) == v);
    }
  }

  TEST_CASE("atomic write creates parents and replaces content") {
    const auto dir = std::filesystem::temp_directory_path() / "termclass-io-test";
    std::filesystem::remove_all(dir);
    const auto path = dir / "a" / "b.txt";
    io::write_file_atomic(path, "one");
    io::write_file_atomic(path, "two");
    CHECK(io::read_file(path) == "two");
    CHECK_THROWS(io::read_file(dir / "missing"));
    std::filesystem::remove_all(dir);
  }
}
