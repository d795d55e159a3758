#include <doctest.h>

#include "test_util.hpp"

using testutil::fixture_path;
using testutil::run_tool;

TEST_CASE("check verdicts and exit codes") {
  auto ok = run_tool("check " + fixture_path("fig3.alcqm"));
  CHECK(ok.exit_code == 0);
  CHECK(ok.output == "CONSISTENT\n");

  auto bad = run_tool("check " + fixture_path("example1.alcqm") + " --explain");
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find("INCONSISTENT") == 0);

  auto missing = run_tool("check /no/such/file.alcqm");
  CHECK(missing.exit_code == 2);
}

TEST_CASE("explain-all surfaces the label cycle of example 1") {
  auto r = run_tool("check " + fixture_path("example1.alcqm") + " --explain-all");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("cycle") != std::string::npos);
  CHECK(r.output.find("river =m River") != std::string::npos);
}

TEST_CASE("model output is accepted back by model-check") {
  auto model = run_tool("check " + fixture_path("fig3.alcqm") + " --model");
  REQUIRE(model.exit_code == 0);
  std::string text = model.output.substr(model.output.find('\n') + 1);  // drop CONSISTENT
  std::string path = "/tmp/alcqm_cli_fig3.model";
  {
    std::ofstream out(path);
    out << text;
  }
  auto mc = run_tool("model-check " + fixture_path("fig3.alcqm") + " " + path);
  CHECK(mc.exit_code == 0);
  CHECK(mc.output.find("ok") == 0);
}

TEST_CASE("model-check validates the handwritten model") {
  auto r = run_tool("model-check " + fixture_path("fig3.alcqm") + " " +
                    fixture_path("fig3_hand.model"));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "ok\nLEVEL 1\n");
}

TEST_CASE("infer subcommands") {
  std::string fig3 = fixture_path("fig3.alcqm");
  auto meta = run_tool("infer " + fig3 + " meta river River");
  CHECK(meta.exit_code == 0);
  CHECK(meta.output == "true\n");

  auto mc = run_tool("infer " + fig3 + " metaconcept HydrographicObject");
  CHECK(mc.exit_code == 0);
  CHECK(mc.output.find("true") == 0);
  CHECK(mc.output.find("witness: river =m River") != std::string::npos);

  auto sub = run_tool("infer " + fig3 + " subsumes River Lake");
  CHECK(sub.exit_code == 1);
  CHECK(sub.output == "false\n");

  auto inst = run_tool("infer " + fig3 + " instance River queguay");
  CHECK(inst.exit_code == 0);

  auto unknown = run_tool("infer " + fig3 + " meta nosuch River");
  CHECK(unknown.exit_code == 2);
}

TEST_CASE("hierarchy output is sorted by level then name") {
  auto r = run_tool("hierarchy " + fixture_path("fig3.alcqm"));
  CHECK(r.exit_code == 0);
  CHECK(r.output == "Lake: 0\nRiver: 0\nHydrographicObject: 1\n");

  auto empty = run_tool("hierarchy " + fixture_path("empty.alcqm"));
  CHECK(empty.exit_code == 0);
  CHECK(empty.output.empty());

  auto bad = run_tool("hierarchy " + fixture_path("example2.alcqm"));
  CHECK(bad.exit_code == 1);
}

TEST_CASE("parse errors report positions and exit 2") {
  std::string path = "/tmp/alcqm_cli_broken.alcqm";
  {
    std::ofstream out(path);
    out << "TBOX\nMBOX\nABOX\n";
  }
  auto r = run_tool("check " + path);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find(":2:") != std::string::npos);
}

TEST_CASE("output is deterministic for fixed input and flags") {
  for (std::string args : {"check " + fixture_path("example3.alcqm") + " --explain",
                           "check " + fixture_path("fig3.alcqm") + " --model",
                           "check " + fixture_path("fig3.alcqm") + " --trace",
                           "hierarchy " + fixture_path("fig5.alcqm")}) {
    auto a = run_tool(args);
    auto b = run_tool(args);
    CHECK(a.exit_code == b.exit_code);
    CHECK(a.output == b.output);
  }
}

TEST_CASE("trace stream carries rule and mutation lines") {
  auto r = run_tool("check " + fixture_path("def7_cycle.alcqm") + " --trace");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("LABEL") != std::string::npos);
  CHECK(r.output.find("CLOSE cycle") != std::string::npos);
}

TEST_CASE("fuzz subcommand agrees on a small batch") {
  auto r = run_tool("fuzz 25 --seed 900");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("25 cases, 0 disagreements") != std::string::npos);
}

TEST_CASE("step cap environment variable trips exit 3") {
  auto r = run_tool("check " + fixture_path("fig5.alcqm") + " --step-cap 2");
  CHECK(r.exit_code == 3);
}
