// tests/test_cli.cpp

// Copyright 2026  The EDC Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "edc/audio_io.hpp"
#include "support/cli_runner.hpp"
#include "support/test_util.hpp"

#include <sstream>

using testutil::quote;
using testutil::run_cli;

namespace {

struct Pgm {
  long width = 0;
  long height = 0;
  std::vector<std::uint8_t> pixels;
};

Pgm read_pgm(const std::filesystem::path& path) {
  const auto bytes = edc::read_file(path);
  std::string text(bytes.begin(), bytes.end());
  std::istringstream in(text);
  std::string magic;
  int maxval = 0;
  Pgm p;
  in >> magic >> p.width >> p.height >> maxval;
  REQUIRE(magic == "P5");
  REQUIRE(maxval == 255);
  in.get();
  const auto offset = static_cast<std::size_t>(in.tellg());
  p.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset), bytes.end());
  return p;
}

}  // namespace

TEST_CASE("help, version and usage errors") {
  testutil::TempDir dir("cli");
  CHECK(run_cli("--help", dir.path()).status == 0);
  const auto v = run_cli("--version", dir.path());
  CHECK(v.status == 0);
  CHECK(v.output.find("0.1.0") != std::string::npos);
  CHECK(run_cli("extract --bogus", dir.path()).status == 2);
  CHECK(run_cli("frobnicate", dir.path()).status == 2);
}

TEST_CASE("extract produces padded 64-band features") {
  testutil::TempDir dir("cli-extract");
  testutil::write_tone(dir / "ten.wav", 10.0, 440.0);
  const auto r = run_cli("extract --in " + quote(dir / "ten.wav") + " --out " + quote(dir / "ten.edcf"), dir.path());
  REQUIRE(r.status == 0);
  const auto t = edc::read_features(dir / "ten.edcf");
  CHECK(t.frames() == 500);
  CHECK(t.bins() == 64);
  CHECK(t.meta.clip_id == "ten");
  CHECK(t.meta.method == "none");

  CHECK(run_cli("extract --no-pad --in " + quote(dir / "ten.wav") + " --out " + quote(dir / "raw.edcf"), dir.path())
            .status == 0);
  CHECK(edc::read_features(dir / "raw.edcf").frames() == 499);

  CHECK(run_cli("extract --in " + quote(dir / "nope.wav") + " --out " + quote(dir / "x.edcf"), dir.path()).status ==
        3);

  const std::string junk = "RIFF....WAVEjunk";
  edc::write_file(dir / "bad.wav", std::vector<std::uint8_t>(junk.begin(), junk.end()));
  CHECK(run_cli("extract --in " + quote(dir / "bad.wav") + " --out " + quote(dir / "x.edcf"), dir.path()).status ==
        4);
}

TEST_CASE("condition records its parameters") {
  testutil::TempDir dir("cli-condition");
  testutil::write_tone(dir / "a.wav", 2.0, 440.0, 1);
  testutil::write_tone(dir / "b.wav", 2.0, 880.0, 2);
  REQUIRE(run_cli("extract --in " + quote(dir / "a.wav") + " --out " + quote(dir / "a.edcf"), dir.path()).status == 0);
  REQUIRE(run_cli("extract --in " + quote(dir / "b.wav") + " --out " + quote(dir / "b.edcf"), dir.path()).status == 0);
  const auto a = edc::read_features(dir / "a.edcf");

  SUBCASE("edc") {
    REQUIRE(run_cli("condition --method edc --alpha 7 --in " + quote(dir / "a.edcf") + " --out " +
                        quote(dir / "e.edcf"),
                    dir.path())
                .status == 0);
    const auto e = edc::read_features(dir / "e.edcf");
    CHECK(e.meta.method == "edc");
    CHECK(e.meta.params.at("conditioning").at("alpha") == 7.0);
    CHECK(e.frames() == a.frames());
    CHECK(e.bins() == a.bins());

    CHECK(run_cli("condition --method edc --alpha 0 --in " + quote(dir / "a.edcf") + " --out " +
                      quote(dir / "z.edcf"),
                  dir.path())
              .status == 2);
    CHECK(run_cli("condition --method edc --alpha 7 --beta 0.2 --in " + quote(dir / "a.edcf") + " --out " +
                      quote(dir / "z.edcf"),
                  dir.path())
              .status == 2);
  }

  SUBCASE("specaug") {
    const std::string base = "condition --method specaug --time-mask-width 10 --time-masks 1 --in " +
                             quote(dir / "a.edcf") + " --out ";
    REQUIRE(run_cli(base + quote(dir / "s1.edcf") + " --seed 5", dir.path()).status == 0);
    REQUIRE(run_cli(base + quote(dir / "s2.edcf"), dir.path(), "EDC_SEED=5").status == 0);
    CHECK(edc::read_file(dir / "s1.edcf") == edc::read_file(dir / "s2.edcf"));
    CHECK(run_cli("condition --method specaug --in " + quote(dir / "a.edcf") + " --out " + quote(dir / "s3.edcf"),
                  dir.path())
              .status == 2);
  }

  SUBCASE("mixup") {
    REQUIRE(run_cli("condition --method mixup --lambda 1.0 --partner " + quote(dir / "b.edcf") + " --in " +
                        quote(dir / "a.edcf") + " --out " + quote(dir / "m.edcf"),
                    dir.path())
                .status == 0);
    CHECK(edc::read_features(dir / "m.edcf").data == a.data);
    CHECK(run_cli("condition --method mixup --lambda 1.5 --partner " + quote(dir / "b.edcf") + " --in " +
                      quote(dir / "a.edcf") + " --out " + quote(dir / "m.edcf"),
                  dir.path())
              .status == 2);
  }
}

TEST_CASE("ranges") {
  testutil::TempDir dir("cli-ranges");
  const auto r = run_cli("ranges --alphas 2.5,5,7,10,20,50,100,250,500", dir.path());
  CHECK(r.status == 0);
  CHECK(r.output ==
        "alpha\tframes\n2.5\t18\n5\t38\n7\t54\n10\t78\n20\t156\n50\t390\n100\t782\n250\t1956\n500\t3912\n");

  const auto clamped = run_cli("ranges --alphas 500 --frames 500", dir.path());
  CHECK(clamped.status == 0);
  CHECK(clamped.output.find("3912\t500") != std::string::npos);
  CHECK(clamped.output.find("global attention") != std::string::npos);

  CHECK(run_cli("ranges --alphas 7 --cutoff 0.5", dir.path()).output == "alpha\tframes\n7\t8\n");
  CHECK(run_cli("ranges --alphas 0", dir.path()).status == 2);
}

TEST_CASE("plot") {
  testutil::TempDir dir("cli-plot");
  testutil::write_tone(dir / "a.wav", 10.0, 440.0);
  REQUIRE(run_cli("extract --in " + quote(dir / "a.wav") + " --out " + quote(dir / "a.edcf"), dir.path()).status == 0);
  REQUIRE(run_cli("plot --in " + quote(dir / "a.edcf") + " --out " + quote(dir / "a.pgm"), dir.path()).status == 0);
  const auto img = read_pgm(dir / "a.pgm");
  CHECK(img.width == 500);
  CHECK(img.height == 64);
  CHECK(img.pixels.size() == 500u * 64u);

  edc::FeatureTensor flat;
  flat.data = edc::Matrix<float>::Constant(20, 8, -3.0f);
  flat.meta.clip_id = "flat";
  flat.meta.method = "none";
  edc::write_features(flat, dir / "flat.edcf");
  REQUIRE(run_cli("plot --in " + quote(dir / "flat.edcf") + " --out " + quote(dir / "flat.pgm"), dir.path())
              .status == 0);
  const auto f = read_pgm(dir / "flat.pgm");
  CHECK(std::all_of(f.pixels.begin(), f.pixels.end(), [](std::uint8_t p) { return p == 128; }));

  REQUIRE(run_cli("plot --in " + quote(dir / "a.edcf") + " --compare " + quote(dir / "a.edcf") + " --out " +
                      quote(dir / "cmp.pgm"),
                  dir.path())
              .status == 0);
  const auto c = read_pgm(dir / "cmp.pgm");
  CHECK(c.width >= 1000);
  CHECK(c.height == 64);

  REQUIRE(run_cli("plot --in " + quote(dir / "a.edcf") + " --out " + quote(dir / "a.png"), dir.path()).status == 0);
  const auto png = edc::read_file(dir / "a.png");
  REQUIRE(png.size() > 8);
  CHECK(png[1] == 'P');
  CHECK(png[2] == 'N');
  CHECK(png[3] == 'G');
}

TEST_CASE("batch") {
  testutil::TempDir dir("cli-batch");
  std::string csv = "path,dog,cat\n";
  for (int i = 0; i < 3; ++i) {
    testutil::write_tone(dir / ("c" + std::to_string(i) + ".wav"), 1.0, 300.0 + 100.0 * i, i);
    csv += "c" + std::to_string(i) + ".wav," + (i % 2 ? "1,0" : "0,1") + "\n";
  }
  edc::write_file(dir / "train.csv", std::vector<std::uint8_t>(csv.begin(), csv.end()));

  const auto r = run_cli("batch --manifest " + quote(dir / "train.csv") + " --out-dir " + quote(dir / "out") +
                             " --method edc --alpha 5 --mode am",
                         dir.path());
  REQUIRE(r.status == 0);
  const auto summary = nlohmann::json::parse(edc::read_file(dir / "out" / "summary.json"));
  CHECK(summary.at("outputs") == 6);
  CHECK(summary.at("mode") == "am");
  CHECK(summary.at("params").at("alpha") == 5.0);
  CHECK(std::filesystem::exists(dir / "out" / "c1.edc.edcf"));
  CHECK(std::filesystem::exists(dir / "out" / "c1.orig.edcf"));

  CHECK(run_cli("batch --manifest " + quote(dir / "missing.csv") + " --out-dir " + quote(dir / "o2"), dir.path())
            .status == 3);
}
