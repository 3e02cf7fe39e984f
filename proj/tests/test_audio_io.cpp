// tests/test_audio_io.cpp

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
#include "support/test_util.hpp"

#include <bit>
#include <cstring>
#include <random>

using edc::AudioClip;
using edc::FeatureTensor;
using edc::Index;

namespace {

struct RawWav {
  std::uint16_t tag = 1;
  std::uint16_t channels = 1;
  std::uint32_t rate = 16000;
  std::uint16_t bits = 16;
  std::vector<std::uint8_t> data;

  std::vector<std::uint8_t> bytes() const {
    std::vector<std::uint8_t> out;
    auto u16 = [&](std::uint16_t v) {
      out.push_back(static_cast<std::uint8_t>(v));
      out.push_back(static_cast<std::uint8_t>(v >> 8));
    };
    auto u32 = [&](std::uint32_t v) {
      for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
    };
    auto tag4 = [&](const char* t) { out.insert(out.end(), t, t + 4); };
    tag4("RIFF");
    u32(static_cast<std::uint32_t>(4 + 8 + 16 + 8 + 8 + data.size()));
    tag4("WAVE");
    tag4("LIST");  // unrelated chunk the reader must skip
    u32(0);
    tag4("fmt ");
    u32(16);
    u16(tag);
    u16(channels);
    u32(rate);
    u32(rate * channels * bits / 8);
    u16(static_cast<std::uint16_t>(channels * bits / 8));
    u16(bits);
    tag4("data");
    u32(static_cast<std::uint32_t>(data.size()));
    out.insert(out.end(), data.begin(), data.end());
    return out;
  }
};

void push_i16(std::vector<std::uint8_t>& d, std::int16_t v) {
  d.push_back(static_cast<std::uint8_t>(v & 0xff));
  d.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

FeatureTensor random_tensor(std::mt19937_64& rng, Index t, Index f) {
  FeatureTensor tensor;
  tensor.data = testutil::random_matrix(rng, t, f, -30.0, 10.0).cast<float>();
  tensor.meta = {"clip-" + std::to_string(t), "edc", {{"alpha", 7.0}, {"labels", {1, 0, 1}}}};
  return tensor;
}

}  // namespace

TEST_CASE("one second of 16-bit silence") {
  testutil::TempDir dir("wav");
  AudioClip clip{std::vector<double>(16000, 0.0), 16000.0};
  edc::write_wav(clip, dir / "silence.wav");
  const AudioClip back = edc::load_wav(dir / "silence.wav");
  CHECK(back.samples.size() == 16000);
  CHECK(back.sample_rate == 16000.0);
  CHECK(std::all_of(back.samples.begin(), back.samples.end(), [](double s) { return s == 0.0; }));
}

TEST_CASE("stereo channels are averaged") {
  testutil::TempDir dir("wav");
  RawWav wav;
  wav.channels = 2;
  for (int n = 0; n < 100; ++n) {
    push_i16(wav.data, 16384);
    push_i16(wav.data, -16384);
  }
  edc::write_file(dir / "stereo.wav", wav.bytes());
  const AudioClip clip = edc::load_wav(dir / "stereo.wav");
  CHECK(clip.samples.size() == 100);
  CHECK(std::all_of(clip.samples.begin(), clip.samples.end(), [](double s) { return s == 0.0; }));
}

TEST_CASE("ten-second clip duration") {
  testutil::TempDir dir("wav");
  edc::write_wav(AudioClip{std::vector<double>(160000, 0.25), 16000.0}, dir / "long.wav");
  const AudioClip clip = edc::load_wav(dir / "long.wav");
  CHECK(clip.samples.size() == 160000);
  CHECK(clip.duration() == 10.0);
}

TEST_CASE("every supported encoding decodes to full scale") {
  testutil::TempDir dir("wav");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  AudioClip clip{std::vector<double>(257), 22050.0};
  for (auto& s : clip.samples) s = u(rng);
  clip.samples[0] = -1.0;
  for (int bits : {8, 16, 24, 32, 0}) {
    CAPTURE(bits);
    const auto path = dir / ("enc" + std::to_string(bits) + ".wav");
    edc::write_wav(clip, path, bits);
    const AudioClip back = edc::load_wav(path);
    REQUIRE(back.samples.size() == clip.samples.size());
    const double step = bits == 0 ? 1e-7 : 2.0 / std::pow(2.0, bits);
    for (std::size_t k = 0; k < clip.samples.size(); ++k) {
      CHECK(std::abs(back.samples[k] - clip.samples[k]) <= step);
    }
    CHECK(back.samples[0] == -1.0);
  }
}

TEST_CASE("integer PCM never exceeds unit magnitude") {
  testutil::TempDir dir("wav");
  std::mt19937_64 rng(2);
  for (std::uint16_t bits : {8, 16, 24, 32}) {
    RawWav wav;
    wav.bits = bits;
    wav.data.resize(static_cast<std::size_t>(bits / 8) * 500);
    for (auto& b : wav.data) b = static_cast<std::uint8_t>(rng());
    // most negative code, little-endian
    std::fill(wav.data.begin(), wav.data.begin() + bits / 8, 0);
    wav.data[bits / 8 - 1] = bits == 8 ? 0 : 0x80;
    edc::write_file(dir / "pcm.wav", wav.bytes());
    const AudioClip clip = edc::load_wav(dir / "pcm.wav");
    CHECK(clip.samples.front() == -1.0);
    CHECK(std::all_of(clip.samples.begin(), clip.samples.end(), [](double s) { return std::abs(s) <= 1.0; }));
  }
}

TEST_CASE("wav errors are distinct") {
  testutil::TempDir dir("wav");
  CHECK_THROWS_AS(edc::load_wav(dir / "missing.wav"), edc::IoError);

  edc::write_file(dir / "junk.wav", {'R', 'I', 'F', 'X', 0, 0, 0, 0, 'W', 'A', 'V', 'E'});
  try {
    edc::load_wav(dir / "junk.wav");
    FAIL("expected FormatError");
  } catch (const edc::UnsupportedEncoding&) {
    FAIL("malformed header reported as unsupported encoding");
  } catch (const edc::FormatError&) {
  }

  RawWav adpcm;
  adpcm.tag = 2;
  adpcm.bits = 4;
  adpcm.data.assign(64, 0);
  edc::write_file(dir / "adpcm.wav", adpcm.bytes());
  CHECK_THROWS_AS(edc::load_wav(dir / "adpcm.wav"), edc::UnsupportedEncoding);

  RawWav odd;
  odd.bits = 12;
  odd.data.assign(64, 0);
  edc::write_file(dir / "odd.wav", odd.bytes());
  CHECK_THROWS_AS(edc::load_wav(dir / "odd.wav"), edc::UnsupportedEncoding);

  RawWav empty;
  edc::write_file(dir / "empty.wav", empty.bytes());
  CHECK_THROWS_AS(edc::load_wav(dir / "empty.wav"), edc::FormatError);
}

TEST_CASE("manifest parsing") {
  const auto m = edc::parse_manifest("path,speech,dog,car\na.wav,1,0,1\n");
  CHECK(m.num_classes() == 3);
  REQUIRE(m.entries.size() == 1);
  CHECK(m.entries[0].path == "a.wav");
  CHECK(m.entries[0].labels == std::vector<std::uint8_t>{1, 0, 1});

  std::string dcase = "path";
  for (int k = 1; k <= 10; ++k) dcase += ",label_" + std::to_string(k);
  dcase += "\r\nclip.wav,0,0,1,0,0,0,0,0,1,0\r\n\r\n";
  CHECK(edc::parse_manifest(dcase).num_classes() == 10);
}

TEST_CASE("manifest errors") {
  CHECK_THROWS_WITH_AS(edc::parse_manifest("path,a,b,c\na.wav,1,2,0\n"), doctest::Contains("non-binary label"),
                       edc::DataError);
  CHECK_THROWS_AS(edc::parse_manifest("path,a,b\na.wav,1\n"), edc::DataError);
  CHECK_THROWS_AS(edc::parse_manifest("path,a,b\nx,y.wav,1,0\n"), edc::DataError);
  CHECK_THROWS_WITH_AS(edc::parse_manifest(""), doctest::Contains("empty manifest"), edc::DataError);
  CHECK_THROWS_AS(edc::parse_manifest("path\n"), edc::DataError);
  CHECK_THROWS_AS(edc::parse_manifest("path,a,a\nx.wav,1,0\n"), edc::DataError);
  CHECK_THROWS_AS(edc::parse_manifest("file,a\nx.wav,1\n"), edc::DataError);
  CHECK_THROWS_AS(edc::parse_manifest("path,a\n\"x,y.wav\",1\n"), edc::FormatError);
}

TEST_CASE("manifest write/read round trip") {
  testutil::TempDir dir("manifest");
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    edc::Manifest m;
    const int k = 1 + static_cast<int>(rng() % 12);
    for (int c = 0; c < k; ++c) m.class_names.push_back("class_" + std::to_string(c));
    const int rows = static_cast<int>(rng() % 20);
    for (int r = 0; r < rows; ++r) {
      edc::ManifestEntry e{"dir/clip " + std::to_string(r) + ".wav", {}};
      for (int c = 0; c < k; ++c) e.labels.push_back(static_cast<std::uint8_t>(rng() & 1));
      m.entries.push_back(e);
    }
    edc::write_manifest(m, dir / "m.csv");
    CHECK(edc::read_manifest(dir / "m.csv") == m);
  }
  edc::Manifest bad{{"a"}, {{"x,y.wav", {1}}}};
  CHECK_THROWS_AS(edc::write_manifest(bad, dir / "bad.csv"), edc::ArgumentError);
}

TEST_CASE("feature files round-trip bit-exactly") {
  testutil::TempDir dir("features");
  std::mt19937_64 rng(4);
  for (auto [t, f] : {std::pair<Index, Index>{500, 64}, {200, 64}, {1, 1}}) {
    const FeatureTensor tensor = random_tensor(rng, t, f);
    edc::write_features(tensor, dir / "x.edcf");
    const FeatureTensor back = edc::read_features(dir / "x.edcf");
    CHECK(back.frames() == t);
    CHECK(back.bins() == f);
    CHECK(std::memcmp(back.data.data(), tensor.data.data(), sizeof(float) * static_cast<std::size_t>(t * f)) == 0);
    CHECK(back.meta == tensor.meta);
  }
  std::uniform_int_distribution<Index> dim(1, 40);
  for (int trial = 0; trial < 50; ++trial) {
    const FeatureTensor tensor = random_tensor(rng, dim(rng), dim(rng));
    const auto bytes = edc::encode_features(tensor);
    CHECK(edc::encode_features(edc::decode_features(bytes)) == bytes);
  }
}

TEST_CASE("feature file layout") {
  FeatureTensor tensor;
  tensor.data.resize(2, 1);
  tensor.data << 1.0f, -2.0f;
  tensor.meta = {"c", "none", nlohmann::json::object()};
  const auto bytes = edc::encode_features(tensor);
  const std::string meta = R"({"clip_id":"c","method":"none","params":{}})";
  REQUIRE(bytes.size() == 4 + 1 + 4 + 4 + 8 + 4 + meta.size());
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "EDCF");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 2);
  CHECK(bytes[9] == 1);
  CHECK(bytes[13] == 0x00);
  CHECK(bytes[16] == 0x3f);  // 1.0f = 0x3f800000
  CHECK(bytes[20] == 0xc0);  // -2.0f = 0xc0000000
  CHECK(bytes[21] == meta.size());
  CHECK(std::string(bytes.begin() + 25, bytes.end()) == meta);
}

TEST_CASE("feature file errors") {
  std::mt19937_64 rng(5);
  const auto good = edc::encode_features(random_tensor(rng, 4, 3));

  auto bad_magic = good;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(edc::decode_features(bad_magic), edc::FormatError);

  auto bad_version = good;
  bad_version[4] = 2;
  CHECK_THROWS_AS(edc::decode_features(bad_version), edc::FormatError);

  auto truncated = good;
  truncated.resize(30);
  CHECK_THROWS_AS(edc::decode_features(truncated), edc::FormatError);

  auto grown = good;
  grown[5] = 5;  // claims T = 5
  CHECK_THROWS_AS(edc::decode_features(grown), edc::FormatError);

  FeatureTensor nan_tensor = random_tensor(rng, 2, 2);
  nan_tensor.data(0, 0) = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(edc::encode_features(nan_tensor), edc::DataError);

  testutil::TempDir dir("features");
  CHECK_THROWS_AS(edc::read_features(dir / "nope.edcf"), edc::IoError);
  CHECK_THROWS_AS(edc::write_features(random_tensor(rng, 2, 2), dir / "no/such/dir/x.edcf"), edc::IoError);
}
