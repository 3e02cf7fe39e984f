// src/audio_io.cpp

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

#include "edc/audio_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

namespace edc {

namespace {

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct WavFormat {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

double decode_sample(const std::uint8_t* p, const WavFormat& fmt) {
  if (fmt.tag == kFormatFloat) return static_cast<double>(std::bit_cast<float>(get_u32(p)));
  switch (fmt.bits) {
    case 8:
      return (static_cast<double>(p[0]) - 128.0) / 128.0;
    case 16:
      return static_cast<double>(static_cast<std::int16_t>(get_u16(p))) / 32768.0;
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return static_cast<double>(v) / 8388608.0;
    }
    default:
      return static_cast<double>(static_cast<std::int32_t>(get_u32(p))) / 2147483648.0;
  }
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

AudioClip load_wav(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes = read_file(path);
  const std::string where = " in '" + path.string() + "'";

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("malformed RIFF header" + where);
  }

  WavFormat fmt;
  bool have_fmt = false;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::size_t size = get_u32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || available < 16) throw FormatError("truncated fmt chunk" + where);
      const std::uint8_t* f = bytes.data() + body;
      fmt.tag = get_u16(f);
      fmt.channels = get_u16(f + 2);
      fmt.sample_rate = get_u32(f + 4);
      fmt.block_align = get_u16(f + 12);
      fmt.bits = get_u16(f + 14);
      if (fmt.tag == kFormatExtensible) {
        if (size < 40 || available < 40) throw FormatError("truncated extensible fmt chunk" + where);
        fmt.tag = get_u16(f + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      // Streaming writers leave the size at 0xFFFFFFFF; take what is there.
      data_size = std::min(size, available);
    }
    if (size > available) break;
    pos = body + size + (size & 1);
  }

  if (!have_fmt) throw FormatError("missing fmt chunk" + where);
  if (data == nullptr) throw FormatError("missing data chunk" + where);
  if (fmt.channels == 0 || fmt.sample_rate == 0) {
    throw FormatError("zero channels or sample rate" + where);
  }
  if (fmt.tag == kFormatPcm) {
    if (fmt.bits != 8 && fmt.bits != 16 && fmt.bits != 24 && fmt.bits != 32) {
      throw UnsupportedEncoding(std::to_string(fmt.bits) + "-bit integer PCM is not supported" + where);
    }
  } else if (fmt.tag == kFormatFloat) {
    if (fmt.bits != 32) {
      throw UnsupportedEncoding(std::to_string(fmt.bits) + "-bit float is not supported" + where);
    }
  } else {
    throw UnsupportedEncoding("WAV format tag " + std::to_string(fmt.tag) + " is not supported" + where);
  }

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  if (fmt.block_align != frame_bytes) throw FormatError("block align disagrees with bit depth" + where);
  const std::size_t frames = data_size / frame_bytes;
  if (frames == 0) throw FormatError("no samples" + where);

  AudioClip clip;
  clip.sample_rate = fmt.sample_rate;
  clip.samples.resize(frames);
  for (std::size_t n = 0; n < frames; ++n) {
    double sum = 0.0;
    const std::uint8_t* frame = data + n * frame_bytes;
    for (std::size_t c = 0; c < fmt.channels; ++c) sum += decode_sample(frame + c * bytes_per_sample, fmt);
    const double value = sum / fmt.channels;
    if (!std::isfinite(value)) throw DataError("non-finite sample" + where);
    clip.samples[n] = value;
  }
  return clip;
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path, int bits_per_sample) {
  if (bits_per_sample != 0 && bits_per_sample != 8 && bits_per_sample != 16 && bits_per_sample != 24 &&
      bits_per_sample != 32) {
    throw ArgumentError("write_wav: unsupported bit depth " + std::to_string(bits_per_sample));
  }
  const bool is_float = bits_per_sample == 0;
  const std::uint16_t bits = is_float ? 32 : static_cast<std::uint16_t>(bits_per_sample);
  const std::uint16_t block = bits / 8;
  const auto rate = static_cast<std::uint32_t>(std::lround(clip.sample_rate));
  const auto data_size = static_cast<std::uint32_t>(clip.samples.size() * block);

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size + 1);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size + (data_size & 1));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, is_float ? kFormatFloat : kFormatPcm);
  put_u16(out, 1);
  put_u32(out, rate);
  put_u32(out, rate * block);
  put_u16(out, block);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_size);
  for (double s : clip.samples) {
    const double v = std::clamp(s, -1.0, 1.0);
    if (is_float) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
      continue;
    }
    switch (bits) {
      case 8:
        out.push_back(static_cast<std::uint8_t>(std::clamp(std::lround(v * 128.0) + 128, 0L, 255L)));
        break;
      case 16:
        put_u16(out, static_cast<std::uint16_t>(std::clamp(std::lround(v * 32768.0), -32768L, 32767L)));
        break;
      case 24: {
        const auto q = static_cast<std::uint32_t>(std::clamp(std::lround(v * 8388608.0), -8388608L, 8388607L));
        for (int shift = 0; shift < 24; shift += 8) out.push_back(static_cast<std::uint8_t>(q >> shift));
        break;
      }
      default:
        put_u32(out, static_cast<std::uint32_t>(
                         std::clamp(std::llround(v * 2147483648.0), -2147483648LL, 2147483647LL)));
    }
  }
  if (data_size & 1) out.push_back(0);
  write_file(path, out);
}

void Manifest::validate() const {
  if (class_names.empty()) throw DataError("manifest must declare at least one class");
  std::set<std::string> seen;
  for (const auto& name : class_names) {
    if (!seen.insert(name).second) throw DataError("duplicate class name '" + name + "'");
  }
  for (const auto& e : entries) {
    if (e.labels.size() != class_names.size()) {
      throw DataError("label vector of '" + e.path + "' has length " + std::to_string(e.labels.size()) +
                      ", expected " + std::to_string(class_names.size()));
    }
  }
}

Manifest parse_manifest(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
  }
  if (lines.empty()) throw DataError("empty manifest");

  const std::vector<std::string> header = split_fields(lines.front());
  if (header.empty() || header.front() != "path") {
    throw DataError("manifest header must start with 'path'");
  }
  Manifest m;
  m.class_names.assign(header.begin() + 1, header.end());
  const std::size_t arity = header.size();

  for (std::size_t row = 1; row < lines.size(); ++row) {
    const std::string where = "manifest line " + std::to_string(row + 1);
    if (lines[row].empty()) continue;
    const std::vector<std::string> fields = split_fields(lines[row]);
    for (const auto& f : fields) {
      if (!f.empty() && f.front() == '"') throw FormatError(where + ": quoted fields are not supported");
    }
    if (fields.size() != arity) {
      throw DataError(where + ": expected " + std::to_string(arity) + " fields, got " +
                      std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw DataError(where + ": empty path");
    ManifestEntry entry{fields[0], {}};
    entry.labels.reserve(arity - 1);
    for (std::size_t k = 1; k < arity; ++k) {
      if (fields[k] == "0") {
        entry.labels.push_back(0);
      } else if (fields[k] == "1") {
        entry.labels.push_back(1);
      } else {
        throw DataError(where + ": non-binary label '" + fields[k] + "'");
      }
    }
    m.entries.push_back(std::move(entry));
  }
  m.validate();
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  return parse_manifest(std::string(bytes.begin(), bytes.end()));
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
  manifest.validate();
  auto plain = [](const std::string& field) {
    return !field.empty() && field.find_first_of(",\r\n") == std::string::npos && field.front() != '"';
  };
  std::string text = "path";
  for (const auto& name : manifest.class_names) {
    if (!plain(name)) throw ArgumentError("class name '" + name + "' cannot be written unquoted");
    text += "," + name;
  }
  text += "\n";
  for (const auto& e : manifest.entries) {
    if (!plain(e.path)) throw ArgumentError("path '" + e.path + "' cannot be written unquoted");
    text += e.path;
    for (auto y : e.labels) text += y ? ",1" : ",0";
    text += "\n";
  }
  write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::vector<std::uint8_t> encode_features(const FeatureTensor& tensor) {
  const Index t = tensor.frames();
  const Index f = tensor.bins();
  if (t < 1 || f < 1) throw DataError("feature tensor must have T >= 1 and F >= 1");
  require_finite(tensor.data, "encode_features");

  const nlohmann::json meta = {
      {"clip_id", tensor.meta.clip_id}, {"method", tensor.meta.method}, {"params", tensor.meta.params}};
  const std::string blob = meta.dump();

  std::vector<std::uint8_t> out;
  out.reserve(13 + static_cast<std::size_t>(t * f) * 4 + 4 + blob.size());
  out.insert(out.end(), kFeatureMagic, kFeatureMagic + 4);
  out.push_back(kFeatureVersion);
  put_u32(out, static_cast<std::uint32_t>(t));
  put_u32(out, static_cast<std::uint32_t>(f));
  for (Index i = 0; i < t; ++i) {
    for (Index j = 0; j < f; ++j) put_u32(out, std::bit_cast<std::uint32_t>(tensor.data(i, j)));
  }
  put_u32(out, static_cast<std::uint32_t>(blob.size()));
  out.insert(out.end(), blob.begin(), blob.end());
  return out;
}

FeatureTensor decode_features(const std::vector<std::uint8_t>& bytes) {
  constexpr std::size_t kHeader = 4 + 1 + 4 + 4;
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kFeatureMagic, 4) != 0) {
    throw FormatError("not an EDCF feature file (bad magic)");
  }
  if (bytes.size() < kHeader) throw FormatError("truncated EDCF header");
  if (bytes[4] != kFeatureVersion) {
    throw FormatError("unsupported EDCF version " + std::to_string(bytes[4]));
  }
  const std::uint64_t t = get_u32(bytes.data() + 5);
  const std::uint64_t f = get_u32(bytes.data() + 9);
  if (t == 0 || f == 0) throw FormatError("EDCF dimensions must be non-zero");
  const std::uint64_t payload = t * f * 4;
  if (bytes.size() < kHeader + payload + 4) {
    throw FormatError("EDCF payload is shorter than " + std::to_string(t) + "x" + std::to_string(f));
  }
  const std::uint8_t* meta_at = bytes.data() + kHeader + payload;
  const std::uint64_t meta_len = get_u32(meta_at);
  if (bytes.size() != kHeader + payload + 4 + meta_len) {
    throw FormatError("EDCF size disagrees with declared dimensions and metadata length");
  }

  FeatureTensor tensor;
  tensor.data.resize(static_cast<Index>(t), static_cast<Index>(f));
  const std::uint8_t* p = bytes.data() + kHeader;
  for (Index i = 0; i < tensor.data.rows(); ++i) {
    for (Index j = 0; j < tensor.data.cols(); ++j, p += 4) tensor.data(i, j) = std::bit_cast<float>(get_u32(p));
  }
  require_finite(tensor.data, "decode_features");

  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_at + 4, meta_at + 4 + meta_len);
    tensor.meta.clip_id = meta.at("clip_id").get<std::string>();
    tensor.meta.method = meta.at("method").get<std::string>();
    tensor.meta.params = meta.at("params");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad EDCF metadata: ") + e.what());
  }
  return tensor;
}

void write_features(const FeatureTensor& tensor, const std::filesystem::path& path) {
  write_file(path, encode_features(tensor));
}

FeatureTensor read_features(const std::filesystem::path& path) { return decode_features(read_file(path)); }

}  // namespace edc
