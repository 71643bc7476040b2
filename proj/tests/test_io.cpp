#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "mmhard/mmhard.hpp"

using namespace mmhard;

namespace {

std::string scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mmhard-io-" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

IoErrc io_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const IoError& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected IoError";
  return IoErrc::Io;
}

}  // namespace

TEST(Io, RoundTripInMemory) {
  for (const char* name : {"small", "small-l2"})
    for (Side side : {Side::Yes, Side::No}) {
      const Instance inst = assemble(preset(name), side, 11);
      EXPECT_EQ(deserialize(serialize(inst)), inst) << name;
    }
}

TEST(Io, RoundTripCoupledFlag) {
  const Instance inst = assemble(preset("small"), Side::No, 2, {.coupled = true});
  const Instance back = deserialize(serialize(inst));
  EXPECT_TRUE(back.coupled);
  EXPECT_EQ(back, inst);
}

TEST(Io, SaveLoadWithManifest) {
  const Instance inst = assemble(preset("small"), Side::No, 5);
  const std::string path = scratch("a.mbnd");
  save(inst, path);
  EXPECT_EQ(load(path), inst);
  std::ifstream m(path + ".manifest");
  std::stringstream text;
  text << m.rdbuf();
  EXPECT_NE(text.str().find("format = MBND"), std::string::npos);
  EXPECT_NE(text.str().find("side = NO"), std::string::npos);
  EXPECT_NE(text.str().find("crc64 = "), std::string::npos);
  EXPECT_NE(text.str().find("degree[dummy]"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
}

TEST(Io, SameSeedSameBytes) {
  const ParamSet p = preset("small");
  EXPECT_EQ(serialize(assemble(p, Side::Yes, 3)), serialize(assemble(p, Side::Yes, 3)));
  EXPECT_NE(serialize(assemble(p, Side::Yes, 3)), serialize(assemble(p, Side::Yes, 4)));
}

TEST(Io, TruncatedFileFailsChecksum) {
  auto bytes = serialize(assemble(preset("small"), Side::Yes, 1));
  bytes.resize(bytes.size() - 100);
  EXPECT_EQ(io_error([&] { deserialize(bytes); }), IoErrc::ChecksumMismatch);
}

TEST(Io, FlippedByteFailsChecksum) {
  auto bytes = serialize(assemble(preset("small"), Side::Yes, 1));
  bytes[bytes.size() / 2] ^= 0x10;
  EXPECT_EQ(io_error([&] { deserialize(bytes); }), IoErrc::ChecksumMismatch);
}

TEST(Io, VersionMismatch) {
  auto bytes = serialize(assemble(preset("small"), Side::Yes, 1));
  bytes[4] = 2;
  EXPECT_EQ(io_error([&] { deserialize(bytes); }), IoErrc::FormatVersionMismatch);
}

TEST(Io, BadMagic) {
  std::vector<char> bytes = {'N', 'O', 'P', 'E', 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_EQ(io_error([&] { deserialize(bytes); }), IoErrc::BadMagic);
  EXPECT_EQ(io_error([] { deserialize({}); }), IoErrc::BadMagic);
}

TEST(Io, MissingFile) {
  EXPECT_EQ(io_error([] { load("/nonexistent/dir/x.mbnd"); }), IoErrc::Io);
}

// A checksummed body that is internally inconsistent is rejected as malformed.
TEST(Io, MalformedBodyWithValidChecksum) {
  auto bytes = serialize(assemble(preset("small"), Side::Yes, 1));
  bytes.resize(bytes.size() - 8);
  bytes.push_back(0);  // trailing junk
  const std::uint64_t crc = crc64(bytes.data(), bytes.size());
  const auto* p = reinterpret_cast<const char*>(&crc);
  bytes.insert(bytes.end(), p, p + 8);
  EXPECT_EQ(io_error([&] { deserialize(bytes); }), IoErrc::Malformed);
}

// CRC-64/XZ check value.
TEST(Io, Crc64CheckValue) {
  const char* s = "123456789";
  EXPECT_EQ(crc64(s, 9), 0x995DC9BBDF1939FAULL);
}

TEST(Io, DegreeTable) {
  const Instance inst = assemble(preset("small"), Side::Yes, 1);
  const auto t = degree_table(inst);
  // Core degrees: S has its pairing edge, A_1 has d + γd + 1. Dummies: 252 core + 1 partner.
  EXPECT_EQ(t.at("S^1"), std::make_pair(std::uint64_t{1}, std::uint64_t{1}));
  EXPECT_EQ(t.at("A_1^1"), std::make_pair(std::uint64_t{19}, std::uint64_t{19}));
  EXPECT_EQ(t.at("dummy"), std::make_pair(std::uint64_t{253}, std::uint64_t{253}));
}
