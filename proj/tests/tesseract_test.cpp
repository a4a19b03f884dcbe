#include <gtest/gtest.h>

#include <chrono>
#include <fstream>

#include "shotguard/image_io.hpp"
#include "shotguard/ocr.hpp"
#include "support.hpp"

using namespace shotguard;
using shotguard::testing::TempDir;

namespace {

std::string write_script(const TempDir& dir, const std::string& name, const std::string& body) {
  const auto path = dir / name;
  std::ofstream(path) << "#!/bin/sh\n" << body;
  std::filesystem::permissions(path, std::filesystem::perms::owner_all);
  return path.string();
}

TesseractEngine engine_for(const std::string& exe, std::chrono::milliseconds timeout = std::chrono::seconds(10)) {
  TesseractConfig cfg;
  cfg.executable = exe;
  cfg.timeout = timeout;
  return TesseractEngine(cfg);
}

}  // namespace

TEST(Tesseract, Configurations) {
  EXPECT_EQ(TesseractConfig::standard().oem, 3);
  EXPECT_EQ(TesseractConfig::standard().psm, 3);
  EXPECT_EQ(TesseractConfig::alternate().oem, 1);
  EXPECT_EQ(TesseractConfig::alternate().psm, 6);
  EXPECT_NE(TesseractEngine(TesseractConfig::standard()).name(), TesseractEngine(TesseractConfig::alternate()).name());
}

TEST(Tesseract, ParsesLinesAndPassesArguments) {
  TempDir dir("tess");
  const auto log = (dir / "args.txt").string();
  const auto exe = write_script(dir, "fake-tesseract",
                                "if [ \"$1\" = --version ]; then echo 'tesseract 5'; exit 0; fi\n"
                                "echo \"$@\" > " + log + "\n"
                                "test -s \"$1\" || exit 3\n"
                                "printf 'Click the link below\\n\\n   \\nSecond line\\n'\n");
  const auto engine = engine_for(exe);
  EXPECT_TRUE(engine.available());
  const auto out = engine.recognize(Screenshot::filled(20, 10, 255, 255, 255));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].text, "Click the link below");
  EXPECT_FALSE(out[0].confidence.has_value());
  EXPECT_EQ(out[1].text, "Second line");

  std::ifstream in(log);
  std::string args;
  std::getline(in, args);
  EXPECT_NE(args.find(" stdout -l eng --oem 3 --psm 3"), std::string::npos) << args;
  // The staged image is cleaned up afterwards.
  EXPECT_FALSE(std::filesystem::exists(args.substr(0, args.find(' '))));
}

TEST(Tesseract, StagedImageIsReadablePng) {
  TempDir dir("tess");
  const auto copy = (dir / "copy.png").string();
  const auto exe = write_script(dir, "fake", "cp \"$1\" " + copy + "\n");
  auto img = Screenshot::filled(7, 5, 10, 200, 30);
  img.set_pixel(3, 2, 1, 2, 3);
  engine_for(exe).recognize(img);
  EXPECT_EQ(read_image(copy), img);
}

TEST(Tesseract, NonzeroExitIsUnavailable) {
  TempDir dir("tess");
  const auto exe = write_script(dir, "fake", "echo 'Error opening data file' >&2\nexit 1\n");
  const auto engine = engine_for(exe);
  EXPECT_FALSE(engine.available());
  try {
    engine.recognize(Screenshot::filled(4, 4, 0, 0, 0));
    FAIL();
  } catch (const ExtractionUnavailable& e) {
    EXPECT_NE(std::string(e.what()).find("Error opening data file"), std::string::npos);
  }
}

TEST(Tesseract, MissingExecutableIsUnavailable) {
  const auto engine = engine_for("/nonexistent/tesseract-binary");
  EXPECT_FALSE(engine.available());
  EXPECT_THROW(engine.recognize(Screenshot::filled(4, 4, 0, 0, 0)), ExtractionUnavailable);
}

TEST(Tesseract, SlowEngineTimesOut) {
  TempDir dir("tess");
  const auto exe = write_script(dir, "fake", "sleep 5\n");
  const auto engine = engine_for(exe, std::chrono::milliseconds(200));
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(engine.recognize(Screenshot::filled(4, 4, 0, 0, 0)), ExtractionTimeout);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 3.0);
}

TEST(Tesseract, LargeOutputDoesNotDeadlock) {
  TempDir dir("tess");
  const auto exe = write_script(dir, "fake", "i=0; while [ $i -lt 20000 ]; do echo \"line $i of output\"; i=$((i+1)); done\n"
                                             "i=0; while [ $i -lt 5000 ]; do echo \"noise $i\" >&2; i=$((i+1)); done\n");
  EXPECT_EQ(engine_for(exe).recognize(Screenshot::filled(4, 4, 0, 0, 0)).size(), 20000u);
}
