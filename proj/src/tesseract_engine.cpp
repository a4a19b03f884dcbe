#include <stdlib.h>
#include <unistd.h>

#include <filesystem>
#include <sstream>
#include <system_error>

#include "shotguard/image_io.hpp"
#include "shotguard/ocr.hpp"
#include "subprocess.hpp"

namespace shotguard {
namespace {

// Temporary PNG removed on scope exit.
class TempPng {
 public:
  TempPng() {
    std::string pattern = (std::filesystem::temp_directory_path() / "shotguard-XXXXXX.png").string();
    const int fd = ::mkstemps(pattern.data(), 4);
    if (fd < 0) throw ExtractionUnavailable("cannot create temporary image file");
    ::close(fd);
    path_ = pattern;
  }
  ~TempPng() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempPng(const TempPng&) = delete;
  TempPng& operator=(const TempPng&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

std::string tail(const std::string& s, std::size_t n = 200) {
  return s.size() <= n ? s : s.substr(s.size() - n);
}

}  // namespace

TesseractConfig TesseractConfig::standard() { return TesseractConfig{}; }

TesseractConfig TesseractConfig::alternate() {
  TesseractConfig cfg;
  cfg.oem = 1;
  cfg.psm = 6;
  return cfg;
}

TesseractEngine::TesseractEngine(TesseractConfig cfg) : cfg_(std::move(cfg)) {}

std::string TesseractEngine::name() const {
  return "tesseract(oem=" + std::to_string(cfg_.oem) + ",psm=" + std::to_string(cfg_.psm) + ")";
}

bool TesseractEngine::available() const {
  try {
    const auto r = detail::run_process({cfg_.executable, "--version"}, cfg_.timeout);
    return !r.timed_out && r.exit_code == 0;
  } catch (const std::system_error&) {
    return false;
  }
}

std::vector<RecognizedText> TesseractEngine::recognize(const Screenshot& img) const {
  TempPng input;
  try {
    write_png(img, input.path());
  } catch (const Error& e) {
    throw ExtractionUnavailable(std::string("cannot stage image for OCR: ") + e.what());
  }
  std::vector<std::string> argv{cfg_.executable, input.path().string(), "stdout",
                                "-l", cfg_.language, "--oem", std::to_string(cfg_.oem),
                                "--psm", std::to_string(cfg_.psm)};
  if (cfg_.tessdata_dir) {
    argv.insert(argv.begin() + 3, {"--tessdata-dir", cfg_.tessdata_dir->string()});
  }

  detail::ProcessResult r;
  try {
    r = detail::run_process(argv, cfg_.timeout);
  } catch (const std::system_error& e) {
    throw ExtractionUnavailable(name() + " could not be started: " + e.what());
  }
  if (r.timed_out) {
    throw ExtractionTimeout(name() + " exceeded " + std::to_string(cfg_.timeout.count()) + " ms");
  }
  if (r.exit_code != 0) {
    throw ExtractionUnavailable(name() + " exited with status " + std::to_string(r.exit_code) +
                                ": " + tail(r.err));
  }

  std::vector<RecognizedText> out;
  std::istringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r\f\v") == std::string::npos) continue;
    out.push_back({line, std::nullopt});
  }
  return out;
}

}  // namespace shotguard
