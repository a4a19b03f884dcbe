#pragma once

#include <filesystem>

#include "shotguard/image.hpp"

namespace shotguard {

// Decodes PNG or JPEG (sniffed from the file signature) into 8-bit RGB.
// Alpha is dropped, grayscale is expanded, 16-bit samples are stripped.
// Throws IngestionError on unreadable or undecodable files.
Screenshot read_image(const std::filesystem::path& path);

Screenshot read_png(const std::filesystem::path& path);
Screenshot read_jpeg(const std::filesystem::path& path);

enum class ImageFormat { png, jpeg, unknown };
ImageFormat sniff_format(const std::filesystem::path& path);

void write_png(const Screenshot& img, const std::filesystem::path& path);

}  // namespace shotguard
