#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace recapit {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, 3 bytes per pixel
};

// Binary portable graymap (P5), maxval <= 255. Comments in the header are
// skipped.
GrayImage decode_pgm(const std::string& bytes, const std::string& name = "<memory>");
GrayImage read_pgm(const std::filesystem::path& path);
std::string encode_pgm(const GrayImage& image);

std::string encode_png(const RgbImage& image);
std::string encode_png(const GrayImage& image);

// Width and height from a PGM or PNG header; throws IoError otherwise.
std::pair<int, int> image_dimensions(const std::filesystem::path& path);

std::string base64_encode(const std::string& bytes);

}  // namespace recapit
