#include "recapit/image.hpp"

#include <zlib.h>

#include <cctype>
#include <fstream>

#include "recapit/error.hpp"
#include "recapit/project_io.hpp"

namespace recapit {

namespace {

class HeaderScanner {
public:
    HeaderScanner(const std::string& bytes, const std::string& name) : b_(bytes), name_(name) {}

    int next_int() {
        skip_space();
        if (pos_ >= b_.size() || !std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
            throw ValidationError("malformed PGM header", name_);
        }
        long v = 0;
        while (pos_ < b_.size() && std::isdigit(static_cast<unsigned char>(b_[pos_]))) {
            v = v * 10 + (b_[pos_++] - '0');
            if (v > 1'000'000) throw ValidationError("PGM dimension too large", name_);
        }
        return static_cast<int>(v);
    }

    void skip_space() {
        while (pos_ < b_.size()) {
            if (b_[pos_] == '#') {
                while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(b_[pos_]))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::size_t pos() const { return pos_; }
    void advance(std::size_t n) { pos_ += n; }

private:
    const std::string& b_;
    const std::string& name_;
    std::size_t pos_ = 2;
};

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>((v >> 24) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>(v & 0xff));
}

void put_chunk(std::string& out, const char* type, const std::string& data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    std::string body(type, 4);
    body += data;
    out += body;
    const auto crc = ::crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

std::string png_from_rows(int width, int height, int channels, const std::uint8_t* pixels) {
    std::string raw;
    const std::size_t stride = static_cast<std::size_t>(width) * channels;
    raw.reserve((stride + 1) * height);
    for (int y = 0; y < height; ++y) {
        raw.push_back('\0');  // filter: none
        raw.append(reinterpret_cast<const char*>(pixels + y * stride), stride);
    }
    uLongf packed_size = compressBound(static_cast<uLong>(raw.size()));
    std::string packed(packed_size, '\0');
    if (compress2(reinterpret_cast<Bytef*>(packed.data()), &packed_size, reinterpret_cast<const Bytef*>(raw.data()),
                  static_cast<uLong>(raw.size()), 6) != Z_OK) {
        throw IoError("zlib compression failed");
    }
    packed.resize(packed_size);

    std::string out("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(width));
    put_u32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);                                 // bit depth
    ihdr.push_back(static_cast<char>(channels == 3 ? 2 : 0));  // color type
    ihdr.append(3, '\0');
    put_chunk(out, "IHDR", ihdr);
    put_chunk(out, "IDAT", packed);
    put_chunk(out, "IEND", {});
    return out;
}

}  // namespace

GrayImage decode_pgm(const std::string& bytes, const std::string& name) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw ValidationError("not a binary PGM (P5) file", name);
    HeaderScanner scan(bytes, name);
    GrayImage img;
    img.width = scan.next_int();
    img.height = scan.next_int();
    const int maxval = scan.next_int();
    if (img.width <= 0 || img.height <= 0) throw ValidationError("PGM dimensions must be positive", name);
    if (maxval <= 0 || maxval > 255) throw ValidationError("only 8-bit PGM is supported", name);
    scan.advance(1);  // single whitespace after maxval
    const std::size_t count = static_cast<std::size_t>(img.width) * img.height;
    if (bytes.size() < scan.pos() + count) throw ValidationError("truncated PGM pixel data", name);
    img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(scan.pos()),
                      bytes.begin() + static_cast<std::ptrdiff_t>(scan.pos() + count));
    if (maxval != 255) {
        for (auto& p : img.pixels) p = static_cast<std::uint8_t>((p * 255 + maxval / 2) / maxval);
    }
    return img;
}

GrayImage read_pgm(const std::filesystem::path& path) { return decode_pgm(read_file(path), path.string()); }

std::string encode_pgm(const GrayImage& image) {
    std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
    return out;
}

std::string encode_png(const RgbImage& image) { return png_from_rows(image.width, image.height, 3, image.pixels.data()); }

std::string encode_png(const GrayImage& image) { return png_from_rows(image.width, image.height, 1, image.pixels.data()); }

std::pair<int, int> image_dimensions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image " + path.string(), path.string());
    std::string head(512, '\0');
    in.read(head.data(), static_cast<std::streamsize>(head.size()));
    head.resize(static_cast<std::size_t>(in.gcount()));
    if (head.size() >= 24 && head.compare(0, 8, std::string("\x89PNG\r\n\x1a\n", 8)) == 0) {
        auto u32 = [&](std::size_t off) {
            return (static_cast<unsigned char>(head[off]) << 24) | (static_cast<unsigned char>(head[off + 1]) << 16) |
                   (static_cast<unsigned char>(head[off + 2]) << 8) | static_cast<unsigned char>(head[off + 3]);
        };
        return {static_cast<int>(u32(16)), static_cast<int>(u32(20))};
    }
    if (head.size() >= 2 && head[0] == 'P' && head[1] == '5') {
        HeaderScanner scan(head, path.string());
        const int w = scan.next_int();
        const int h = scan.next_int();
        return {w, h};
    }
    throw IoError("unsupported image format (expected PGM or PNG): " + path.string(), path.string());
}

std::string base64_encode(const std::string& bytes) {
    static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) | (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                           static_cast<unsigned char>(bytes[i + 2]);
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += kAlphabet[(v >> 6) & 63];
        out += kAlphabet[v & 63];
    }
    if (i < bytes.size()) {
        unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        if (i + 1 < bytes.size()) v |= static_cast<unsigned char>(bytes[i + 1]) << 8;
        out += kAlphabet[(v >> 18) & 63];
        out += kAlphabet[(v >> 12) & 63];
        out += i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=';
        out += '=';
    }
    return out;
}

}  // namespace recapit
