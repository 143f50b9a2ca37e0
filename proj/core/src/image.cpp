#include "prepbench/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

namespace prepbench {

ImageBuffer make_image(int width, int height, int channels, std::uint8_t fill) {
    ImageBuffer img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.pixels.assign(static_cast<std::size_t>(width) * height * channels, fill);
    return img;
}

long round_half_away(double v) {
    return std::lround(v); // lround rounds halfway cases away from zero
}

std::uint8_t clamp_u8(double v) {
    long r = round_half_away(v);
    return static_cast<std::uint8_t>(std::clamp(r, 0L, 255L));
}

namespace {

struct ByteReader {
    const std::vector<std::uint8_t>& data;
    std::size_t pos = 0;

    bool eof() const { return pos >= data.size(); }
    int peek() const { return eof() ? -1 : data[pos]; }
    int get() { return eof() ? -1 : data[pos++]; }

    // Skips whitespace and '#' comment lines between header tokens.
    void skip_separators() {
        while (!eof()) {
            int c = peek();
            if (std::isspace(c)) {
                ++pos;
            } else if (c == '#') {
                while (!eof() && get() != '\n') {
                }
            } else {
                break;
            }
        }
    }

    long read_number() {
        skip_separators();
        if (eof() || !std::isdigit(peek()))
            throw Error(ErrorCode::MalformedHeader, "expected numeric header field");
        long value = 0;
        while (!eof() && std::isdigit(peek())) {
            value = value * 10 + (get() - '0');
            if (value > 1'000'000'000L)
                throw Error(ErrorCode::MalformedHeader, "header field out of range");
        }
        return value;
    }
};

} // namespace

ImageBuffer read_image(const std::vector<std::uint8_t>& bytes) {
    ByteReader r{bytes};
    int m0 = r.get();
    int m1 = r.get();
    int channels;
    if (m0 == 'P' && m1 == '5')
        channels = 1;
    else if (m0 == 'P' && m1 == '6')
        channels = 3;
    else
        throw Error(ErrorCode::MalformedHeader, "bad magic, want P5 or P6");

    long w = r.read_number();
    long h = r.read_number();
    long maxval = r.read_number();
    if (w < 1 || h < 1)
        throw Error(ErrorCode::MalformedHeader, "non-positive dimensions");
    if (maxval != 255)
        throw Error(ErrorCode::UnsupportedMaxval, "maxval must be 255, got " + std::to_string(maxval));

    // Exactly one whitespace byte separates the header from the raster.
    if (r.eof() || !std::isspace(r.peek()))
        throw Error(ErrorCode::MalformedHeader, "missing raster separator");
    r.get();

    std::size_t payload = static_cast<std::size_t>(w) * h * channels;
    if (bytes.size() - r.pos < payload)
        throw Error(ErrorCode::TruncatedPayload,
                    "need " + std::to_string(payload) + " raster bytes, have " +
                        std::to_string(bytes.size() - r.pos));

    ImageBuffer img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.channels = channels;
    img.pixels.assign(bytes.begin() + r.pos, bytes.begin() + r.pos + payload);
    return img;
}

std::vector<std::uint8_t> write_image(const ImageBuffer& img) {
    std::string header = (img.channels == 3 ? "P6\n" : "P5\n");
    header += std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

ImageBuffer read_image_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::UnreadableImage, path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return read_image(bytes);
}

void write_image_file(const ImageBuffer& img, const std::string& path) {
    auto bytes = write_image(img);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::UnreadableImage, "cannot open for write: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

ImageBuffer rgb_to_gray(const ImageBuffer& img) {
    if (img.channels != 3)
        throw Error(ErrorCode::WrongChannelCount, "rgb_to_gray needs 3 channels");
    ImageBuffer out = make_image(img.width, img.height, 1);
    std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < n; ++i) {
        double y = 0.299 * img.pixels[3 * i] + 0.587 * img.pixels[3 * i + 1] +
                   0.114 * img.pixels[3 * i + 2];
        out.pixels[i] = clamp_u8(y);
    }
    return out;
}

ImageBuffer resize_bilinear(const ImageBuffer& img, int out_w, int out_h) {
    if (out_w == img.width && out_h == img.height)
        return img;
    ImageBuffer out = make_image(out_w, out_h, img.channels);
    double sx = static_cast<double>(img.width) / out_w;
    double sy = static_cast<double>(img.height) / out_h;
    for (int oy = 0; oy < out_h; ++oy) {
        double fy = (oy + 0.5) * sy - 0.5;
        double cy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
        int y0 = static_cast<int>(std::floor(cy));
        int y1 = std::min(y0 + 1, img.height - 1);
        double wy = cy - y0;
        for (int ox = 0; ox < out_w; ++ox) {
            double fx = (ox + 0.5) * sx - 0.5;
            double cx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
            int x0 = static_cast<int>(std::floor(cx));
            int x1 = std::min(x0 + 1, img.width - 1);
            double wx = cx - x0;
            for (int c = 0; c < img.channels; ++c) {
                double top = (1 - wx) * img.at(x0, y0, c) + wx * img.at(x1, y0, c);
                double bot = (1 - wx) * img.at(x0, y1, c) + wx * img.at(x1, y1, c);
                out.at(ox, oy, c) = clamp_u8((1 - wy) * top + wy * bot);
            }
        }
    }
    return out;
}

} // namespace prepbench
