#include "sarbench/image_io.hpp"

#include "sarbench/errors.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace sarbench::io {

namespace fs = std::filesystem;

namespace {

std::string lower_ext(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void png_error_fn(png_structp png, png_const_charp msg) {
    auto* err = static_cast<std::string*>(png_get_error_ptr(png));
    if (err) *err = msg;
    png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

GrayRaster read_png(const fs::path& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw DecodeError("cannot open " + path.string());

    std::string err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn,
                                             png_warning_fn);
    if (!png) throw DecodeError("libpng init failed for " + path.string());
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DecodeError("libpng init failed for " + path.string());
    }

    GrayRaster out;
    std::vector<png_byte> buffer;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DecodeError("cannot decode " + path.string() + ": " + err);
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    int bit_depth = png_get_bit_depth(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (bit_depth == 16) png_set_swap(png);  // little-endian host order
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    bit_depth = png_get_bit_depth(png, info);
    const int out_type = png_get_color_type(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);

    buffer.resize(rowbytes * height);
    rows.resize(height);
    for (png_uint_32 r = 0; r < height; ++r) rows[r] = buffer.data() + r * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    out.height = static_cast<int>(height);
    out.width = static_cast<int>(width);
    out.maxval = bit_depth == 16 ? 65535u : 255u;
    out.samples.resize(static_cast<std::size_t>(width) * height);

    const bool has_color = (out_type & PNG_COLOR_MASK_COLOR) != 0;
    const int color_channels = has_color ? 3 : 1;
    out.converted_from_color = has_color;

    for (png_uint_32 r = 0; r < height; ++r) {
        for (png_uint_32 c = 0; c < width; ++c) {
            std::uint32_t acc = 0;
            for (int ch = 0; ch < color_channels; ++ch) {
                const std::size_t idx = static_cast<std::size_t>(c) * channels + ch;
                if (bit_depth == 16) {
                    std::uint16_t v = 0;
                    std::memcpy(&v, rows[r] + idx * 2, 2);
                    acc += v;
                } else {
                    acc += rows[r][idx];
                }
            }
            // Round-half-up average of the color channels.
            const std::uint32_t gray =
                (acc + static_cast<std::uint32_t>(color_channels) / 2) / color_channels;
            out.samples[static_cast<std::size_t>(r) * width + c] =
                static_cast<std::uint16_t>(gray);
        }
    }
    return out;
}

// Next whitespace-delimited header token of a PNM file, skipping comments.
std::string pnm_token(std::istream& in) {
    std::string tok;
    int ch = 0;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {
            }
            if (!tok.empty()) break;
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

GrayRaster read_pgm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DecodeError("cannot open " + path.string());
    const std::string magic = pnm_token(in);
    if (magic != "P2" && magic != "P5") {
        throw DecodeError(path.string() + ": not a PGM file (magic '" + magic + "')");
    }
    long w = 0, h = 0, maxval = 0;
    try {
        w = std::stol(pnm_token(in));
        h = std::stol(pnm_token(in));
        maxval = std::stol(pnm_token(in));
    } catch (const std::exception&) {
        throw DecodeError(path.string() + ": malformed PGM header");
    }
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) {
        throw DecodeError(path.string() + ": invalid PGM header values");
    }
    GrayRaster out;
    out.width = static_cast<int>(w);
    out.height = static_cast<int>(h);
    out.maxval = static_cast<std::uint32_t>(maxval);
    out.samples.resize(static_cast<std::size_t>(w) * h);

    if (magic == "P2") {
        for (auto& s : out.samples) {
            const std::string tok = pnm_token(in);
            if (tok.empty()) throw DecodeError(path.string() + ": truncated PGM data");
            const long v = std::stol(tok);
            if (v < 0 || v > maxval) throw DecodeError(path.string() + ": sample out of range");
            s = static_cast<std::uint16_t>(v);
        }
    } else {
        const bool wide = maxval > 255;
        for (auto& s : out.samples) {
            int hi = in.get();
            if (hi == EOF) throw DecodeError(path.string() + ": truncated PGM data");
            if (wide) {
                const int lo = in.get();
                if (lo == EOF) throw DecodeError(path.string() + ": truncated PGM data");
                s = static_cast<std::uint16_t>((hi << 8) | lo);
            } else {
                s = static_cast<std::uint16_t>(hi);
            }
            if (s > maxval) throw DecodeError(path.string() + ": sample out of range");
        }
    }
    return out;
}

template <typename RowFill>
void write_png(const fs::path& path, int width, int height, int color_type, int bit_depth,
               const std::vector<std::pair<std::string, std::string>>& text, RowFill fill_row) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open " + path.string() + " for writing");

    std::string err;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn,
                                              png_warning_fn);
    if (!png) throw IoError("libpng init failed for " + path.string());
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed for " + path.string());
    }

    const int channels = (color_type == PNG_COLOR_TYPE_RGB) ? 3 : 1;
    const std::size_t rowbytes =
        static_cast<std::size_t>(width) * channels * (bit_depth == 16 ? 2 : 1);
    std::vector<png_byte> row(rowbytes);
    std::vector<png_text> chunks;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("cannot encode " + path.string() + ": " + err);
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
                 bit_depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_set_compression_level(png, 6);
    for (const auto& [key, value] : text) {
        png_text t{};
        t.compression = PNG_TEXT_COMPRESSION_NONE;
        t.key = const_cast<char*>(key.c_str());
        t.text = const_cast<char*>(value.c_str());
        chunks.push_back(t);
    }
    if (!chunks.empty()) png_set_text(png, info, chunks.data(), static_cast<int>(chunks.size()));
    png_write_info(png, info);
    for (int r = 0; r < height; ++r) {
        fill_row(r, row.data());
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

bool is_supported_image(const fs::path& path) {
    const std::string ext = lower_ext(path);
    return ext == ".png" || ext == ".pgm";
}

GrayRaster read_gray(const fs::path& path) {
    const std::string ext = lower_ext(path);
    if (ext == ".png") return read_png(path);
    if (ext == ".pgm") return read_pgm(path);
    throw DecodeError("unsupported image format: " + path.string());
}

Image to_image(const GrayRaster& raster) {
    std::vector<double> px(raster.samples.size());
    const double scale = static_cast<double>(raster.maxval);
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = raster.samples[i] / scale;
    return Image(raster.height, raster.width, std::move(px));
}

void write_png_gray16(const fs::path& path, const Image& img) {
    const auto px = img.pixels();
    const int w = img.width();
    write_png(path, w, img.height(), PNG_COLOR_TYPE_GRAY, 16, {},
              [&](int r, png_bytep row) {
                  for (int c = 0; c < w; ++c) {
                      const double v = std::clamp(px[img.index(r, c)], 0.0, 1.0);
                      const auto s = static_cast<std::uint16_t>(std::lround(v * 65535.0));
                      row[2 * c] = static_cast<png_byte>(s >> 8);
                      row[2 * c + 1] = static_cast<png_byte>(s & 0xFF);
                  }
              });
}

void write_png_mask(const fs::path& path, const Mask& mask) {
    const int w = mask.width();
    write_png(path, w, mask.height(), PNG_COLOR_TYPE_GRAY, 8, {},
              [&](int r, png_bytep row) {
                  for (int c = 0; c < w; ++c) row[c] = mask.at(r, c) ? 255 : 0;
              });
}

void write_png_rgb(const fs::path& path, const RgbRaster& raster,
                   const std::vector<std::pair<std::string, std::string>>& text) {
    const std::size_t rowbytes = static_cast<std::size_t>(raster.width) * 3;
    write_png(path, raster.width, raster.height, PNG_COLOR_TYPE_RGB, 8, text,
              [&](int r, png_bytep row) {
                  std::memcpy(row, raster.data.data() + r * rowbytes, rowbytes);
              });
}

}  // namespace sarbench::io
