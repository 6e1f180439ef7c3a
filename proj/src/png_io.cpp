#include "lfc/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

#include "lfc/errors.hpp"

namespace lfc {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_fail(png_structp, png_const_charp msg) {
    throw IoError(std::string("png: ") + (msg ? msg : "unknown error"));
}

void png_warn(png_structp, png_const_charp) {}

}  // namespace

GrayPng read_gray_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open '" + path + "'");

    unsigned char sig[8];
    if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8))
        throw IoError("'" + path + "' is not a PNG file");

    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
    if (!png) throw IoError("png reader allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png reader allocation failed");
    }

    GrayPng out;
    try {
        png_init_io(png, fp.get());
        png_set_sig_bytes(png, 8);
        png_read_info(png, info);

        png_uint_32 w = png_get_image_width(png, info);
        png_uint_32 h = png_get_image_height(png, info);
        int depth = png_get_bit_depth(png, info);
        int color = png_get_color_type(png, info);

        if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
        if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
        if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
            color == PNG_COLOR_TYPE_PALETTE)
            png_set_rgb_to_gray_fixed(png, 1, -1, -1);
        if (depth == 16) png_set_swap(png);
        png_read_update_info(png, info);

        depth = png_get_bit_depth(png, info);
        out.width = static_cast<int>(w);
        out.height = static_cast<int>(h);
        out.bit_depth = depth;
        out.pixels.resize(size_t(w) * h);

        std::vector<png_bytep> rows(h);
        std::vector<unsigned char> buf;
        if (depth == 16) {
            for (png_uint_32 r = 0; r < h; ++r)
                rows[r] = reinterpret_cast<png_bytep>(&out.pixels[size_t(r) * w]);
        } else {
            buf.resize(size_t(w) * h);
            for (png_uint_32 r = 0; r < h; ++r) rows[r] = &buf[size_t(r) * w];
        }
        png_read_image(png, rows.data());
        png_read_end(png, info);

        if (depth != 16)
            for (size_t i = 0; i < buf.size(); ++i) out.pixels[i] = buf[i];

        png_textp text = nullptr;
        int ntext = 0;
        if (png_get_text(png, info, &text, &ntext) > 0)
            for (int i = 0; i < ntext; ++i)
                if (text[i].key && text[i].text) out.text[text[i].key] = text[i].text;
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

void write_gray_png(const std::string& path, int width, int height, int bit_depth,
                    const std::vector<uint16_t>& pixels,
                    const std::map<std::string, std::string>& text) {
    if (width < 1 || height < 1) throw UsageError("png dimensions must be positive");
    if (bit_depth != 8 && bit_depth != 16) throw UsageError("png bit depth must be 8 or 16");
    if (pixels.size() != size_t(width) * height)
        throw UsageError("png pixel buffer size does not match dimensions");

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open '" + path + "' for writing");

    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
    if (!png) throw IoError("png writer allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png writer allocation failed");
    }

    try {
        png_init_io(png, fp.get());
        png_set_IHDR(png, info, width, height, bit_depth, PNG_COLOR_TYPE_GRAY,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                     PNG_FILTER_TYPE_DEFAULT);

        std::vector<png_text> chunks;
        std::vector<std::string> keys, vals;
        keys.reserve(text.size());
        vals.reserve(text.size());
        for (const auto& [k, v] : text) {
            keys.push_back(k);
            vals.push_back(v);
            png_text t{};
            t.compression = PNG_TEXT_COMPRESSION_NONE;
            t.key = const_cast<char*>(keys.back().c_str());
            t.text = const_cast<char*>(vals.back().c_str());
            t.text_length = vals.back().size();
            chunks.push_back(t);
        }
        if (!chunks.empty())
            png_set_text(png, info, chunks.data(), static_cast<int>(chunks.size()));

        png_write_info(png, info);
        if (bit_depth == 16) png_set_swap(png);

        std::vector<unsigned char> buf;
        std::vector<png_bytep> rows(height);
        if (bit_depth == 16) {
            for (int r = 0; r < height; ++r)
                rows[r] = reinterpret_cast<png_bytep>(
                    const_cast<uint16_t*>(&pixels[size_t(r) * width]));
        } else {
            buf.resize(size_t(width) * height);
            for (size_t i = 0; i < buf.size(); ++i) {
                if (pixels[i] > 255) throw UsageError("pixel value exceeds 8-bit range");
                buf[i] = static_cast<unsigned char>(pixels[i]);
            }
            for (int r = 0; r < height; ++r) rows[r] = &buf[size_t(r) * width];
        }
        png_write_image(png, rows.data());
        png_write_end(png, info);
    } catch (...) {
        png_destroy_write_struct(&png, &info);
        throw;
    }
    png_destroy_write_struct(&png, &info);
    if (std::fflush(fp.get()) != 0) throw IoError("png write to '" + path + "' failed");
}

}  // namespace lfc
