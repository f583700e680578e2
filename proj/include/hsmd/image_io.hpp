// Copyright 2026 The HSMD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

#include "hsmd/frame.hpp"

namespace hsmd::io {

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    return FilePtr(std::fopen(path.string().c_str(), mode));
}

inline std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
    FilePtr f = open_file(path, "rb");
    if (!f)
        throw IoError("file not found: " + path.string());
    std::fseek(f.get(), 0, SEEK_END);
    const long len = std::ftell(f.get());
    std::fseek(f.get(), 0, SEEK_SET);
    std::vector<std::uint8_t> buf(len > 0 ? static_cast<std::size_t>(len) : 0);
    if (!buf.empty() && std::fread(buf.data(), 1, buf.size(), f.get()) != buf.size())
        throw IoError("decode failure: " + path.string());
    return buf;
}

// libjpeg error path: convert longjmp into an exception at the call site.
struct JpegErrorMgr {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
    auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
    std::longjmp(mgr->jump, 1);
}

inline RgbFrame decode_jpeg(const std::vector<std::uint8_t>& bytes, const std::string& name) {
    jpeg_decompress_struct cinfo;
    JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = jpeg_error_exit;

    std::vector<std::uint8_t> pixels;
    int width = 0, height = 0, channels = 0;

    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw IoError("decode failure: " + name);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    if (jpeg_read_header(&cinfo, TRUE) != JPEG_HEADER_OK) {
        jpeg_destroy_decompress(&cinfo);
        throw IoError("decode failure: " + name);
    }
    cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&cinfo);
    width = static_cast<int>(cinfo.output_width);
    height = static_cast<int>(cinfo.output_height);
    channels = cinfo.output_components;
    pixels.resize(static_cast<std::size_t>(width) * height * channels);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = pixels.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * channels;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);

    RgbFrame frame(width, height);
    if (channels == 3) {
        frame.data = std::move(pixels);
    } else {  // grayscale promoted by channel replication
        for (std::size_t i = 0; i < static_cast<std::size_t>(width) * height; ++i)
            frame.data[3 * i] = frame.data[3 * i + 1] = frame.data[3 * i + 2] = pixels[i];
    }
    return frame;
}

struct PngReadState {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t offset;
};

inline void png_read_from_memory(png_structp png, png_bytep out, png_size_t len) {
    auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (state->offset + len > state->size)
        png_error(png, "read past end");
    std::memcpy(out, state->data + state->offset, len);
    state->offset += len;
}

inline RgbFrame decode_png(const std::vector<std::uint8_t>& bytes, const std::string& name) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw IoError("decode failure: " + name);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("decode failure: " + name);
    }
    std::vector<std::uint8_t> pixels;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("decode failure: " + name);
    }
    PngReadState state{bytes.data(), bytes.size(), 0};
    png_set_read_fn(png, &state, png_read_from_memory);
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16)
        png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);  // channel replication
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    pixels.resize(static_cast<std::size_t>(width) * height * 3);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y)
        rows[y] = pixels.data() + static_cast<std::size_t>(y) * width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    RgbFrame frame(static_cast<int>(width), static_cast<int>(height));
    frame.data = std::move(pixels);
    return frame;
}

inline std::uint32_t read_le32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (p[1] << 8) | (p[2] << 16) |
           (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t read_le16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

// Uncompressed 8/24/32-bit BMP; enough for dataset ROI images.
inline RgbFrame decode_bmp(const std::vector<std::uint8_t>& b, const std::string& name) {
    if (b.size() < 54 || b[0] != 'B' || b[1] != 'M')
        throw IoError("decode failure: " + name);
    const std::uint32_t data_offset = read_le32(&b[10]);
    const std::int32_t width = static_cast<std::int32_t>(read_le32(&b[18]));
    const std::int32_t height_raw = static_cast<std::int32_t>(read_le32(&b[22]));
    const std::uint16_t bpp = read_le16(&b[28]);
    const std::uint32_t compression = read_le32(&b[30]);
    const bool top_down = height_raw < 0;
    const std::int32_t height = top_down ? -height_raw : height_raw;
    if (width <= 0 || height <= 0 || compression != 0 ||
        (bpp != 8 && bpp != 24 && bpp != 32))
        throw IoError("decode failure: " + name);

    const std::size_t row_stride = ((static_cast<std::size_t>(width) * bpp + 31) / 32) * 4;
    if (data_offset + row_stride * height > b.size())
        throw IoError("decode failure: " + name);

    // 8-bit BMPs carry a palette right after the 54-byte headers.
    const std::uint8_t* palette = bpp == 8 ? &b[54] : nullptr;

    RgbFrame frame(width, height);
    for (std::int32_t y = 0; y < height; ++y) {
        const std::int32_t src_y = top_down ? y : height - 1 - y;
        const std::uint8_t* row = &b[data_offset + row_stride * src_y];
        for (std::int32_t x = 0; x < width; ++x) {
            std::uint8_t* dst = frame.pixel(x, y);
            if (bpp == 8) {
                const std::uint8_t idx = row[x];
                dst[0] = palette[4 * idx + 2];
                dst[1] = palette[4 * idx + 1];
                dst[2] = palette[4 * idx + 0];
            } else {
                const std::uint8_t* px = row + x * (bpp / 8);
                dst[0] = px[2];
                dst[1] = px[1];
                dst[2] = px[0];
            }
        }
    }
    return frame;
}

}  // namespace detail

/// Decodes a JPEG/PNG/BMP file into an RGB frame. Grayscale sources are
/// promoted by channel replication. Throws IoError with the offending path.
inline RgbFrame load_frame(const std::filesystem::path& path) {
    const auto bytes = detail::read_all(path);
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), "\x89PNG\r\n\x1a\n", 8) == 0)
        return detail::decode_png(bytes, path.string());
    if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF)
        return detail::decode_jpeg(bytes, path.string());
    if (bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M')
        return detail::decode_bmp(bytes, path.string());
    throw IoError("decode failure: " + path.string());
}

inline GrayFrame load_gray(const std::filesystem::path& path) {
    return to_grayscale(load_frame(path));
}

/// Writes an 8-bit single-channel PNG. Lossless; decoding it yields the input.
inline void write_gray_png(const GrayFrame& gray, const std::filesystem::path& path) {
    detail::FilePtr f = detail::open_file(path, "wb");
    if (!f)
        throw IoError("cannot open for writing: " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw IoError("png write failure: " + path.string());
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png write failure: " + path.string());
    }
    std::vector<png_bytep> rows(gray.height());
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png write failure: " + path.string());
    }
    png_init_io(png, f.get());
    png_set_IHDR(png, info, gray.width(), gray.height(), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < gray.height(); ++y)
        rows[y] = const_cast<png_bytep>(gray.row(y));
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

/// Mask output: values must be exactly {0, 255}.
inline void write_mask(const MaskFrame& mask, const std::filesystem::path& path) {
    if (!is_binary_mask(mask))
        throw std::invalid_argument("write_mask: mask values must be 0 or 255");
    write_gray_png(mask, path);
}

inline void write_jpeg_gray(const GrayFrame& gray, const std::filesystem::path& path,
                            int quality = 95) {
    detail::FilePtr f = detail::open_file(path, "wb");
    if (!f)
        throw IoError("cannot open for writing: " + path.string());
    jpeg_compress_struct cinfo;
    detail::JpegErrorMgr err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = detail::jpeg_error_exit;
    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&cinfo);
        throw IoError("jpeg write failure: " + path.string());
    }
    jpeg_create_compress(&cinfo);
    jpeg_stdio_dest(&cinfo, f.get());
    cinfo.image_width = static_cast<JDIMENSION>(gray.width());
    cinfo.image_height = static_cast<JDIMENSION>(gray.height());
    cinfo.input_components = 1;
    cinfo.in_color_space = JCS_GRAYSCALE;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        JSAMPROW row = const_cast<JSAMPROW>(gray.row(static_cast<int>(cinfo.next_scanline)));
        jpeg_write_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);
}

}  // namespace hsmd::io
