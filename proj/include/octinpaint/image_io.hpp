#ifndef OCTINPAINT_IMAGE_IO_HPP
#define OCTINPAINT_IMAGE_IO_HPP

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <png.h>

#include "core.hpp"

namespace octinpaint {

enum class BitDepth { Eight = 8, Sixteen = 16 };

namespace detail {

inline std::vector<unsigned char> read_file(const std::filesystem::path& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw Error(Errc::IoFailure, "cannot open " + path.string());
	return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw Error(Errc::IoFailure, "cannot write " + path.string());
	out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
	if (!out)
		throw Error(Errc::IoFailure, "short write to " + path.string());
}

inline unsigned quantize(double v, unsigned maxval) {
	const double c = std::clamp(v, 0.0, 1.0) * maxval;
	return static_cast<unsigned>(std::lround(c));
}

// Header tokens of a binary graymap; '#' starts a comment that runs to end of line.
class PgmHeaderReader {
public:
	explicit PgmHeaderReader(const std::vector<unsigned char>& b) : b_(b) {}

	long next_int() {
		skip_space();
		if (pos_ >= b_.size() || !std::isdigit(b_[pos_]))
			throw Error(Errc::CorruptFile, "malformed graymap header");
		long v = 0;
		while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
			v = v * 10 + (b_[pos_++] - '0');
			if (v > 1'000'000'000)
				throw Error(Errc::CorruptFile, "graymap header value out of range");
		}
		return v;
	}
	std::size_t pos() const { return pos_; }
	void advance(std::size_t n) { pos_ += n; }

private:
	void skip_space() {
		while (pos_ < b_.size()) {
			if (b_[pos_] == '#') {
				while (pos_ < b_.size() && b_[pos_] != '\n')
					++pos_;
			} else if (std::isspace(b_[pos_])) {
				++pos_;
			} else {
				break;
			}
		}
	}

	const std::vector<unsigned char>& b_;
	std::size_t pos_ = 2;
};

inline Image decode_pgm(const std::vector<unsigned char>& b) {
	PgmHeaderReader h(b);
	const long w = h.next_int();
	const long ht = h.next_int();
	const long maxval = h.next_int();
	if (w <= 0 || ht <= 0 || maxval <= 0 || maxval > 65535)
		throw Error(Errc::CorruptFile, "invalid graymap dimensions or maxval");
	h.advance(1); // single whitespace before the raster
	const std::size_t bps = maxval < 256 ? 1 : 2;
	const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(ht);
	if (h.pos() + n * bps > b.size())
		throw Error(Errc::CorruptFile, "graymap raster truncated");
	std::vector<double> px(n);
	const unsigned char* p = b.data() + h.pos();
	for (std::size_t i = 0; i < n; ++i) {
		const unsigned code = bps == 1 ? p[i] : (unsigned(p[2 * i]) << 8) | p[2 * i + 1];
		px[i] = std::min(1.0, static_cast<double>(code) / static_cast<double>(maxval));
	}
	return Image(static_cast<int>(w), static_cast<int>(ht), std::move(px));
}

inline std::vector<unsigned char> encode_pgm(const Image& img, BitDepth depth) {
	const unsigned maxval = depth == BitDepth::Eight ? 255u : 65535u;
	std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n" +
	                     std::to_string(maxval) + "\n";
	std::vector<unsigned char> out(header.begin(), header.end());
	for (double v : img.pixels()) {
		const unsigned code = quantize(v, maxval);
		if (depth == BitDepth::Sixteen)
			out.push_back(static_cast<unsigned char>(code >> 8));
		out.push_back(static_cast<unsigned char>(code & 0xff));
	}
	return out;
}

struct PngReadBuffer {
	const std::vector<unsigned char>* bytes;
	std::size_t pos;
};

inline void png_read_from_buffer(png_structp png, png_bytep out, png_size_t n) {
	auto* buf = static_cast<PngReadBuffer*>(png_get_io_ptr(png));
	if (buf->pos + n > buf->bytes->size())
		png_error(png, "truncated");
	std::memcpy(out, buf->bytes->data() + buf->pos, n);
	buf->pos += n;
}

inline void png_write_to_buffer(png_structp png, png_bytep data, png_size_t n) {
	auto* out = static_cast<std::vector<unsigned char>*>(png_get_io_ptr(png));
	out->insert(out->end(), data, data + n);
}

inline void png_flush_noop(png_structp) {}

inline void png_error_throw(png_structp, png_const_charp msg) { throw Error(Errc::CorruptFile, msg); }
inline void png_warning_ignore(png_structp, png_const_charp) {}

class PngReadGuard {
public:
	PngReadGuard() {
		png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_throw, png_warning_ignore);
		if (png_)
			info_ = png_create_info_struct(png_);
		if (!png_ || !info_)
			throw Error(Errc::IoFailure, "libpng initialization failed");
	}
	~PngReadGuard() { png_destroy_read_struct(&png_, &info_, nullptr); }
	PngReadGuard(const PngReadGuard&) = delete;
	PngReadGuard& operator=(const PngReadGuard&) = delete;
	png_structp png() const { return png_; }
	png_infop info() const { return info_; }

private:
	png_structp png_ = nullptr;
	png_infop info_ = nullptr;
};

class PngWriteGuard {
public:
	PngWriteGuard() {
		png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_throw, png_warning_ignore);
		if (png_)
			info_ = png_create_info_struct(png_);
		if (!png_ || !info_)
			throw Error(Errc::IoFailure, "libpng initialization failed");
	}
	~PngWriteGuard() { png_destroy_write_struct(&png_, &info_); }
	PngWriteGuard(const PngWriteGuard&) = delete;
	PngWriteGuard& operator=(const PngWriteGuard&) = delete;
	png_structp png() const { return png_; }
	png_infop info() const { return info_; }

private:
	png_structp png_ = nullptr;
	png_infop info_ = nullptr;
};

inline Image decode_png(const std::vector<unsigned char>& bytes) {
	PngReadGuard g;
	PngReadBuffer buf{&bytes, 0};
	png_set_read_fn(g.png(), &buf, png_read_from_buffer);
	png_read_info(g.png(), g.info());
	const png_uint_32 w = png_get_image_width(g.png(), g.info());
	const png_uint_32 h = png_get_image_height(g.png(), g.info());
	const int color = png_get_color_type(g.png(), g.info());
	const int depth = png_get_bit_depth(g.png(), g.info());
	if (color != PNG_COLOR_TYPE_GRAY)
		throw Error(Errc::UnsupportedFormat, "only grayscale PNG is supported");
	if (depth < 8)
		png_set_expand_gray_1_2_4_to_8(g.png());
	if (depth == 16)
		png_set_swap(g.png()); // host order below assumes little-endian samples
	png_read_update_info(g.png(), g.info());
	const std::size_t rowbytes = png_get_rowbytes(g.png(), g.info());
	std::vector<unsigned char> raster(rowbytes * h);
	std::vector<png_bytep> rows(h);
	for (png_uint_32 y = 0; y < h; ++y)
		rows[y] = raster.data() + y * rowbytes;
	png_read_image(g.png(), rows.data());

	const double maxval = depth == 16 ? 65535.0 : 255.0;
	std::vector<double> px(static_cast<std::size_t>(w) * h);
	for (png_uint_32 y = 0; y < h; ++y) {
		for (png_uint_32 x = 0; x < w; ++x) {
			unsigned code;
			if (depth == 16)
				code = rows[y][2 * x] | (unsigned(rows[y][2 * x + 1]) << 8);
			else
				code = rows[y][x];
			px[static_cast<std::size_t>(y) * w + x] = code / maxval;
		}
	}
	return Image(static_cast<int>(w), static_cast<int>(h), std::move(px));
}

inline std::vector<unsigned char> encode_png(const Image& img, BitDepth depth) {
	std::vector<unsigned char> out;
	PngWriteGuard g;
	png_set_write_fn(g.png(), &out, png_write_to_buffer, png_flush_noop);
	const int bits = depth == BitDepth::Eight ? 8 : 16;
	png_set_IHDR(g.png(), g.info(), static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()),
	             bits, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
	             PNG_FILTER_TYPE_DEFAULT);
	png_write_info(g.png(), g.info());
	const unsigned maxval = bits == 8 ? 255u : 65535u;
	const std::size_t bpp = bits / 8;
	std::vector<unsigned char> row(static_cast<std::size_t>(img.width()) * bpp);
	for (int y = 0; y < img.height(); ++y) {
		for (int x = 0; x < img.width(); ++x) {
			const unsigned code = quantize(img.at(x, y), maxval);
			if (bits == 16) {
				row[2 * x] = static_cast<unsigned char>(code >> 8); // PNG samples are big-endian
				row[2 * x + 1] = static_cast<unsigned char>(code & 0xff);
			} else {
				row[x] = static_cast<unsigned char>(code);
			}
		}
		png_write_row(g.png(), row.data());
	}
	png_write_end(g.png(), nullptr);
	return out;
}

inline bool has_png_extension(const std::filesystem::path& p) {
	auto ext = p.extension().string();
	for (auto& ch : ext)
		ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
	return ext == ".png";
}

} // namespace detail

/// Loads an 8/16-bit binary graymap (P5) or grayscale PNG; the format is
/// sniffed from the file's magic bytes.
inline Image load_image(const std::filesystem::path& path) {
	const auto bytes = detail::read_file(path);
	static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
	if (bytes.size() >= 8 && std::memcmp(bytes.data(), png_sig, 8) == 0)
		return detail::decode_png(bytes);
	if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5')
		return detail::decode_pgm(bytes);
	throw Error(Errc::UnsupportedFormat, path.string() + " is neither a binary graymap nor a PNG");
}

/// Writes PNG when the extension is .png, a binary graymap otherwise.
inline void save_image(const Image& img, const std::filesystem::path& path, BitDepth depth = BitDepth::Sixteen) {
	detail::write_file(path, detail::has_png_extension(path) ? detail::encode_png(img, depth)
	                                                         : detail::encode_pgm(img, depth));
}

/// Masks are stored as images: 0 = shadowed, full scale = reliable.
inline ShadowMask load_mask(const std::filesystem::path& path) {
	const Image img = load_image(path);
	ShadowMask m(img.width(), img.height());
	for (int y = 0; y < img.height(); ++y)
		for (int x = 0; x < img.width(); ++x)
			m.set(x, y, img.at(x, y) >= 0.5);
	return m;
}

inline void save_mask(const ShadowMask& mask, const std::filesystem::path& path) {
	Image img(mask.width(), mask.height());
	for (int y = 0; y < mask.height(); ++y)
		for (int x = 0; x < mask.width(); ++x)
			img.at(x, y) = mask.reliable(x, y) ? 1.0 : 0.0;
	save_image(img, path, BitDepth::Eight);
}

} // namespace octinpaint

#endif // OCTINPAINT_IMAGE_IO_HPP
