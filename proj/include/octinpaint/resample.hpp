#ifndef OCTINPAINT_RESAMPLE_HPP
#define OCTINPAINT_RESAMPLE_HPP

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "core.hpp"
#include "image_io.hpp"

namespace octinpaint::pipeline {

/// N x N box average. Output is ceil(w/N) x ceil(h/N); edge blocks average
/// over the pixels they actually cover.
inline Image downsample(const Image& img, int n) {
	if (n < 1)
		throw Error(Errc::ConfigError, "downsample factor must be >= 1");
	if (n == 1)
		return img;
	const int ow = (img.width() + n - 1) / n;
	const int oh = (img.height() + n - 1) / n;
	Image out(ow, oh);
	for (int by = 0; by < oh; ++by) {
		for (int bx = 0; bx < ow; ++bx) {
			double s = 0;
			int cnt = 0;
			for (int y = by * n; y < std::min((by + 1) * n, img.height()); ++y)
				for (int x = bx * n; x < std::min((bx + 1) * n, img.width()); ++x) {
					s += img.at(x, y);
					++cnt;
				}
			out.at(bx, by) = s / cnt;
		}
	}
	return out;
}

/// A low-scale pixel is shadowed when any of its source pixels is.
inline ShadowMask downsample_mask(const ShadowMask& mask, int n) {
	if (n < 1)
		throw Error(Errc::ConfigError, "downsample factor must be >= 1");
	if (n == 1)
		return mask;
	const int ow = (mask.width() + n - 1) / n;
	const int oh = (mask.height() + n - 1) / n;
	ShadowMask out(ow, oh);
	for (int by = 0; by < oh; ++by)
		for (int bx = 0; bx < ow; ++bx) {
			bool rel = true;
			for (int y = by * n; rel && y < std::min((by + 1) * n, mask.height()); ++y)
				for (int x = bx * n; rel && x < std::min((bx + 1) * n, mask.width()); ++x)
					rel = mask.reliable(x, y);
			out.set(bx, by, rel);
		}
	return out;
}

namespace detail {

// Catmull-Rom (Keys, a = -0.5) weights for taps at offsets -1, 0, 1, 2.
inline std::array<double, 4> cubic_weights(double t) {
	constexpr double a = -0.5;
	auto k = [](double x) {
		x = std::abs(x);
		if (x < 1.0)
			return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
		if (x < 2.0)
			return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
		return 0.0;
	};
	return {k(t + 1.0), k(t), k(1.0 - t), k(2.0 - t)};
}

// Upsamples one axis. Output sample i sits at source coordinate
// (i + 0.5)/n - 0.5, matching the block centres of `downsample`.
inline Image upsample_axis(const Image& img, int n, bool horizontal) {
	const int ow = horizontal ? img.width() * n : img.width();
	const int oh = horizontal ? img.height() : img.height() * n;
	const int src_len = horizontal ? img.width() : img.height();
	Image out(ow, oh);
	const int out_len = horizontal ? ow : oh;
	for (int i = 0; i < out_len; ++i) {
		const double u = (i + 0.5) / n - 0.5;
		const int base = static_cast<int>(std::floor(u));
		const auto w = cubic_weights(u - base);
		std::array<int, 4> idx;
		for (int t = 0; t < 4; ++t)
			idx[t] = std::clamp(base - 1 + t, 0, src_len - 1);
		const int other = horizontal ? oh : ow;
		for (int j = 0; j < other; ++j) {
			double s = 0;
			for (int t = 0; t < 4; ++t)
				s += w[t] * (horizontal ? img.at(idx[t], j) : img.at(j, idx[t]));
			if (horizontal)
				out.at(i, j) = s;
			else
				out.at(j, i) = s;
		}
	}
	return out;
}

} // namespace detail

/// Separable bicubic (Catmull-Rom) upsampling by N with edge clamping.
inline Image upsample_bicubic(const Image& img, int n) {
	if (n < 1)
		throw Error(Errc::ConfigError, "upsample factor must be >= 1");
	if (n == 1 || img.empty())
		return img;
	return detail::upsample_axis(detail::upsample_axis(img, n, true), n, false);
}

/// Runs `<cmd> --scale N --in <tmp-in.pgm> --out <tmp-out.pgm>` and reads the
/// result, which must be exactly N times the input size.
inline Image upsample_external(const Image& img, int n, const std::string& cmd) {
	if (cmd.empty())
		throw Error(Errc::UpsamplerFailed, "no upsampler command configured");
	namespace fs = std::filesystem;
	std::random_device rd;
	const fs::path dir = fs::temp_directory_path() / ("octinpaint-up-" + std::to_string(rd()) + std::to_string(rd()));
	fs::create_directories(dir);
	struct Cleanup {
		fs::path p;
		~Cleanup() {
			std::error_code ec;
			fs::remove_all(p, ec);
		}
	} cleanup{dir};
	const fs::path in = dir / "in.pgm";
	const fs::path out = dir / "out.pgm";
	save_image(img, in, BitDepth::Sixteen);
	const std::string line = cmd + " --scale " + std::to_string(n) + " --in '" + in.string() + "' --out '" +
	                         out.string() + "'";
	const int rc = std::system(line.c_str());
	if (rc != 0)
		throw Error(Errc::UpsamplerFailed, "upsampler exited with status " + std::to_string(rc));
	Image result;
	try {
		result = load_image(out);
	} catch (const Error& e) {
		throw Error(Errc::UpsamplerFailed, std::string("unreadable upsampler output: ") + e.what());
	}
	if (result.width() != img.width() * n || result.height() != img.height() * n)
		throw Error(Errc::UpsamplerFailed, "upsampler produced " + std::to_string(result.width()) + "x" +
		                                       std::to_string(result.height()) + ", expected " +
		                                       std::to_string(img.width() * n) + "x" +
		                                       std::to_string(img.height() * n));
	return result;
}

} // namespace octinpaint::pipeline

#endif // OCTINPAINT_RESAMPLE_HPP
