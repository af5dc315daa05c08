#ifndef OCTINPAINT_CORE_HPP
#define OCTINPAINT_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace octinpaint {

/// Grayscale raster, row-major, one double per pixel. Values are normalized
/// to [0,1] on I/O; intermediate results may leave that range.
class Image {
public:
	Image() = default;
	Image(int width, int height, double fill = 0.0)
	    : width_(width), height_(height), data_(checked_size(width, height), fill) {}
	Image(int width, int height, std::vector<double> data)
	    : width_(width), height_(height), data_(std::move(data)) {
		if (data_.size() != checked_size(width, height))
			throw Error(Errc::DimensionMismatch, "image data length does not match width*height");
	}

	int width() const noexcept { return width_; }
	int height() const noexcept { return height_; }
	bool empty() const noexcept { return data_.empty(); }
	std::size_t size() const noexcept { return data_.size(); }

	double& at(int x, int y) { return data_[index(x, y)]; }
	double at(int x, int y) const { return data_[index(x, y)]; }

	std::span<double> pixels() noexcept { return data_; }
	std::span<const double> pixels() const noexcept { return data_; }
	const std::vector<double>& data() const noexcept { return data_; }

	bool same_shape(const Image& o) const noexcept { return width_ == o.width_ && height_ == o.height_; }

	friend bool operator==(const Image&, const Image&) = default;

private:
	static std::size_t checked_size(int w, int h) {
		if (w < 0 || h < 0)
			throw Error(Errc::DimensionMismatch, "negative image dimensions");
		return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
	}
	std::size_t index(int x, int y) const noexcept {
		return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
	}

	int width_ = 0;
	int height_ = 0;
	std::vector<double> data_;
};

/// Per-pixel reliability map: 1 = reliable, 0 = shadowed.
class ShadowMask {
public:
	ShadowMask() = default;
	ShadowMask(int width, int height, bool reliable = true)
	    : width_(width), height_(height),
	      bits_(static_cast<std::size_t>(std::max(width, 0)) * static_cast<std::size_t>(std::max(height, 0)),
	            reliable ? 1 : 0) {}

	static ShadowMask all_reliable(int width, int height) { return ShadowMask(width, height, true); }

	int width() const noexcept { return width_; }
	int height() const noexcept { return height_; }

	bool reliable(int x, int y) const { return bits_[index(x, y)] != 0; }
	bool shadowed(int x, int y) const { return bits_[index(x, y)] == 0; }
	void set(int x, int y, bool reliable) { bits_[index(x, y)] = reliable ? 1 : 0; }

	/// Marks an entire column.
	void set_column(int x, bool reliable) {
		for (int y = 0; y < height_; ++y)
			set(x, y, reliable);
	}

	bool all_reliable() const noexcept {
		return std::all_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
	}
	std::size_t shadowed_count() const noexcept {
		return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{0}));
	}

	bool matches(const Image& img) const noexcept { return width_ == img.width() && height_ == img.height(); }

	friend bool operator==(const ShadowMask&, const ShadowMask&) = default;

private:
	std::size_t index(int x, int y) const noexcept {
		return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
	}

	int width_ = 0;
	int height_ = 0;
	std::vector<std::uint8_t> bits_;
};

struct Point {
	int x = 0;
	int y = 0;
	friend bool operator==(const Point&, const Point&) = default;
};

struct Rect {
	int x = 0;
	int y = 0;
	int width = 0;
	int height = 0;

	static Rect of(const Image& img) { return {0, 0, img.width(), img.height()}; }
	bool within(int w, int h) const noexcept {
		return x >= 0 && y >= 0 && width >= 0 && height >= 0 && x + width <= w && y + height <= h;
	}
	friend bool operator==(const Rect&, const Rect&) = default;
};

/// Crops a rectangle out of an image.
inline Image crop(const Image& img, const Rect& r) {
	if (!r.within(img.width(), img.height()))
		throw Error(Errc::DimensionMismatch, "crop rectangle outside image");
	Image out(r.width, r.height);
	for (int y = 0; y < r.height; ++y)
		for (int x = 0; x < r.width; ++x)
			out.at(x, y) = img.at(r.x + x, r.y + y);
	return out;
}

inline ShadowMask crop(const ShadowMask& mask, const Rect& r) {
	if (!r.within(mask.width(), mask.height()))
		throw Error(Errc::DimensionMismatch, "crop rectangle outside mask");
	ShadowMask out(r.width, r.height);
	for (int y = 0; y < r.height; ++y)
		for (int x = 0; x < r.width; ++x)
			out.set(x, y, mask.reliable(r.x + x, r.y + y));
	return out;
}

/// Writes `src` into `dst` with its top-left corner at (x0, y0).
inline void paste(Image& dst, const Image& src, int x0, int y0) {
	if (!Rect{x0, y0, src.width(), src.height()}.within(dst.width(), dst.height()))
		throw Error(Errc::DimensionMismatch, "paste target outside image");
	for (int y = 0; y < src.height(); ++y)
		for (int x = 0; x < src.width(); ++x)
			dst.at(x0 + x, y0 + y) = src.at(x, y);
}

/// Overlapping patch layout over a region. Positions are relative to the
/// region's top-left corner. The last patch on each axis is snapped flush
/// to the region boundary instead of padding.
struct PatchGrid {
	int patch_w = 8;
	int patch_h = 8;
	int stride_x = 1;
	int stride_y = 1;
	int region_w = 0;
	int region_h = 0;
	std::vector<Point> positions;

	static PatchGrid make(int region_w, int region_h, int patch_w = 8, int patch_h = 8, int stride_x = 1,
	                      int stride_y = 1) {
		if (patch_w < 1 || patch_h < 1 || stride_x < 1 || stride_y < 1)
			throw Error(Errc::RegionTooSmall, "patch and stride dimensions must be positive");
		if (region_w < patch_w || region_h < patch_h)
			throw Error(Errc::RegionTooSmall, "region " + std::to_string(region_w) + "x" +
			                                      std::to_string(region_h) + " smaller than patch " +
			                                      std::to_string(patch_w) + "x" + std::to_string(patch_h));
		PatchGrid g;
		g.patch_w = patch_w;
		g.patch_h = patch_h;
		g.stride_x = stride_x;
		g.stride_y = stride_y;
		g.region_w = region_w;
		g.region_h = region_h;
		const auto xs = axis_starts(region_w, patch_w, stride_x);
		const auto ys = axis_starts(region_h, patch_h, stride_y);
		g.positions.reserve(xs.size() * ys.size());
		for (int y : ys)
			for (int x : xs)
				g.positions.push_back({x, y});
		return g;
	}

	int patch_len() const noexcept { return patch_w * patch_h; }

	/// Vector index of pixel (row r, column c) within a patch.
	int vector_index(int r, int c) const noexcept { return r * patch_w + c; }

private:
	static std::vector<int> axis_starts(int extent, int patch, int stride) {
		std::vector<int> s;
		for (int p = 0; p + patch <= extent; p += stride)
			s.push_back(p);
		if (s.back() + patch < extent)
			s.push_back(extent - patch);
		return s;
	}
};

struct Patch {
	Point pos; // relative to the region
	Eigen::VectorXd values;
};

/// Copies one patch out of `img` (absolute coordinates of the top-left corner).
inline Eigen::VectorXd read_patch(const Image& img, int x0, int y0, int patch_w, int patch_h) {
	Eigen::VectorXd v(patch_w * patch_h);
	for (int r = 0; r < patch_h; ++r)
		for (int c = 0; c < patch_w; ++c)
			v[r * patch_w + c] = img.at(x0 + c, y0 + r);
	return v;
}

/// Reliability of each patch entry, 1 = keep.
inline Eigen::VectorXd read_keep(const ShadowMask& mask, int x0, int y0, int patch_w, int patch_h) {
	Eigen::VectorXd v(patch_w * patch_h);
	for (int r = 0; r < patch_h; ++r)
		for (int c = 0; c < patch_w; ++c)
			v[r * patch_w + c] = mask.reliable(x0 + c, y0 + r) ? 1.0 : 0.0;
	return v;
}

inline std::vector<Patch> extract_patches(const Image& img, const Rect& region, const PatchGrid& grid) {
	if (!region.within(img.width(), img.height()))
		throw Error(Errc::DimensionMismatch, "patch region outside image bounds");
	if (region.width < grid.patch_w || region.height < grid.patch_h)
		throw Error(Errc::RegionTooSmall, "region smaller than one patch");
	if (grid.region_w != region.width || grid.region_h != region.height)
		throw Error(Errc::DimensionMismatch, "patch grid was built for a different region size");
	std::vector<Patch> out;
	out.reserve(grid.positions.size());
	for (const Point& p : grid.positions)
		out.push_back({p, read_patch(img, region.x + p.x, region.y + p.y, grid.patch_w, grid.patch_h)});
	return out;
}

/// Accumulates overlapping patches into a per-pixel running mean. Adding the
/// same value repeatedly leaves the mean bit-identical to that value.
class PatchAccumulator {
public:
	PatchAccumulator(int width, int height, int patch_w, int patch_h)
	    : mean_(width, height), count_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0),
	      patch_w_(patch_w), patch_h_(patch_h) {}

	void add(Point pos, const Eigen::VectorXd& values) {
		if (pos.x < 0 || pos.y < 0 || pos.x + patch_w_ > mean_.width() || pos.y + patch_h_ > mean_.height())
			throw Error(Errc::DimensionMismatch, "patch lies outside aggregation shape");
		if (values.size() != patch_w_ * patch_h_)
			throw Error(Errc::DimensionMismatch, "patch vector has wrong length");
		for (int r = 0; r < patch_h_; ++r) {
			for (int c = 0; c < patch_w_; ++c) {
				const int x = pos.x + c;
				const int y = pos.y + r;
				auto& n = count_[static_cast<std::size_t>(y) * static_cast<std::size_t>(mean_.width()) +
				                 static_cast<std::size_t>(x)];
				++n;
				double& m = mean_.at(x, y);
				m += (values[r * patch_w_ + c] - m) / static_cast<double>(n);
			}
		}
	}

	Image finish() && {
		for (std::size_t i = 0; i < count_.size(); ++i)
			if (count_[i] == 0)
				throw Error(Errc::CoverageGap, "pixel " + std::to_string(i % mean_.width()) + "," +
				                                   std::to_string(i / mean_.width()) + " not covered by any patch");
		return std::move(mean_);
	}

private:
	Image mean_;
	std::vector<std::uint32_t> count_;
	int patch_w_;
	int patch_h_;
};

inline Image aggregate_patches(std::span<const Patch> patches, int width, int height, int patch_w = 8,
                               int patch_h = 8) {
	PatchAccumulator acc(width, height, patch_w, patch_h);
	for (const Patch& p : patches)
		acc.add(p.pos, p.values);
	return std::move(acc).finish();
}

inline Image clamp01(Image img) {
	for (double& v : img.pixels())
		v = std::clamp(v, 0.0, 1.0);
	return img;
}

} // namespace octinpaint

#endif // OCTINPAINT_CORE_HPP
