#ifndef OCTINPAINT_PREPROC_HPP
#define OCTINPAINT_PREPROC_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "core.hpp"

namespace octinpaint::preproc {

/// Per-column Bruch's membrane depth: raw argmax, smoothed fit, and the
/// robust weight each column received in the final fitting pass.
struct BmProfile {
	std::vector<int> depths;
	std::vector<bool> degenerate;
	std::vector<double> fitted;
	std::vector<double> robust_weights;

	int width() const noexcept { return static_cast<int>(depths.size()); }
};

struct FlattenRecord {
	std::vector<int> shifts;
	int target_depth = 0;
};

struct Interval {
	int start = 0;
	int width = 0;

	int end() const noexcept { return start + width; } // exclusive
	friend bool operator==(const Interval&, const Interval&) = default;
};

struct LoessParams {
	double span = 0.15;
	int robust_iters = 2;
	// Lower bound on the bisquare scale, in pixels. Depths are integer rows, so
	// a residual spread below one pixel carries no information.
	double min_scale = 3.0;
};

struct ShadowParams {
	double w_min = 0.2;
	double intensity_factor = 0.7;
	int tissue_half_height = 100;
	int median_window = 51;
	int dilation = 2;
	int margin = 2;
};

/// Row of the brightest pixel in each column; ties go to the smallest row.
/// Columns whose maximum does not exceed `darkness_floor` are flagged and get
/// a depth interpolated from the nearest valid neighbours.
inline BmProfile detect_bm(const Image& img, double darkness_floor = 1.0 / 255.0) {
	if (img.empty())
		throw Error(Errc::InsufficientData, "empty image");
	const int w = img.width();
	BmProfile p;
	p.depths.assign(w, 0);
	p.degenerate.assign(w, false);
	for (int x = 0; x < w; ++x) {
		int best = 0;
		double best_v = img.at(x, 0);
		for (int y = 1; y < img.height(); ++y) {
			if (img.at(x, y) > best_v) {
				best_v = img.at(x, y);
				best = y;
			}
		}
		p.depths[x] = best;
		p.degenerate[x] = best_v <= darkness_floor;
	}

	std::vector<int> valid;
	for (int x = 0; x < w; ++x)
		if (!p.degenerate[x])
			valid.push_back(x);
	if (valid.empty())
		return p;
	for (int x = 0; x < w; ++x) {
		if (!p.degenerate[x])
			continue;
		auto hi = std::lower_bound(valid.begin(), valid.end(), x);
		if (hi == valid.begin()) {
			p.depths[x] = p.depths[*hi];
		} else if (hi == valid.end()) {
			p.depths[x] = p.depths[valid.back()];
		} else {
			const int x1 = *hi;
			const int x0 = *(hi - 1);
			const double t = double(x - x0) / double(x1 - x0);
			p.depths[x] = static_cast<int>(std::lround((1 - t) * p.depths[x0] + t * p.depths[x1]));
		}
	}
	return p;
}

namespace detail {

inline double tricube(double u) {
	u = std::abs(u);
	if (u >= 1.0)
		return 0.0;
	const double t = 1.0 - u * u * u;
	return t * t * t;
}

inline double bisquare(double u) {
	u = std::abs(u);
	if (u >= 1.0)
		return 0.0;
	const double t = 1.0 - u * u;
	return t * t;
}

inline double median(std::vector<double> v) {
	const std::size_t n = v.size();
	std::nth_element(v.begin(), v.begin() + n / 2, v.end());
	const double hi = v[n / 2];
	if (n % 2)
		return hi;
	return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + n / 2));
}

// Weighted local-linear fit at `x0` from the points in xs/ys with the given
// per-point robustness weights. The window holds the q nearest points and
// the bandwidth reaches one column past the farthest of them.
inline double local_linear(const std::vector<double>& xs, const std::vector<double>& ys,
                           const std::vector<double>& rw, double x0, int q) {
	const int n = static_cast<int>(xs.size());
	// xs is sorted; grow a window of q nearest points around x0.
	int lo = static_cast<int>(std::lower_bound(xs.begin(), xs.end(), x0) - xs.begin());
	int hi = lo; // [lo, hi)
	while (hi - lo < q) {
		if (lo == 0)
			++hi;
		else if (hi == n)
			--lo;
		else if (x0 - xs[lo - 1] <= xs[hi] - x0)
			--lo;
		else
			++hi;
	}
	const double h = std::max(x0 - xs[lo], xs[hi - 1] - x0) + 1.0;

	double sw = 0, sx = 0, sy = 0;
	for (int j = lo; j < hi; ++j) {
		const double wj = tricube((xs[j] - x0) / h) * rw[j];
		sw += wj;
		sx += wj * xs[j];
		sy += wj * ys[j];
	}
	if (sw <= 0)
		return ys[std::min(std::max(lo, 0), n - 1)];
	const double mx = sx / sw;
	const double my = sy / sw;
	double sxx = 0, sxy = 0;
	for (int j = lo; j < hi; ++j) {
		const double wj = tricube((xs[j] - x0) / h) * rw[j];
		sxx += wj * (xs[j] - mx) * (xs[j] - mx);
		sxy += wj * (xs[j] - mx) * (ys[j] - my);
	}
	if (sxx <= 1e-12 * sw)
		return my;
	return my + (sxy / sxx) * (x0 - mx);
}

struct LoessResult {
	std::vector<double> fitted;  // evaluated at columns 0..width-1
	std::vector<double> weights; // one per input point
};

inline LoessResult robust_loess(const std::vector<double>& xs, const std::vector<double>& ys, int width,
                                const LoessParams& params) {
	if (!(params.span > 0.0 && params.span <= 1.0))
		throw Error(Errc::InsufficientData, "LOESS span must lie in (0,1]");
	const int n = static_cast<int>(xs.size());
	if (n < 3)
		throw Error(Errc::InsufficientData, "LOESS needs at least 3 non-degenerate columns");
	const int q = std::clamp(static_cast<int>(std::ceil(params.span * width)), 3, n);

	std::vector<double> rw(n, 1.0);
	std::vector<double> fit(n);
	for (int pass = 0; pass <= params.robust_iters; ++pass) {
		if (pass > 0) {
			std::vector<double> absres(n);
			for (int j = 0; j < n; ++j)
				absres[j] = std::abs(ys[j] - fit[j]);
			const double scale = std::max(6.0 * median(absres), params.min_scale);
			for (int j = 0; j < n; ++j)
				rw[j] = bisquare(absres[j] / scale);
		}
		for (int j = 0; j < n; ++j)
			fit[j] = local_linear(xs, ys, rw, xs[j], q);
	}
	LoessResult r;
	r.fitted.resize(width);
	for (int x = 0; x < width; ++x)
		r.fitted[x] = local_linear(xs, ys, rw, x, q);
	r.weights = std::move(rw);
	return r;
}

} // namespace detail

/// Robust LOESS of the membrane depths: local linear regression with tricube
/// weights, then `robust_iters` bisquare reweighting passes. Degenerate
/// columns are excluded from the fit and receive robust weight 0.
inline BmProfile loess_fit(BmProfile profile, const LoessParams& params = {}) {
	const int w = profile.width();
	if (profile.degenerate.size() != profile.depths.size())
		profile.degenerate.assign(w, false);
	std::vector<double> xs, ys;
	std::vector<int> cols;
	for (int x = 0; x < w; ++x) {
		if (profile.degenerate[x])
			continue;
		xs.push_back(x);
		ys.push_back(profile.depths[x]);
		cols.push_back(x);
	}
	auto r = detail::robust_loess(xs, ys, w, params);
	profile.fitted = std::move(r.fitted);
	profile.robust_weights.assign(w, 0.0);
	for (std::size_t j = 0; j < cols.size(); ++j)
		profile.robust_weights[cols[j]] = r.weights[j];
	return profile;
}

/// Fits real-valued depths directly (every column valid).
inline BmProfile loess_fit(const std::vector<double>& depths, const LoessParams& params = {}) {
	const int w = static_cast<int>(depths.size());
	std::vector<double> xs(w);
	std::iota(xs.begin(), xs.end(), 0.0);
	auto r = detail::robust_loess(xs, depths, w, params);
	BmProfile p;
	p.depths.resize(w);
	std::transform(depths.begin(), depths.end(), p.depths.begin(), [](double d) { return static_cast<int>(std::lround(d)); });
	p.degenerate.assign(w, false);
	p.fitted = std::move(r.fitted);
	p.robust_weights = std::move(r.weights);
	return p;
}

/// Maximal runs of shadowed columns, sorted by start. Rejects masks whose
/// columns are not uniformly reliable or uniformly shadowed.
inline std::vector<Interval> shadow_intervals(const ShadowMask& mask) {
	std::vector<Interval> out;
	for (int x = 0; x < mask.width(); ++x) {
		const bool top = mask.height() > 0 && mask.shadowed(x, 0);
		for (int y = 1; y < mask.height(); ++y)
			if (mask.shadowed(x, y) != top)
				throw Error(Errc::NonColumnarMask, "column " + std::to_string(x) + " mixes shadowed and reliable pixels");
		if (!top)
			continue;
		if (!out.empty() && out.back().end() == x)
			++out.back().width;
		else
			out.push_back({x, 1});
	}
	return out;
}

inline std::vector<Interval> runs_of(const std::vector<bool>& flags) {
	std::vector<Interval> out;
	for (int x = 0; x < static_cast<int>(flags.size()); ++x) {
		if (!flags[x])
			continue;
		if (!out.empty() && out.back().end() == x)
			++out.back().width;
		else
			out.push_back({x, 1});
	}
	return out;
}

inline ShadowMask mask_from_intervals(int width, int height, const std::vector<Interval>& intervals) {
	ShadowMask m(width, height);
	for (const Interval& iv : intervals)
		for (int x = std::max(iv.start, 0); x < std::min(iv.end(), width); ++x)
			m.set_column(x, false);
	return m;
}

/// Per-column shadow decision from the membrane-fit outliers and a drop in
/// mean tissue intensity, followed by gap closing, grouping, and a fixed
/// per-side margin. Shadowed columns are masked over the full height.
inline ShadowMask detect_shadows(const Image& img, const BmProfile& profile, const ShadowParams& params = {}) {
	const int w = img.width();
	const int h = img.height();
	if (profile.width() != w || static_cast<int>(profile.fitted.size()) != w ||
	    static_cast<int>(profile.robust_weights.size()) != w)
		throw Error(Errc::DimensionMismatch, "membrane profile does not match image width");

	std::vector<bool> outlier(w);
	std::vector<double> tissue(w);
	for (int x = 0; x < w; ++x) {
		outlier[x] = profile.robust_weights[x] < params.w_min;
		const int c = static_cast<int>(std::lround(profile.fitted[x]));
		const int y0 = std::clamp(c - params.tissue_half_height, 0, h - 1);
		const int y1 = std::clamp(c + params.tissue_half_height, 0, h - 1);
		double s = 0;
		for (int y = y0; y <= y1; ++y)
			s += img.at(x, y);
		tissue[x] = s / (y1 - y0 + 1);
	}

	std::vector<bool> flagged(w);
	const int half = params.median_window / 2;
	for (int x = 0; x < w; ++x) {
		std::vector<double> window;
		for (int k = std::max(0, x - half); k <= std::min(w - 1, x + half); ++k)
			if (!outlier[k])
				window.push_back(tissue[k]);
		const bool dark = !window.empty() && tissue[x] < params.intensity_factor * detail::median(window);
		flagged[x] = outlier[x] || dark;
	}

	// Closing: runs separated by at most 2*dilation reliable columns merge.
	std::vector<Interval> runs = runs_of(flagged);
	std::vector<Interval> merged;
	for (const Interval& r : runs) {
		if (!merged.empty() && r.start - merged.back().end() <= 2 * params.dilation)
			merged.back().width = r.end() - merged.back().start;
		else
			merged.push_back(r);
	}
	// Broaden each group by the margin on both sides, then re-merge overlaps.
	std::vector<Interval> broadened;
	for (const Interval& r : merged) {
		const int s = std::max(0, r.start - params.margin);
		const int e = std::min(w, r.end() + params.margin);
		if (!broadened.empty() && s <= broadened.back().end())
			broadened.back().width = std::max(broadened.back().end(), e) - broadened.back().start;
		else
			broadened.push_back({s, e - s});
	}
	return mask_from_intervals(w, h, broadened);
}

/// Shifts each column so the fitted membrane lands on `target_depth`. Pixels
/// shifted out are dropped and vacated pixels become 0.
inline std::pair<Image, FlattenRecord> flatten(const Image& img, const BmProfile& profile, int target_depth) {
	const int w = img.width();
	const int h = img.height();
	if (target_depth < 0 || target_depth >= h)
		throw Error(Errc::DimensionMismatch, "target depth outside image height");
	if (static_cast<int>(profile.fitted.size()) != w)
		throw Error(Errc::DimensionMismatch, "membrane profile does not match image width");
	FlattenRecord rec;
	rec.target_depth = target_depth;
	rec.shifts.resize(w);
	Image out(w, h, 0.0);
	for (int x = 0; x < w; ++x) {
		const int s = static_cast<int>(std::lround(profile.fitted[x])) - target_depth;
		rec.shifts[x] = s;
		for (int y = 0; y < h; ++y) {
			const int src = y + s;
			if (src >= 0 && src < h)
				out.at(x, y) = img.at(x, src);
		}
	}
	return {std::move(out), std::move(rec)};
}

inline Image unflatten(const Image& img, const FlattenRecord& record) {
	const int w = img.width();
	const int h = img.height();
	if (static_cast<int>(record.shifts.size()) != w)
		throw Error(Errc::DimensionMismatch, "flatten record does not match image width");
	Image out(w, h, 0.0);
	for (int x = 0; x < w; ++x) {
		const int s = record.shifts[x];
		for (int y = 0; y < h; ++y) {
			const int src = y - s;
			if (src >= 0 && src < h)
				out.at(x, y) = img.at(x, src);
		}
	}
	return out;
}

/// Default flattening depth: median of the rounded fitted membrane.
inline int default_target_depth(const BmProfile& p) {
	std::vector<double> r(p.fitted.size());
	std::transform(p.fitted.begin(), p.fitted.end(), r.begin(), [](double v) { return std::round(v); });
	return static_cast<int>(detail::median(std::move(r)));
}

} // namespace octinpaint::preproc

#endif // OCTINPAINT_PREPROC_HPP
