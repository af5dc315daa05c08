#ifndef OCTINPAINT_EVAL_HPP
#define OCTINPAINT_EVAL_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "baseline.hpp"
#include "core.hpp"
#include "pipeline.hpp"
#include "preproc.hpp"

namespace octinpaint::eval {

struct SynthResult {
	Image image;
	ShadowMask mask;
	std::vector<preproc::Interval> shadows;
};

struct SynthParams {
	int count = 4;
	int min_width = 7;
	int max_width = 24;
	int gap = 16;         // minimum reliable columns between two shadows
	int edge_margin = 8;  // minimum reliable columns at either image edge
};

/// Blacks out `count` full-height column bands of random width in
/// [min_width, max_width]. Placements are uniform over all non-overlapping
/// configurations that respect the gap and edge margin.
inline SynthResult synth_shadows(const Image& img, const SynthParams& p, std::uint64_t seed) {
	const int w = img.width();
	SynthResult out{img, ShadowMask::all_reliable(img.width(), img.height()), {}};
	if (p.count <= 0)
		return out;
	if (p.min_width < 1 || p.max_width < p.min_width)
		throw Error(Errc::PlacementInfeasible, "invalid width range");
	if (static_cast<long>(p.count) * (p.max_width + p.gap) > w)
		throw Error(Errc::PlacementInfeasible, std::to_string(p.count) + " shadows of up to " +
		                                           std::to_string(p.max_width) + " px do not fit in " +
		                                           std::to_string(w) + " columns");
	std::mt19937_64 rng(seed);
	std::uniform_int_distribution<int> width_dist(p.min_width, p.max_width);
	std::vector<int> widths(p.count);
	long used = 0;
	for (int& v : widths) {
		v = width_dist(rng);
		used += v;
	}
	const long slack = w - 2L * p.edge_margin - used - static_cast<long>(p.count - 1) * p.gap;
	if (slack < 0)
		throw Error(Errc::PlacementInfeasible, "shadows plus gaps exceed the image width");
	std::uniform_int_distribution<long> slack_dist(0, slack);
	std::vector<long> offsets(p.count);
	for (long& o : offsets)
		o = slack_dist(rng);
	std::sort(offsets.begin(), offsets.end());
	long cursor = p.edge_margin;
	for (int i = 0; i < p.count; ++i) {
		const int start = static_cast<int>(cursor + offsets[i]);
		out.shadows.push_back({start, widths[i]});
		cursor += widths[i] + p.gap;
	}
	for (const auto& iv : out.shadows)
		for (int x = iv.start; x < iv.end(); ++x) {
			out.mask.set_column(x, false);
			for (int y = 0; y < img.height(); ++y)
				out.image.at(x, y) = 0.0;
		}
	return out;
}

/// Pixels entering a metric: the shadowed pixels of `mask`, or every pixel
/// when no mask is given.
struct Region {
	const ShadowMask* mask = nullptr;

	static Region full() { return {}; }
	static Region masked(const ShadowMask& m) { return {&m}; }
	bool contains(int x, int y) const { return !mask || mask->shadowed(x, y); }
};

/// PSNR in dB on unit-range data; +infinity when the images agree on the region.
inline double psnr(const Image& ref, const Image& test, Region region = Region::full()) {
	if (!ref.same_shape(test) || (region.mask && !region.mask->matches(ref)))
		throw Error(Errc::DimensionMismatch, "metric inputs differ in size");
	double se = 0.0;
	std::size_t n = 0;
	for (int y = 0; y < ref.height(); ++y)
		for (int x = 0; x < ref.width(); ++x)
			if (region.contains(x, y)) {
				const double d = ref.at(x, y) - test.at(x, y);
				se += d * d;
				++n;
			}
	if (n == 0)
		throw Error(Errc::EmptyRegion, "PSNR region is empty");
	if (se == 0.0)
		return std::numeric_limits<double>::infinity();
	return 10.0 * std::log10(static_cast<double>(n) / se);
}

inline constexpr int kSsimWindow = 8;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

namespace detail {

// Summed-area table with a zero first row and column.
class Integral {
public:
	template <typename F>
	Integral(int w, int h, F&& f) : w_(w + 1), t_(static_cast<std::size_t>(w + 1) * (h + 1), 0.0) {
		for (int y = 0; y < h; ++y)
			for (int x = 0; x < w; ++x)
				at(x + 1, y + 1) = f(x, y) + at(x, y + 1) + at(x + 1, y) - at(x, y);
	}
	double box(int x, int y, int bw, int bh) const {
		return at(x + bw, y + bh) - at(x, y + bh) - at(x + bw, y) + at(x, y);
	}

private:
	double& at(int x, int y) { return t_[static_cast<std::size_t>(y) * w_ + x]; }
	double at(int x, int y) const { return t_[static_cast<std::size_t>(y) * w_ + x]; }
	int w_;
	std::vector<double> t_;
};

} // namespace detail

/// Mean SSIM over 8x8 uniform windows at stride 1 (population statistics),
/// restricted to windows that contain at least one region pixel.
inline double ssim(const Image& ref, const Image& test, Region region = Region::full()) {
	if (!ref.same_shape(test) || (region.mask && !region.mask->matches(ref)))
		throw Error(Errc::DimensionMismatch, "metric inputs differ in size");
	const int w = ref.width();
	const int h = ref.height();
	const int k = kSsimWindow;
	if (w < k || h < k)
		throw Error(Errc::EmptyRegion, "image smaller than the SSIM window");
	// Statistics are accumulated on data shifted by -0.5; variances and the
	// covariance are unaffected and the table sums stay small.
	auto a = [&](int x, int y) { return ref.at(x, y) - 0.5; };
	auto b = [&](int x, int y) { return test.at(x, y) - 0.5; };
	const detail::Integral sx(w, h, a);
	const detail::Integral sy(w, h, b);
	const detail::Integral sxx(w, h, [&](int x, int y) { return a(x, y) * a(x, y); });
	const detail::Integral syy(w, h, [&](int x, int y) { return b(x, y) * b(x, y); });
	const detail::Integral sxy(w, h, [&](int x, int y) { return a(x, y) * b(x, y); });
	std::optional<detail::Integral> reg;
	if (region.mask)
		reg.emplace(w, h, [&](int x, int y) { return region.contains(x, y) ? 1.0 : 0.0; });

	const double inv = 1.0 / (k * k);
	double total = 0.0;
	std::size_t windows = 0;
	for (int y = 0; y + k <= h; ++y) {
		for (int x = 0; x + k <= w; ++x) {
			if (reg && reg->box(x, y, k, k) < 0.5)
				continue;
			const double ax = sx.box(x, y, k, k) * inv;
			const double ay = sy.box(x, y, k, k) * inv;
			const double vx = sxx.box(x, y, k, k) * inv - ax * ax;
			const double vy = syy.box(x, y, k, k) * inv - ay * ay;
			const double cxy = sxy.box(x, y, k, k) * inv - ax * ay;
			const double mx = ax + 0.5;
			const double my = ay + 0.5;
			total += ((2 * mx * my + kSsimC1) * (2 * cxy + kSsimC2)) /
			         ((mx * mx + my * my + kSsimC1) * (vx + vy + kSsimC2));
			++windows;
		}
	}
	if (windows == 0)
		throw Error(Errc::EmptyRegion, "no SSIM window intersects the region");
	return total / static_cast<double>(windows);
}

enum class Method { Proposed, ProposedNoMultiscale, BaselineInterp };

inline const char* method_name(Method m) {
	switch (m) {
	case Method::Proposed: return "proposed";
	case Method::ProposedNoMultiscale: return "proposed-no-multiscale";
	case Method::BaselineInterp: return "baseline-interp";
	}
	return "?";
}

inline std::optional<Method> parse_method(const std::string& s) {
	for (Method m : {Method::Proposed, Method::ProposedNoMultiscale, Method::BaselineInterp})
		if (s == method_name(m))
			return m;
	return std::nullopt;
}

struct SweepCell {
	Method method = Method::Proposed;
	int width = 0;
	double psnr_mean = 0, psnr_std = 0;
	double ssim_mean = 0, ssim_std = 0;
	int trials = 0;                     // successful trials
	int failures = 0;                   // trials that raised an error
	std::size_t preservation_violations = 0; // reliable pixels changed by the method
	std::vector<double> psnr_values, ssim_values;
};

struct SweepReport {
	std::vector<SweepCell> cells; // width-major, methods in the requested order
	std::uint64_t seed = 0;
	bool full_image = false;
	std::vector<std::string> errors;

	const SweepCell* find(Method m, int width) const {
		for (const auto& c : cells)
			if (c.method == m && c.width == width)
				return &c;
		return nullptr;
	}
};

struct SweepOptions {
	int trials = 3;
	int shadows_per_image = 3;
	int gap = 16;
	int edge_margin = 8;
	bool full_image = false;
	pipeline::ScanOptions scan;
};

/// Per-trial seed, a splitmix64 step over (seed, width, trial).
inline std::uint64_t trial_seed(std::uint64_t seed, int width, int trial) {
	std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(width) * 1000003ull + trial + 1);
	z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
	z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
	return z ^ (z >> 31);
}

namespace detail {

inline void mean_std(const std::vector<double>& v, double& mean, double& sd) {
	mean = 0;
	sd = 0;
	if (v.empty())
		return;
	for (double x : v)
		mean += x;
	mean /= static_cast<double>(v.size());
	for (double x : v)
		sd += (x - mean) * (x - mean);
	sd = std::sqrt(sd / static_cast<double>(v.size()));
}

} // namespace detail

/// Runs one method on a shadowed scan through the shared preprocessing.
inline Image run_method(Method m, const Image& shadowed, const ShadowMask& mask, const pipeline::Dictionaries& dicts,
                        const pipeline::PipelineConfig& cfg, const pipeline::ScanOptions& scan) {
	if (m == Method::BaselineInterp)
		return pipeline::inpaint_scan_with(shadowed, &mask, scan, [](const Image& flat, const ShadowMask& mk) {
			       return inpaint_baseline_interp(flat, mk);
		       }).output;
	pipeline::PipelineConfig c = cfg;
	c.multiscale = (m == Method::Proposed) && cfg.multiscale;
	return pipeline::inpaint_scan(shadowed, &mask, dicts, c, scan).output;
}

/// For every width, synthesizes shadows of exactly that width on the
/// corpus images (trial t uses image t mod size), runs each method, and
/// aggregates PSNR/SSIM over the shadowed region. Failed trials are counted
/// and reported without stopping the sweep.
inline SweepReport width_sweep(const std::vector<Image>& images, const std::vector<int>& widths,
                               const std::vector<Method>& methods, std::uint64_t seed,
                               const pipeline::PipelineConfig& cfg, const pipeline::Dictionaries& dicts,
                               const SweepOptions& opt = {}) {
	if (images.empty())
		throw Error(Errc::InsufficientData, "sweep needs at least one image");
	if (opt.trials < 1)
		throw Error(Errc::ConfigError, "sweep needs at least one trial");
	for (int w : widths)
		if (w > cfg.max_width || w < 1)
			throw Error(Errc::ConfigError, "sweep width " + std::to_string(w) + " outside [1, max_width]");
	SweepReport report;
	report.seed = seed;
	report.full_image = opt.full_image;
	for (int width : widths) {
		const std::size_t first = report.cells.size();
		for (Method m : methods) {
			SweepCell c;
			c.method = m;
			c.width = width;
			report.cells.push_back(c);
		}
		for (int t = 0; t < opt.trials; ++t) {
			const Image& truth = images[static_cast<std::size_t>(t) % images.size()];
			SynthParams sp;
			sp.count = opt.shadows_per_image;
			sp.min_width = sp.max_width = width;
			sp.gap = opt.gap;
			sp.edge_margin = opt.edge_margin;
			SynthResult syn;
			try {
				syn = synth_shadows(truth, sp, trial_seed(seed, width, t));
			} catch (const Error& e) {
				for (std::size_t i = first; i < report.cells.size(); ++i)
					++report.cells[i].failures;
				report.errors.push_back("width " + std::to_string(width) + " trial " + std::to_string(t) + ": " + e.what());
				continue;
			}
			const Region region = opt.full_image ? Region::full() : Region::masked(syn.mask);
			for (std::size_t mi = 0; mi < methods.size(); ++mi) {
				SweepCell& cell = report.cells[first + mi];
				try {
					const Image out = run_method(methods[mi], syn.image, syn.mask, dicts, cfg, opt.scan);
					for (int y = 0; y < out.height(); ++y)
						for (int x = 0; x < out.width(); ++x)
							if (syn.mask.reliable(x, y) && out.at(x, y) != syn.image.at(x, y))
								++cell.preservation_violations;
					cell.psnr_values.push_back(psnr(truth, out, region));
					cell.ssim_values.push_back(ssim(truth, out, region));
				} catch (const Error& e) {
					++cell.failures;
					report.errors.push_back(std::string(method_name(methods[mi])) + " width " + std::to_string(width) +
					                        " trial " + std::to_string(t) + ": " + e.what());
				}
			}
		}
		for (std::size_t i = first; i < report.cells.size(); ++i) {
			SweepCell& c = report.cells[i];
			c.trials = static_cast<int>(c.psnr_values.size());
			detail::mean_std(c.psnr_values, c.psnr_mean, c.psnr_std);
			detail::mean_std(c.ssim_values, c.ssim_mean, c.ssim_std);
		}
	}
	return report;
}

inline std::string sweep_csv(const SweepReport& r) {
	std::string out = "method,width,psnr_mean,psnr_std,ssim_mean,ssim_std,trials,seed\n";
	char line[256];
	for (const auto& c : r.cells) {
		std::snprintf(line, sizeof line, "%s,%d,%.6f,%.6f,%.6f,%.6f,%d,%llu\n", method_name(c.method), c.width,
		              c.psnr_mean, c.psnr_std, c.ssim_mean, c.ssim_std, c.trials,
		              static_cast<unsigned long long>(r.seed));
		out += line;
	}
	return out;
}

namespace detail {

inline void plot_dot(Image& img, int x, int y, double v, int r = 1) {
	for (int dy = -r; dy <= r; ++dy)
		for (int dx = -r; dx <= r; ++dx)
			if (x + dx >= 0 && x + dx < img.width() && y + dy >= 0 && y + dy < img.height())
				img.at(x + dx, y + dy) = v;
}

inline void plot_line(Image& img, double x0, double y0, double x1, double y1, double v, int dash) {
	const int steps = static_cast<int>(std::max(std::abs(x1 - x0), std::abs(y1 - y0))) + 1;
	for (int i = 0; i <= steps; ++i) {
		if (dash > 0 && (i / dash) % 2 == 1)
			continue;
		const double t = static_cast<double>(i) / steps;
		plot_dot(img, static_cast<int>(std::lround(x0 + t * (x1 - x0))), static_cast<int>(std::lround(y0 + t * (y1 - y0))), v, 0);
	}
}

} // namespace detail

/// Grayscale line plot of mean PSNR (or SSIM) against width, one curve per
/// method: black solid, dark gray dashed, light gray dotted, in request order.
/// Tick marks on the x axis fall on every width, on the y axis every 1 dB
/// (or 0.05 SSIM).
inline Image render_sweep_plot(const SweepReport& r, bool ssim_metric = false, int width = 640, int height = 400) {
	Image img(width, height, 1.0);
	const int left = 50, right = width - 20, top = 20, bottom = height - 40;
	std::vector<Method> methods;
	std::vector<int> widths;
	double lo = std::numeric_limits<double>::infinity(), hi = -lo;
	for (const auto& c : r.cells) {
		if (std::find(methods.begin(), methods.end(), c.method) == methods.end())
			methods.push_back(c.method);
		if (std::find(widths.begin(), widths.end(), c.width) == widths.end())
			widths.push_back(c.width);
		const double v = ssim_metric ? c.ssim_mean : c.psnr_mean;
		if (c.trials > 0 && std::isfinite(v)) {
			lo = std::min(lo, v);
			hi = std::max(hi, v);
		}
	}
	detail::plot_line(img, left, bottom, right, bottom, 0.0, 0);
	detail::plot_line(img, left, top, left, bottom, 0.0, 0);
	if (widths.empty() || !std::isfinite(lo))
		return img;
	const double tick = ssim_metric ? 0.05 : 1.0;
	lo = std::floor(lo / tick) * tick;
	hi = std::max(std::ceil(hi / tick) * tick, lo + tick);
	const int wmin = *std::min_element(widths.begin(), widths.end());
	const int wmax = std::max(*std::max_element(widths.begin(), widths.end()), wmin + 1);
	auto px = [&](int w) { return left + (right - left) * double(w - wmin) / double(wmax - wmin); };
	auto py = [&](double v) { return bottom - (bottom - top) * (v - lo) / (hi - lo); };
	for (int w : widths)
		detail::plot_line(img, px(w), bottom, px(w), bottom + 5, 0.0, 0);
	for (double v = lo; v <= hi + 1e-9; v += tick)
		detail::plot_line(img, left - 5, py(v), left, py(v), 0.0, 0);

	const double shades[] = {0.0, 0.35, 0.6};
	const int dashes[] = {0, 6, 2};
	for (std::size_t mi = 0; mi < methods.size(); ++mi) {
		std::vector<std::pair<double, double>> pts;
		for (int w : widths) {
			const SweepCell* c = r.find(methods[mi], w);
			const double v = c ? (ssim_metric ? c->ssim_mean : c->psnr_mean) : NAN;
			if (c && c->trials > 0 && std::isfinite(v))
				pts.push_back({px(w), py(v)});
		}
		const double shade = shades[mi % 3];
		for (std::size_t i = 0; i < pts.size(); ++i) {
			detail::plot_dot(img, static_cast<int>(std::lround(pts[i].first)), static_cast<int>(std::lround(pts[i].second)), shade, 2);
			if (i > 0)
				detail::plot_line(img, pts[i - 1].first, pts[i - 1].second, pts[i].first, pts[i].second, shade, dashes[mi % 3]);
		}
	}
	return img;
}

} // namespace octinpaint::eval

#endif // OCTINPAINT_EVAL_HPP
