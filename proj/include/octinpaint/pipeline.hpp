#ifndef OCTINPAINT_PIPELINE_HPP
#define OCTINPAINT_PIPELINE_HPP

#include <cstdlib>
#include <string>
#include <vector>

#include "core.hpp"
#include "inpaint.hpp"
#include "preproc.hpp"
#include "resample.hpp"
#include "sparse.hpp"

namespace octinpaint::pipeline {

enum class Upsampler { Bicubic, External };

/// Largest low-scale width a shadow of `width` columns can occupy after
/// downsampling by n, over all alignments.
inline int worst_low_scale_width(int width, int n) { return (width + n - 1 + n - 1) / n; }

struct PipelineConfig {
	int patch_w = 8;
	int patch_h = 8;
	int sparsity = 2;
	int atoms = 128;
	int downsample = 4;
	int width_threshold = 8;
	int max_width = 24;
	int stride = 1;
	int context_margin = 8;
	bool multiscale = true;
	Upsampler upsampler = Upsampler::Bicubic;
	std::string upsampler_cmd;

	/// Throws ConfigError when the wide branch cannot bring `max_width`
	/// below the threshold at the low scale, whatever the shadow alignment.
	void validate() const {
		auto fail = [](const std::string& m) { throw Error(Errc::ConfigError, m); };
		if (patch_w < 1 || patch_h < 1)
			fail("patch dimensions must be positive");
		if (sparsity < 1)
			fail("sparsity must be >= 1");
		if (downsample < 1)
			fail("downsample factor must be >= 1");
		if (stride < 1)
			fail("stride must be >= 1");
		if (context_margin < 0)
			fail("context margin must be >= 0");
		if (width_threshold < 1)
			fail("width threshold must be >= 1");
		if (multiscale && max_width >= width_threshold &&
		    worst_low_scale_width(max_width, downsample) >= width_threshold)
			fail("max_width " + std::to_string(max_width) + " stays >= width_threshold " +
			     std::to_string(width_threshold) + " after downsampling by " + std::to_string(downsample));
		if (upsampler == Upsampler::External && effective_upsampler_cmd().empty())
			fail("external upsampler selected but no command configured");
	}

	/// OCT_INPAINT_UPSAMPLER, when set, overrides the configured command.
	std::string effective_upsampler_cmd() const {
		if (const char* env = std::getenv("OCT_INPAINT_UPSAMPLER"); env && *env)
			return env;
		return upsampler_cmd;
	}
};

enum class StripClass { Clean, Narrow, Wide };

inline const char* strip_class_name(StripClass c) {
	switch (c) {
	case StripClass::Clean: return "clean";
	case StripClass::Narrow: return "narrow";
	case StripClass::Wide: return "wide";
	}
	return "?";
}

struct Strip {
	int start = 0;
	int width = 0;
	StripClass cls = StripClass::Clean;
	std::vector<preproc::Interval> shadows;

	int end() const noexcept { return start + width; }
};

struct StripPlan {
	std::vector<Strip> strips;
};

/// Splits the columns into clean, narrow, and wide strips. Each shadow strip
/// carries `context_margin` reliable columns per side; strips whose context
/// overlaps are merged and take the wider class.
inline StripPlan route_strips(const ShadowMask& mask, const PipelineConfig& cfg) {
	const auto intervals = preproc::shadow_intervals(mask);
	const int w = mask.width();
	std::vector<Strip> shadow_strips;
	for (const auto& iv : intervals) {
		Strip s;
		s.start = std::max(0, iv.start - cfg.context_margin);
		const int e = std::min(w, iv.end() + cfg.context_margin);
		s.width = e - s.start;
		s.cls = (cfg.multiscale && iv.width >= cfg.width_threshold) ? StripClass::Wide : StripClass::Narrow;
		s.shadows = {iv};
		if (!shadow_strips.empty() && s.start < shadow_strips.back().end()) {
			Strip& prev = shadow_strips.back();
			prev.width = std::max(prev.end(), s.end()) - prev.start;
			if (s.cls == StripClass::Wide)
				prev.cls = StripClass::Wide;
			prev.shadows.push_back(iv);
		} else {
			shadow_strips.push_back(std::move(s));
		}
	}
	StripPlan plan;
	int cursor = 0;
	for (auto& s : shadow_strips) {
		if (s.start > cursor)
			plan.strips.push_back({cursor, s.start - cursor, StripClass::Clean, {}});
		cursor = s.end();
		plan.strips.push_back(std::move(s));
	}
	if (cursor < w)
		plan.strips.push_back({cursor, w - cursor, StripClass::Clean, {}});
	return plan;
}

inline Image upsample(const Image& img, int n, const PipelineConfig& cfg) {
	if (cfg.upsampler == Upsampler::External)
		return upsample_external(img, n, cfg.effective_upsampler_cmd());
	return upsample_bicubic(img, n);
}

struct Dictionaries {
	const sparse::Dictionary* full = nullptr;
	const sparse::Dictionary* down = nullptr;
};

struct PipelineDiagnostics {
	sparse::StripDiagnostics narrow;
	sparse::StripDiagnostics wide_low;
	int narrow_strips = 0;
	int wide_strips = 0;
};

namespace detail {

inline Image narrow_branch(const Image& strip, const ShadowMask& mask, const sparse::Dictionary& dict,
                           const PipelineConfig& cfg, sparse::StripDiagnostics* diag) {
	const auto grid = PatchGrid::make(strip.width(), strip.height(), cfg.patch_w, cfg.patch_h, cfg.stride, cfg.stride);
	return sparse::inpaint_strip(strip, mask, dict, grid, cfg.sparsity, diag);
}

// Downsample, inpaint at the low scale, upsample, crop back to the window
// (anchored at the top-left, where the downsampling blocks start), then
// regularize against the full-resolution dictionary.
inline Image wide_branch(const Image& window, const ShadowMask& mask, const Dictionaries& dicts,
                         const PipelineConfig& cfg, sparse::StripDiagnostics* diag) {
	const int n = cfg.downsample;
	const Image low = downsample(window, n);
	const ShadowMask low_mask = downsample_mask(mask, n);
	for (const auto& iv : preproc::shadow_intervals(low_mask))
		if (iv.width >= cfg.width_threshold)
			throw Error(Errc::ConfigError, "shadow is still " + std::to_string(iv.width) +
			                                   " px wide after downsampling by " + std::to_string(n));
	if (low.width() < cfg.patch_w || low.height() < cfg.patch_h)
		throw Error(Errc::RegionTooSmall, "wide strip too small at the low scale");
	const auto low_grid = PatchGrid::make(low.width(), low.height(), cfg.patch_w, cfg.patch_h, cfg.stride, cfg.stride);
	const Image low_filled = sparse::inpaint_strip(low, low_mask, *dicts.down, low_grid, cfg.sparsity, diag);
	const Image up = upsample(low_filled, n, cfg);
	Image merged = crop(up, {0, 0, window.width(), window.height()});
	sparse::detail::restore_reliable(merged, window, mask);
	const auto grid = PatchGrid::make(window.width(), window.height(), cfg.patch_w, cfg.patch_h, cfg.stride, cfg.stride);
	return sparse::regularize_strip(merged, mask, *dicts.full, grid, cfg.sparsity);
}

} // namespace detail

/// Inpaints every shadowed column of a flattened image. Clean strips are
/// copied, narrow strips go through the dictionary inpainting, and wide
/// strips through the downsample-inpaint-upsample-regularize branch. Pixels
/// reliable in `mask` are bit-identical in the output; inpainted values are
/// clamped to [0,1].
inline Image inpaint_image(const Image& img, const ShadowMask& mask, const Dictionaries& dicts,
                           const PipelineConfig& cfg, PipelineDiagnostics* diag = nullptr) {
	if (!mask.matches(img))
		throw Error(Errc::DimensionMismatch, "mask and image dimensions differ");
	if (mask.all_reliable())
		return img;
	cfg.validate();
	if (!dicts.full)
		throw Error(Errc::ConfigError, "full-resolution dictionary not loaded");
	if (dicts.full->scale_tag != 1)
		throw Error(Errc::ConfigError, "full-resolution dictionary has scale tag " + std::to_string(dicts.full->scale_tag));

	const StripPlan plan = route_strips(mask, cfg);
	Image out = img;
	for (const Strip& s : plan.strips) {
		if (s.cls == StripClass::Clean)
			continue;
		const Rect r{s.start, 0, s.width, img.height()};
		const Image strip = crop(img, r);
		const ShadowMask smask = crop(mask, r);
		Image filled;
		if (s.cls == StripClass::Narrow) {
			filled = detail::narrow_branch(strip, smask, *dicts.full, cfg, diag ? &diag->narrow : nullptr);
			if (diag)
				++diag->narrow_strips;
		} else {
			if (!dicts.down)
				throw Error(Errc::ConfigError, "low-scale dictionary not loaded");
			if (dicts.down->scale_tag != cfg.downsample)
				throw Error(Errc::ConfigError, "low-scale dictionary has scale tag " +
				                                   std::to_string(dicts.down->scale_tag) + ", expected " +
				                                   std::to_string(cfg.downsample));
			// The low scale needs context_margin columns per side of its own, so
			// the wide branch sees N times the strip's context (clipped).
			const int extra = (cfg.downsample - 1) * cfg.context_margin;
			const int x0 = std::max(0, s.start - extra);
			const int x1 = std::min(img.width(), s.end() + extra);
			const Rect wr{x0, 0, x1 - x0, img.height()};
			const Image window = detail::wide_branch(crop(img, wr), crop(mask, wr), dicts, cfg,
			                                         diag ? &diag->wide_low : nullptr);
			filled = crop(window, {s.start - x0, 0, s.width, img.height()});
			if (diag)
				++diag->wide_strips;
		}
		for (int y = 0; y < img.height(); ++y)
			for (int x = 0; x < s.width; ++x)
				if (smask.shadowed(x, y))
					out.at(s.start + x, y) = std::clamp(filled.at(x, y), 0.0, 1.0);
	}
	return out;
}

struct ScanOptions {
	preproc::LoessParams loess;
	preproc::ShadowParams shadows;
	int target_depth = -1; // < 0: median fitted membrane depth
};

struct ScanResult {
	Image output;
	ShadowMask mask;
	preproc::BmProfile profile;
	preproc::FlattenRecord record;
};

/// Runs `fill(flat_image, mask)` on the flattened scan and maps the result
/// back. Membrane detection and fit always run; shadow detection runs only
/// when no mask is given. Only shadowed pixels of the input are replaced.
template <typename Fill>
ScanResult inpaint_scan_with(const Image& img, const ShadowMask* mask, const ScanOptions& opt, Fill&& fill) {
	ScanResult res;
	res.profile = preproc::loess_fit(preproc::detect_bm(img), opt.loess);
	res.mask = mask ? *mask : preproc::detect_shadows(img, res.profile, opt.shadows);
	if (!res.mask.matches(img))
		throw Error(Errc::DimensionMismatch, "mask and image dimensions differ");
	if (res.mask.all_reliable()) {
		res.output = img;
		return res;
	}
	preproc::shadow_intervals(res.mask); // rejects non-columnar masks
	const int target = opt.target_depth >= 0 ? opt.target_depth : preproc::default_target_depth(res.profile);
	auto [flat, record] = preproc::flatten(img, res.profile, std::clamp(target, 0, img.height() - 1));
	res.record = std::move(record);
	const Image filled = preproc::unflatten(fill(flat, res.mask), res.record);
	res.output = img;
	for (int y = 0; y < img.height(); ++y)
		for (int x = 0; x < img.width(); ++x)
			if (res.mask.shadowed(x, y))
				res.output.at(x, y) = filled.at(x, y);
	return res;
}

/// Preprocessing, multi-scale inpainting, and unflattening of one B-scan.
inline ScanResult inpaint_scan(const Image& img, const ShadowMask* mask, const Dictionaries& dicts,
                               const PipelineConfig& cfg, const ScanOptions& opt = {},
                               PipelineDiagnostics* diag = nullptr) {
	return inpaint_scan_with(img, mask, opt, [&](const Image& flat, const ShadowMask& m) {
		return inpaint_image(flat, m, dicts, cfg, diag);
	});
}

} // namespace octinpaint::pipeline

#endif // OCTINPAINT_PIPELINE_HPP
