#ifndef OCTINPAINT_INPAINT_HPP
#define OCTINPAINT_INPAINT_HPP

#include <optional>
#include <vector>

#include "baseline.hpp"
#include "core.hpp"
#include "sparse.hpp"

namespace octinpaint::sparse {

struct StripDiagnostics {
	std::size_t patches = 0;       // patches in the grid
	std::size_t coded = 0;         // patches that went through sparse coding
	std::size_t fallbacks = 0;     // masked patches below the support floor
};

namespace detail {

inline void check_strip_args(const Image& strip, const ShadowMask& mask, const Dictionary& dict, const PatchGrid& grid) {
	if (!mask.matches(strip))
		throw Error(Errc::DimensionMismatch, "strip and mask dimensions differ");
	if (grid.region_w != strip.width() || grid.region_h != strip.height())
		throw Error(Errc::DimensionMismatch, "patch grid was built for a different strip size");
	if (grid.patch_len() != dict.atom_len())
		throw Error(Errc::DimensionMismatch, "patch size does not match dictionary atom length");
}

inline bool any_masked(const Eigen::VectorXd& keep) { return (keep.array() == 0.0).any(); }

// Writes reliable pixels of `src` over `out`.
inline void restore_reliable(Image& out, const Image& src, const ShadowMask& mask) {
	for (int y = 0; y < src.height(); ++y)
		for (int x = 0; x < src.width(); ++x)
			if (mask.reliable(x, y))
				out.at(x, y) = src.at(x, y);
}

} // namespace detail

/// Dictionary-based inpainting of one strip. Patches touching a shadowed
/// pixel are coded from their reliable rows only and replaced by the full
/// reconstruction; the overlapping results are averaged and every reliable
/// pixel is then copied back from the input.
///
/// Patches with fewer reliable rows than `support_floor(L)` are coded with
/// the row-wise linear interpolation of the strip substituted on their
/// shadowed rows, and counted in `diag->fallbacks`.
inline Image inpaint_strip(const Image& strip, const ShadowMask& mask, const Dictionary& dict, const PatchGrid& grid,
                           int L, StripDiagnostics* diag = nullptr) {
	detail::check_strip_args(strip, mask, dict, grid);
	if (mask.all_reliable())
		return strip;

	std::optional<Image> filled;
	const auto& pos = grid.positions;
	std::vector<Eigen::VectorXd> out(pos.size());
	std::vector<char> state(pos.size(), 0); // 0 untouched, 1 coded, 2 needs fallback

#pragma omp parallel for schedule(dynamic, 16)
	for (std::size_t i = 0; i < pos.size(); ++i) {
		const Eigen::VectorXd y = read_patch(strip, pos[i].x, pos[i].y, grid.patch_w, grid.patch_h);
		const Eigen::VectorXd keep = read_keep(mask, pos[i].x, pos[i].y, grid.patch_w, grid.patch_h);
		if (!detail::any_masked(keep)) {
			out[i] = y;
			continue;
		}
		const int kept = static_cast<int>((keep.array() != 0.0).count());
		if (kept < support_floor(L)) {
			state[i] = 2;
			continue;
		}
		out[i] = reconstruct(dict, masked_omp(dict, y, keep, L));
		state[i] = 1;
	}

	std::size_t fallbacks = 0;
	for (std::size_t i = 0; i < pos.size(); ++i) {
		if (state[i] != 2)
			continue;
		if (!filled)
			filled = eval::inpaint_baseline_interp(strip, mask);
		const Eigen::VectorXd y = read_patch(*filled, pos[i].x, pos[i].y, grid.patch_w, grid.patch_h);
		out[i] = reconstruct(dict, omp(dict, y, L));
		++fallbacks;
	}

	PatchAccumulator acc(strip.width(), strip.height(), grid.patch_w, grid.patch_h);
	for (std::size_t i = 0; i < pos.size(); ++i)
		acc.add(pos[i], out[i]);
	Image result = std::move(acc).finish();
	detail::restore_reliable(result, strip, mask);

	if (diag) {
		diag->patches += pos.size();
		diag->coded += static_cast<std::size_t>(std::count(state.begin(), state.end(), char{1})) + fallbacks;
		diag->fallbacks += fallbacks;
	}
	return result;
}

/// L-sparse projection of one patch onto the dictionary.
inline Eigen::VectorXd regularize_patch(const Dictionary& dict, const Eigen::VectorXd& y, int L) {
	return reconstruct(dict, omp(dict, y, L));
}

/// Dictionary-based regularization. `inpainted` marks (with 0) the pixels
/// that were filled in; every patch touching one is replaced by its L-sparse
/// projection onto `dict`, patches without one pass through, and reliable
/// pixels are restored verbatim.
inline Image regularize_strip(const Image& strip, const ShadowMask& inpainted, const Dictionary& dict,
                              const PatchGrid& grid, int L) {
	detail::check_strip_args(strip, inpainted, dict, grid);
	if (inpainted.all_reliable())
		return strip;
	const auto& pos = grid.positions;
	std::vector<Eigen::VectorXd> out(pos.size());

#pragma omp parallel for schedule(dynamic, 16)
	for (std::size_t i = 0; i < pos.size(); ++i) {
		const Eigen::VectorXd y = read_patch(strip, pos[i].x, pos[i].y, grid.patch_w, grid.patch_h);
		const Eigen::VectorXd keep = read_keep(inpainted, pos[i].x, pos[i].y, grid.patch_w, grid.patch_h);
		out[i] = detail::any_masked(keep) ? regularize_patch(dict, y, L) : y;
	}

	PatchAccumulator acc(strip.width(), strip.height(), grid.patch_w, grid.patch_h);
	for (std::size_t i = 0; i < pos.size(); ++i)
		acc.add(pos[i], out[i]);
	Image result = std::move(acc).finish();
	detail::restore_reliable(result, strip, inpainted);
	return result;
}

} // namespace octinpaint::sparse

#endif // OCTINPAINT_INPAINT_HPP
