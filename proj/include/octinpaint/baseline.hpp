#ifndef OCTINPAINT_BASELINE_HPP
#define OCTINPAINT_BASELINE_HPP

#include <vector>

#include "core.hpp"

namespace octinpaint::eval {

/// Fills each shadowed pixel by linear interpolation along its row between
/// the nearest reliable pixels on either side. Pixels with a reliable
/// neighbour on one side only copy that neighbour.
inline Image inpaint_baseline_interp(const Image& img, const ShadowMask& mask) {
	if (!mask.matches(img))
		throw Error(Errc::DimensionMismatch, "mask and image dimensions differ");
	Image out = img;
	const int w = img.width();
	std::vector<int> reliable_cols;
	for (int y = 0; y < img.height(); ++y) {
		reliable_cols.clear();
		for (int x = 0; x < w; ++x)
			if (mask.reliable(x, y))
				reliable_cols.push_back(x);
		if (reliable_cols.size() == static_cast<std::size_t>(w))
			continue;
		if (reliable_cols.empty())
			throw Error(Errc::NoReliableColumns, "row " + std::to_string(y) + " has no reliable pixel");
		std::size_t k = 0; // first reliable column >= x
		for (int x = 0; x < w; ++x) {
			while (k < reliable_cols.size() && reliable_cols[k] < x)
				++k;
			if (mask.reliable(x, y))
				continue;
			if (k == 0) {
				out.at(x, y) = img.at(reliable_cols.front(), y);
			} else if (k == reliable_cols.size()) {
				out.at(x, y) = img.at(reliable_cols.back(), y);
			} else {
				const int x0 = reliable_cols[k - 1];
				const int x1 = reliable_cols[k];
				const double t = double(x - x0) / double(x1 - x0);
				out.at(x, y) = (1.0 - t) * img.at(x0, y) + t * img.at(x1, y);
			}
		}
	}
	return out;
}

} // namespace octinpaint::eval

#endif // OCTINPAINT_BASELINE_HPP
