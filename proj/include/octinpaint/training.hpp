#ifndef OCTINPAINT_TRAINING_HPP
#define OCTINPAINT_TRAINING_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "core.hpp"
#include "resample.hpp"
#include "sparse.hpp"

namespace octinpaint {

struct PatchSampling {
	int patch_w = 8;
	int patch_h = 8;
	int budget_per_image = 10'000;
	/// Patches whose variance falls below this are treated as black
	/// background and dropped.
	double variance_floor = 1e-4;
	std::uint64_t seed = 0;
};

inline double patch_variance(const Eigen::VectorXd& v) {
	const double mean = v.mean();
	return (v.array() - mean).square().mean();
}

/// Draws up to `budget_per_image` distinct patch positions per image
/// (all positions when fewer exist) and keeps the non-background ones, one
/// patch per column of the returned matrix.
inline Eigen::MatrixXd sample_training_patches(const std::vector<Image>& images, const PatchSampling& s) {
	std::mt19937_64 rng(s.seed);
	std::vector<Eigen::VectorXd> kept;
	for (const Image& img : images) {
		if (img.width() < s.patch_w || img.height() < s.patch_h)
			continue;
		const int nx = img.width() - s.patch_w + 1;
		const int ny = img.height() - s.patch_h + 1;
		const std::size_t total = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
		std::vector<std::size_t> idx(total);
		for (std::size_t i = 0; i < total; ++i)
			idx[i] = i;
		const std::size_t take = std::min<std::size_t>(total, static_cast<std::size_t>(std::max(s.budget_per_image, 0)));
		// Partial Fisher-Yates: the first `take` entries become a uniform sample.
		for (std::size_t i = 0; i < take; ++i) {
			std::uniform_int_distribution<std::size_t> pick(i, total - 1);
			std::swap(idx[i], idx[pick(rng)]);
		}
		for (std::size_t i = 0; i < take; ++i) {
			const int x = static_cast<int>(idx[i] % nx);
			const int y = static_cast<int>(idx[i] / nx);
			Eigen::VectorXd v = read_patch(img, x, y, s.patch_w, s.patch_h);
			if (patch_variance(v) >= s.variance_floor)
				kept.push_back(std::move(v));
		}
	}
	Eigen::MatrixXd m(s.patch_w * s.patch_h, static_cast<Eigen::Index>(kept.size()));
	for (std::size_t j = 0; j < kept.size(); ++j)
		m.col(static_cast<Eigen::Index>(j)) = kept[j];
	return m;
}

/// Samples patches from `images` (downsampled by `scale` first when > 1)
/// and trains a dictionary tagged with that scale.
inline sparse::KsvdResult train_from_images(const std::vector<Image>& images, int scale, const PatchSampling& sampling,
                                            sparse::KsvdOptions opt) {
	std::vector<Image> scaled;
	scaled.reserve(images.size());
	for (const Image& img : images)
		scaled.push_back(pipeline::downsample(img, scale));
	opt.scale_tag = scale;
	return sparse::train_dictionary(sample_training_patches(scaled, sampling), opt);
}

} // namespace octinpaint

#endif // OCTINPAINT_TRAINING_HPP
