#ifndef OCTINPAINT_PHANTOM_HPP
#define OCTINPAINT_PHANTOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "core.hpp"

namespace octinpaint::eval {

/// Layered retina-like test image: a bright membrane band on a curved
/// baseline, undulating layers above it, a decaying choroid below, and
/// multiplicative gamma speckle.
struct PhantomParams {
	int width = 256;
	int height = 256;
	double curvature = 0.08;    // membrane sag across the width, as a fraction of height
	double undulation = 2.0;    // layer boundary amplitude, px
	double speckle_shape = 100; // gamma shape k; relative noise std is 1/sqrt(k)
	double membrane_value = 0.95;
	int membrane_thickness = 3;
	double edge_softness = 0.35; // logistic scale of layer edges, px
};

struct PhantomTruth {
	Image image;
	std::vector<double> membrane; // top row of the membrane band per column
};

namespace detail {

inline double smooth_step(double t, double scale) { return 1.0 / (1.0 + std::exp(-t / scale)); }

} // namespace detail

inline PhantomTruth make_phantom_with_truth(std::uint64_t seed, const PhantomParams& p = {}) {
	std::mt19937_64 rng(seed);
	std::uniform_real_distribution<double> uni(0.0, 1.0);
	const int w = p.width;
	const int h = p.height;
	const double s = h / 128.0;
	constexpr double two_pi = 2.0 * std::numbers::pi;

	// Membrane baseline: quadratic sag plus a slow ripple.
	const double base = h * (0.62 + 0.06 * uni(rng));
	const double sag = p.curvature * h * (uni(rng) < 0.5 ? 1.0 : -1.0) * (0.5 + 0.5 * uni(rng));
	const double ripple_amp = 1.5 * s * uni(rng);
	const double ripple_len = w * (0.5 + uni(rng));
	const double ripple_phase = two_pi * uni(rng);
	std::vector<double> membrane(w);
	for (int x = 0; x < w; ++x) {
		const double u = (x - 0.5 * (w - 1)) / (0.5 * w);
		membrane[x] = base + sag * (u * u - 0.33) + ripple_amp * std::sin(two_pi * x / ripple_len + ripple_phase);
	}

	// Layers listed from the membrane upwards: thickness (px) and intensity.
	struct Layer {
		double thickness, value, amp, wavelength, phase, tex_amp, tex_len, tex_phase;
	};
	const double nominal[][2] = {{5, 0.30}, {7, 0.48}, {9, 0.22}, {8, 0.42}, {10, 0.18}, {6, 0.50}};
	std::vector<Layer> layers;
	for (const auto& n : nominal) {
		Layer l;
		l.thickness = n[0] * s * (0.8 + 0.4 * uni(rng));
		l.value = n[1] * (0.9 + 0.2 * uni(rng));
		l.amp = p.undulation * s * (0.5 + uni(rng));
		l.wavelength = 40.0 + 120.0 * uni(rng);
		l.phase = two_pi * uni(rng);
		l.tex_amp = 0.12 * uni(rng);
		l.tex_len = 12.0 + 30.0 * uni(rng);
		l.tex_phase = two_pi * uni(rng);
		layers.push_back(l);
	}
	const double vitreous = 0.03;
	const double choroid = 0.38 * (0.9 + 0.2 * uni(rng));
	const double choroid_decay = 14.0 * s;

	std::gamma_distribution<double> speckle(p.speckle_shape, 1.0 / p.speckle_shape);
	Image img(w, h);
	std::vector<double> bounds(layers.size());
	for (int x = 0; x < w; ++x) {
		const double m = membrane[x];
		// bounds[i] is the upper edge of layer i, counting up from the membrane.
		double edge = m;
		for (std::size_t i = 0; i < layers.size(); ++i) {
			const Layer& l = layers[i];
			edge -= l.thickness + l.amp * std::sin(two_pi * x / l.wavelength + l.phase);
			bounds[i] = edge;
		}
		for (int y = 0; y < h; ++y) {
			// Smoothed indicator weights of each layer; they sum to one with
			// the vitreous above, the membrane band and the choroid below.
			double prev = detail::smooth_step(y - m, p.edge_softness);
			double v = 0.0;
			for (std::size_t i = 0; i < layers.size(); ++i) {
				const Layer& l = layers[i];
				const double tex = 1.0 + l.tex_amp * std::sin(two_pi * x / l.tex_len + l.tex_phase + 0.15 * y);
				const double cur = detail::smooth_step(y - bounds[i], p.edge_softness);
				v += l.value * tex * (cur - prev);
				prev = cur;
			}
			v += vitreous * (1.0 - prev);
			const double below = detail::smooth_step(y - (m + p.membrane_thickness), p.edge_softness);
			const double band = detail::smooth_step(y - m, p.edge_softness) - below;
			const double choroid_v = choroid * std::exp(-std::max(0.0, y - m - p.membrane_thickness) / choroid_decay);
			v += p.membrane_value * band + std::max(choroid_v, vitreous) * below;
			img.at(x, y) = std::clamp(v * speckle(rng), 0.0, 1.0);
		}
	}
	return {std::move(img), std::move(membrane)};
}

inline Image make_phantom(std::uint64_t seed, const PhantomParams& p = {}) {
	return make_phantom_with_truth(seed, p).image;
}

/// Corpus of `count` phantoms with seeds derived from `seed`.
inline std::vector<Image> make_phantom_corpus(std::size_t count, std::uint64_t seed, const PhantomParams& p = {}) {
	std::vector<Image> out;
	out.reserve(count);
	std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
	std::vector<std::uint32_t> seeds(count);
	seq.generate(seeds.begin(), seeds.end());
	for (std::size_t i = 0; i < count; ++i)
		out.push_back(make_phantom(seeds[i], p));
	return out;
}

} // namespace octinpaint::eval

#endif // OCTINPAINT_PHANTOM_HPP
