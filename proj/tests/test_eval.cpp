#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace octinpaint;
using namespace octinpaint::eval;

namespace {

double direct_psnr(const Image& a, const Image& b, const ShadowMask* m) {
	double se = 0;
	long n = 0;
	for (int y = 0; y < a.height(); ++y)
		for (int x = 0; x < a.width(); ++x)
			if (!m || m->shadowed(x, y)) {
				se += (a.at(x, y) - b.at(x, y)) * (a.at(x, y) - b.at(x, y));
				++n;
			}
	return 10 * std::log10(1.0 / (se / n));
}

double direct_ssim(const Image& a, const Image& b, const ShadowMask* m) {
	const double c1 = 1e-4, c2 = 9e-4;
	double total = 0;
	long windows = 0;
	for (int y0 = 0; y0 + 8 <= a.height(); ++y0)
		for (int x0 = 0; x0 + 8 <= a.width(); ++x0) {
			bool hit = !m;
			for (int y = y0; !hit && y < y0 + 8; ++y)
				for (int x = x0; !hit && x < x0 + 8; ++x)
					hit = m->shadowed(x, y);
			if (!hit)
				continue;
			double ma = 0, mb = 0;
			for (int y = y0; y < y0 + 8; ++y)
				for (int x = x0; x < x0 + 8; ++x) {
					ma += a.at(x, y);
					mb += b.at(x, y);
				}
			ma /= 64;
			mb /= 64;
			double va = 0, vb = 0, cov = 0;
			for (int y = y0; y < y0 + 8; ++y)
				for (int x = x0; x < x0 + 8; ++x) {
					va += (a.at(x, y) - ma) * (a.at(x, y) - ma);
					vb += (b.at(x, y) - mb) * (b.at(x, y) - mb);
					cov += (a.at(x, y) - ma) * (b.at(x, y) - mb);
				}
			va /= 64;
			vb /= 64;
			cov /= 64;
			total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
			++windows;
		}
	return total / windows;
}

} // namespace

TEST(Synth, ZeroCountIsIdentity) {
	const Image img = make_phantom(1);
	SynthParams p;
	p.count = 0;
	const auto r = synth_shadows(img, p, 3);
	EXPECT_EQ(r.image, img);
	EXPECT_TRUE(r.mask.all_reliable());
}

TEST(Synth, DeterministicForSeed) {
	const Image img = make_phantom(2);
	const auto a = synth_shadows(img, {}, 77);
	const auto b = synth_shadows(img, {}, 77);
	EXPECT_EQ(a.image, b.image);
	EXPECT_EQ(a.mask, b.mask);
	EXPECT_NE(synth_shadows(img, {}, 78).mask, a.mask);
}

TEST(Synth, PlacementProperties) {
	const Image img(256, 16, 0.5);
	for (std::uint64_t seed = 0; seed < 200; ++seed) {
		SynthParams p;
		p.count = 4;
		const auto r = synth_shadows(img, p, seed);
		const auto iv = preproc::shadow_intervals(r.mask);
		ASSERT_EQ(iv.size(), 4u);
		int total = 0;
		for (std::size_t i = 0; i < iv.size(); ++i) {
			EXPECT_GE(iv[i].width, p.min_width);
			EXPECT_LE(iv[i].width, p.max_width);
			EXPECT_EQ(iv[i].start, r.shadows[i].start);
			EXPECT_EQ(iv[i].width, r.shadows[i].width);
			total += iv[i].width;
			if (i > 0) {
				EXPECT_GE(iv[i].start - iv[i - 1].end(), p.gap);
			}
		}
		EXPECT_GE(iv.front().start, p.edge_margin);
		EXPECT_LE(iv.back().end(), 256 - p.edge_margin);
		EXPECT_EQ(r.mask.shadowed_count(), static_cast<std::size_t>(total) * 16);
		for (int y = 0; y < 16; ++y)
			for (int x = 0; x < 256; ++x)
				ASSERT_EQ(r.image.at(x, y), r.mask.shadowed(x, y) ? 0.0 : 0.5);
	}
}

TEST(Synth, Infeasible) {
	SynthParams p;
	p.count = 10;
	try {
		synth_shadows(Image(256, 8), p, 1);
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.code(), Errc::PlacementInfeasible);
	}
}

TEST(Psnr, IdenticalIsInfinite) {
	const Image img = make_phantom(3);
	EXPECT_TRUE(std::isinf(psnr(img, img)));
}

TEST(Psnr, UniformDifferenceClosedForm) {
	Image a(32, 32, 0.3);
	Image b(32, 32, 0.3 + 16.0 / 255.0);
	EXPECT_NEAR(psnr(a, b), 24.0486, 1e-3);
	EXPECT_NEAR(psnr(a, b), 20 * std::log10(255.0 / 16.0), 1e-9);
}

TEST(Psnr, MatchesDirectSumAndIsSymmetric) {
	std::mt19937_64 rng(4);
	for (int t = 0; t < 10; ++t) {
		const Image a = testsupport::random_image(40, 30, rng);
		const Image b = testsupport::random_image(40, 30, rng);
		EXPECT_NEAR(psnr(a, b), direct_psnr(a, b, nullptr), 1e-9);
		EXPECT_EQ(psnr(a, b), psnr(b, a));
		ShadowMask m(40, 30);
		m.set_column(3, false);
		m.set_column(17, false);
		EXPECT_NEAR(psnr(a, b, Region::masked(m)), direct_psnr(a, b, &m), 1e-9);
	}
}

TEST(Psnr, EmptyRegion) {
	const ShadowMask m(10, 10);
	try {
		psnr(Image(10, 10), Image(10, 10, 1.0), Region::masked(m));
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.code(), Errc::EmptyRegion);
	}
}

TEST(Ssim, IdenticalIsOne) {
	const Image img = make_phantom(5);
	EXPECT_NEAR(ssim(img, img), 1.0, 1e-12);
}

TEST(Ssim, ConstantZeroVersusOne) {
	const double v = ssim(Image(16, 16, 0.0), Image(16, 16, 1.0));
	EXPECT_NEAR(v, 1.0e-4, 1e-5);
	EXPECT_NEAR(v, 1e-4 / (1 + 1e-4), 1e-12);
}

TEST(Ssim, MatchesWindowOracle) {
	std::mt19937_64 rng(6);
	for (int t = 0; t < 5; ++t) {
		const Image a = testsupport::random_image(30, 20, rng);
		Image b = a;
		std::normal_distribution<double> g(0.0, 0.1);
		for (double& v : b.pixels())
			v = std::clamp(v + g(rng), 0.0, 1.0);
		EXPECT_NEAR(ssim(a, b), direct_ssim(a, b, nullptr), 1e-9);
		EXPECT_NEAR(ssim(a, b), ssim(b, a), 1e-12);
		ShadowMask m(30, 20);
		for (int x = 12; x < 15; ++x)
			m.set_column(x, false);
		EXPECT_NEAR(ssim(a, b, Region::masked(m)), direct_ssim(a, b, &m), 1e-9);
	}
}

TEST(Baseline, Examples) {
	const Image img = make_phantom(7);
	EXPECT_EQ(inpaint_baseline_interp(img, ShadowMask(img.width(), img.height())), img);

	Image a(3, 2, 0.0);
	for (int y = 0; y < 2; ++y) {
		a.at(0, y) = 0.2;
		a.at(2, y) = 0.4;
	}
	ShadowMask m(3, 2);
	m.set_column(1, false);
	EXPECT_NEAR(inpaint_baseline_interp(a, m).at(1, 1), 0.3, 1e-15);

	Image b(5, 1, 0.0);
	b.at(4, 0) = 0.4;
	ShadowMask m2(5, 1);
	for (int x = 1; x <= 3; ++x)
		m2.set_column(x, false);
	const Image out = inpaint_baseline_interp(b, m2);
	EXPECT_NEAR(out.at(1, 0), 0.1, 1e-15);
	EXPECT_NEAR(out.at(2, 0), 0.2, 1e-15);
	EXPECT_NEAR(out.at(3, 0), 0.3, 1e-15);
}

TEST(Baseline, EdgeShadowCopiesNearest) {
	Image a(4, 1, 0.0);
	a.at(2, 0) = 0.6;
	a.at(3, 0) = 0.9;
	ShadowMask m(4, 1);
	m.set_column(0, false);
	m.set_column(1, false);
	const Image out = inpaint_baseline_interp(a, m);
	EXPECT_EQ(out.at(0, 0), 0.6);
	EXPECT_EQ(out.at(1, 0), 0.6);
}

TEST(Baseline, NoReliableColumns) {
	try {
		inpaint_baseline_interp(Image(4, 4), ShadowMask(4, 4, false));
		FAIL();
	} catch (const Error& e) {
		EXPECT_EQ(e.code(), Errc::NoReliableColumns);
	}
}

TEST(Sweep, RowsPerMethodAndCsv) {
	const auto images = make_phantom_corpus(2, 5);
	std::vector<int> widths;
	for (int w = 7; w <= 24; ++w)
		widths.push_back(w);
	SweepOptions o;
	o.trials = 2;
	const auto r = width_sweep(images, widths, {Method::BaselineInterp}, 9, pipeline::PipelineConfig{}, {}, o);
	EXPECT_EQ(r.cells.size(), 18u);
	EXPECT_TRUE(r.errors.empty());
	for (const auto& c : r.cells) {
		EXPECT_EQ(c.trials, 2);
		EXPECT_EQ(c.preservation_violations, 0u);
	}
	const std::string csv = sweep_csv(r);
	EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,width,psnr_mean,psnr_std,ssim_mean,ssim_std,trials,seed");
	EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 19);
	EXPECT_NE(csv.find("\nbaseline-interp,7,"), std::string::npos);
	EXPECT_EQ(csv, sweep_csv(width_sweep(images, widths, {Method::BaselineInterp}, 9, pipeline::PipelineConfig{}, {}, o)));
}

TEST(Sweep, SingleTrialHasZeroStd) {
	const auto images = make_phantom_corpus(1, 6);
	SweepOptions o;
	o.trials = 1;
	const auto r = width_sweep(images, {12}, {Method::BaselineInterp}, 1, pipeline::PipelineConfig{}, {}, o);
	ASSERT_EQ(r.cells.size(), 1u);
	EXPECT_EQ(r.cells[0].psnr_std, 0.0);
	EXPECT_EQ(r.cells[0].ssim_std, 0.0);
}

TEST(Sweep, FailuresAreRecorded) {
	const auto images = make_phantom_corpus(1, 6);
	SweepOptions o;
	o.trials = 2;
	const auto r = width_sweep(images, {10}, {Method::Proposed}, 1, pipeline::PipelineConfig{}, {}, o);
	EXPECT_EQ(r.cells[0].failures, 2);
	EXPECT_EQ(r.cells[0].trials, 0);
	EXPECT_EQ(r.errors.size(), 2u);
}

TEST(Sweep, RejectsWidthAboveMax) {
	EXPECT_THROW(width_sweep(make_phantom_corpus(1, 1), {30}, {Method::BaselineInterp}, 1, pipeline::PipelineConfig{}, {}),
	             Error);
}

TEST(Sweep, PlotDimensions) {
	const auto r = width_sweep(make_phantom_corpus(1, 2), {8, 16, 24}, {Method::BaselineInterp}, 1,
	                           pipeline::PipelineConfig{}, {});
	const Image plot = render_sweep_plot(r);
	EXPECT_EQ(plot.width(), 640);
	EXPECT_EQ(plot.height(), 400);
}

TEST(Methods, NamesRoundTrip) {
	for (Method m : {Method::Proposed, Method::ProposedNoMultiscale, Method::BaselineInterp})
		EXPECT_EQ(parse_method(method_name(m)), m);
	EXPECT_FALSE(parse_method("tv").has_value());
}

TEST(Phantom, DeterministicAndInRange) {
	EXPECT_EQ(make_phantom(3), make_phantom(3));
	EXPECT_NE(make_phantom(3), make_phantom(4));
	for (double v : make_phantom(5).pixels())
		ASSERT_TRUE(v >= 0.0 && v <= 1.0);
}

TEST(Phantom, MembraneIsBrightest) {
	const auto t = make_phantom_with_truth(8);
	const auto p = preproc::detect_bm(t.image);
	int near = 0;
	for (int x = 0; x < t.image.width(); ++x)
		if (std::abs(p.depths[x] - t.membrane[x]) <= 5)
			++near;
	EXPECT_GT(near, t.image.width() * 9 / 10);
}
