#include "support.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace octinpaint;
namespace fs = std::filesystem;

namespace {

struct Run {
	int code;
	std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
	const std::string cmd = env + " '" OCTINPAINT_CLI "' " + args + " 2>&1";
	FILE* p = popen(cmd.c_str(), "r");
	std::string out;
	char buf[4096];
	while (std::size_t n = std::fread(buf, 1, sizeof buf, p))
		out.append(buf, n);
	const int status = pclose(p);
	return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
	std::ifstream in(p, std::ios::binary);
	return {std::istreambuf_iterator<char>(in), {}};
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

class Cli : public ::testing::Test {
protected:
	static void SetUpTestSuite() {
		dir_ = fs::temp_directory_path() / ("octinpaint_cli_" + std::to_string(::getpid()));
		fs::remove_all(dir_);
		fs::create_directories(dir_ / "corpus");
		ASSERT_EQ(run("phantom --count 3 --seed 5 -o " + q(dir_ / "corpus")).code, 0);
		const std::string small = " --budget 1500 --atoms 64 --iterations 4 --seed 1";
		ASSERT_EQ(run("train-dict " + q(dir_ / "corpus") + " -o " + q(dir_ / "full.octd") + small).code, 0);
		ASSERT_EQ(run("train-dict " + q(dir_ / "corpus") + " --scale down:4 -o " + q(dir_ / "down.octd") + small).code,
		          0);
		ASSERT_EQ(run("synth --seed 4 -o " + q(dir_ / "s1.png") + " --mask-out " + q(dir_ / "s1_mask.png")).code, 0);
	}

	static void TearDownTestSuite() { fs::remove_all(dir_); }

	static std::string dicts() { return " --dict-full " + q(dir_ / "full.octd") + " --dict-down " + q(dir_ / "down.octd"); }

	static fs::path dir_;
};

fs::path Cli::dir_;

} // namespace

TEST_F(Cli, HelpListsKeysWithDefaults) {
	const auto r = run("inpaint --help");
	EXPECT_EQ(r.code, 0);
	for (const char* key : {"--sparsity", "--downsample", "--width-threshold", "--context-margin", "--upsampler-cmd",
	                        "--dict-full", "--mask", "--emit-mask", "--no-multiscale", "--loess-span", "--w-min"})
		EXPECT_NE(r.out.find(key), std::string::npos) << key;
	EXPECT_NE(r.out.find("0.15"), std::string::npos);
	for (const char* cmd : {"train-dict", "synth", "eval", "sweep", "phantom"})
		EXPECT_EQ(run(std::string(cmd) + " --help").code, 0) << cmd;
}

TEST_F(Cli, TrainDictWritesTaggedDeterministicFiles) {
	EXPECT_EQ(sparse::load_dictionary(dir_ / "full.octd").scale_tag, 1);
	EXPECT_EQ(sparse::load_dictionary(dir_ / "down.octd").scale_tag, 4);
	EXPECT_EQ(sparse::load_dictionary(dir_ / "full.octd").n_atoms(), 64);
	const auto r = run("train-dict " + q(dir_ / "corpus") + " -o " + q(dir_ / "again.octd") +
	                   " --budget 1500 --atoms 64 --iterations 4 --seed 1");
	EXPECT_EQ(r.code, 0);
	EXPECT_NE(r.out.find("mean representation error"), std::string::npos);
	EXPECT_EQ(slurp(dir_ / "again.octd"), slurp(dir_ / "full.octd"));
}

TEST_F(Cli, TrainDictErrors) {
	fs::create_directories(dir_ / "empty");
	EXPECT_EQ(run("train-dict " + q(dir_ / "empty") + " -o " + q(dir_ / "x.octd")).code, 2);
	EXPECT_EQ(run("train-dict " + q(dir_ / "corpus") + " -o " + q(dir_ / "x.octd") + " --budget 10 --atoms 128").code, 3);
	EXPECT_EQ(run("train-dict " + q(dir_ / "corpus") + " -o " + q(dir_ / "x.octd") + " --scale half").code, 3);
}

TEST_F(Cli, EvalIdentical) {
	const auto img = dir_ / "corpus" / "phantom_000.png";
	const auto r = run("eval " + q(img) + " " + q(img));
	EXPECT_EQ(r.code, 0);
	EXPECT_EQ(r.out, "PSNR: inf, SSIM: 1.0\n");
}

TEST_F(Cli, SynthDeterministic) {
	for (const char* name : {"sa", "sb"})
		ASSERT_EQ(run(std::string("synth --seed 4 -o ") + q(dir_ / (std::string(name) + ".png")) + " --mask-out " +
		              q(dir_ / (std::string(name) + "_mask.png")))
		              .code,
		          0);
	EXPECT_EQ(slurp(dir_ / "sa.png"), slurp(dir_ / "sb.png"));
	EXPECT_EQ(slurp(dir_ / "sa_mask.png"), slurp(dir_ / "sb_mask.png"));
	const auto r = run("eval " + q(dir_ / "s1.png") + " " + q(dir_ / "s1.png") + " --mask " + q(dir_ / "s1_mask.png"));
	EXPECT_EQ(r.code, 0);
}

TEST_F(Cli, InpaintCleanImageUnchanged) {
	const auto in = dir_ / "corpus" / "phantom_001.png";
	ASSERT_EQ(run("inpaint " + q(in) + " " + q(dir_ / "clean_out.png") + dicts()).code, 0);
	EXPECT_EQ(load_image(dir_ / "clean_out.png"), load_image(in));
}

TEST_F(Cli, InpaintWithProvidedMask) {
	const Image truth = load_image(dir_ / "corpus" / "phantom_002.png");
	ShadowMask m(truth.width(), truth.height());
	for (int x = 120; x < 132; ++x)
		m.set_column(x, false);
	Image in = truth;
	for (int x = 120; x < 132; ++x)
		for (int y = 0; y < in.height(); ++y)
			in.at(x, y) = 0.0;
	save_image(in, dir_ / "masked_in.png");
	save_mask(m, dir_ / "mask12.png");
	const auto r = run("inpaint " + q(dir_ / "masked_in.png") + " " + q(dir_ / "masked_out.png") + " --mask " +
	                   q(dir_ / "mask12.png") + dicts());
	ASSERT_EQ(r.code, 0) << r.out;
	const Image out = load_image(dir_ / "masked_out.png");
	const Image in_back = load_image(dir_ / "masked_in.png");
	for (int y = 0; y < out.height(); ++y)
		for (int x = 0; x < out.width(); ++x)
			if (m.reliable(x, y)) {
				ASSERT_EQ(out.at(x, y), in_back.at(x, y));
			}
	EXPECT_GT(eval::psnr(truth, out, eval::Region::masked(m)), 15.0);
}

TEST_F(Cli, EmitMaskMatchesDetection) {
	Image img = load_image(dir_ / "corpus" / "phantom_000.png");
	for (int x = 100; x < 112; ++x)
		for (int y = 0; y < img.height(); ++y)
			img.at(x, y) *= 0.3;
	save_image(img, dir_ / "atten.png");
	ASSERT_EQ(run("inpaint " + q(dir_ / "atten.png") + " " + q(dir_ / "atten_out.png") + " --emit-mask " +
	              q(dir_ / "atten_mask.png") + dicts())
	              .code,
	          0);
	const Image back = load_image(dir_ / "atten.png");
	const ShadowMask want = preproc::detect_shadows(back, preproc::loess_fit(preproc::detect_bm(back)));
	EXPECT_EQ(load_mask(dir_ / "atten_mask.png"), want);
	const auto iv = preproc::shadow_intervals(want);
	ASSERT_EQ(iv.size(), 1u);
	EXPECT_EQ(iv[0].start, 98);
}

TEST_F(Cli, ExitCodes) {
	EXPECT_EQ(run("inpaint " + q(dir_ / "nope.png") + " " + q(dir_ / "o.png") + dicts()).code, 2);
	EXPECT_EQ(run("inpaint " + q(dir_ / "corpus" / "phantom_000.png") + " " + q(dir_ / "o.png")).code, 3);
	EXPECT_EQ(run("inpaint " + q(dir_ / "s1.png") + " " + q(dir_ / "o.png") + " --mask " + q(dir_ / "s1_mask.png")).code,
	          3);
	EXPECT_EQ(run("inpaint " + q(dir_ / "s1.png") + " " + q(dir_ / "o.png") + " --sparsity two" + dicts()).code, 3);
	EXPECT_EQ(run("inpaint " + q(dir_ / "s1.png") + " " + q(dir_ / "o.png") + " --max-width 60" + dicts()).code, 3);
	EXPECT_EQ(run("inpaint --bogus").code, 3);
	EXPECT_EQ(run("").code, 3);
}

TEST_F(Cli, ExternalUpsampler) {
	const std::string base = "inpaint " + q(dir_ / "s1.png") + " " + q(dir_ / "ext.png") + " --mask " +
	                         q(dir_ / "s1_mask.png") + dicts() + " --upsampler external";
	EXPECT_EQ(run(base + " --upsampler-cmd '" FAKE_UPSAMPLER "'").code, 0);
	EXPECT_EQ(run(base + " --upsampler-cmd '" FAKE_UPSAMPLER " --mode fail'").code, 4);
	EXPECT_EQ(run(base + " --upsampler-cmd missing", "OCT_INPAINT_UPSAMPLER='" FAKE_UPSAMPLER "'").code, 0);
	EXPECT_EQ(run(base).code, 3);
}

TEST_F(Cli, ConfigFilePrecedence) {
	{
		std::ofstream(dir_ / "good.cfg") << "# dictionaries\ndict_full = " << (dir_ / "full.octd").string()
		                                  << "\ndict_down = " << (dir_ / "down.octd").string() << "\nsparsity = 2\n";
		std::ofstream(dir_ / "bad.cfg") << "sparsity = 2\nspasity = 3\n";
		std::ofstream(dir_ / "wide.cfg") << "max_width = 60\n";
	}
	const std::string job = "inpaint " + q(dir_ / "s1.png") + " " + q(dir_ / "cfg_out.png") + " --mask " +
	                        q(dir_ / "s1_mask.png");
	EXPECT_EQ(run(job + " --config " + q(dir_ / "good.cfg")).code, 0);
	EXPECT_EQ(run(job, "OCT_INPAINT_CONFIG=" + q(dir_ / "good.cfg")).code, 0);
	const auto bad = run(job + " --config " + q(dir_ / "bad.cfg"));
	EXPECT_EQ(bad.code, 3);
	EXPECT_NE(bad.out.find("spasity"), std::string::npos);
	EXPECT_EQ(run(job + dicts() + " --config " + q(dir_ / "wide.cfg")).code, 3);
	EXPECT_EQ(run(job + dicts() + " --max-width 24 --config " + q(dir_ / "wide.cfg")).code, 0);
	EXPECT_EQ(run(job + " --config " + q(dir_ / "missing.cfg")).code, 2);
}

TEST_F(Cli, SweepCsvAndPlot) {
	const auto r = run("sweep --widths 7-24 --methods baseline-interp --trials 1 --phantoms 1 --seed 3 -o " +
	                   q(dir_ / "sweep.csv") + " --plot " + q(dir_ / "sweep.png"));
	ASSERT_EQ(r.code, 0) << r.out;
	const std::string csv = slurp(dir_ / "sweep.csv");
	EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 19);
	EXPECT_EQ(load_image(dir_ / "sweep.png").width(), 640);
	ASSERT_EQ(run("sweep --widths 7-24 --methods baseline-interp --trials 1 --phantoms 1 --seed 3 -o " +
	              q(dir_ / "sweep2.csv"))
	              .code,
	          0);
	EXPECT_EQ(slurp(dir_ / "sweep2.csv"), csv);
	EXPECT_EQ(run("sweep --methods tv").code, 3);
	EXPECT_EQ(run("sweep --widths 7-40 --methods baseline-interp").code, 3);
}

TEST_F(Cli, SweepWithDictionaries) {
	const auto r = run("sweep --widths 8,16 --trials 1 --phantoms 1 --seed 2" + dicts());
	ASSERT_EQ(r.code, 0) << r.out;
	EXPECT_NE(r.out.find("proposed,8,"), std::string::npos);
	EXPECT_NE(r.out.find("proposed-no-multiscale,16,"), std::string::npos);
	EXPECT_NE(r.out.find("baseline-interp,16,"), std::string::npos);
}
