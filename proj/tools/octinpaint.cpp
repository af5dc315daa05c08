// octinpaint command-line tool: dictionary training, shadow inpainting,
// synthetic shadows, metrics and the width sweep.

#include <octinpaint/octinpaint.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using namespace octinpaint;

namespace {

struct Key {
	const char* name;
	const char* fallback;
	const char* help;
};

const std::vector<Key> kPipelineKeys = {
    {"patch_w", "8", "patch width, px"},
    {"patch_h", "8", "patch height, px"},
    {"sparsity", "2", "atoms per patch code (L)"},
    {"atoms", "128", "dictionary size (M)"},
    {"downsample", "4", "wide-branch downsampling factor (N)"},
    {"width_threshold", "8", "shadows at least this wide take the multi-scale branch"},
    {"max_width", "24", "widest shadow the configuration must handle"},
    {"stride", "1", "patch grid stride inside strips"},
    {"context_margin", "8", "reliable columns added on each side of a shadow strip"},
    {"multiscale", "true", "use the multi-scale branch for wide shadows"},
    {"upsampler", "bicubic", "bicubic | external"},
    {"upsampler_cmd", "", "external upsampler command (OCT_INPAINT_UPSAMPLER overrides)"},
    {"dict_full", "", "full-resolution dictionary (OCTD)"},
    {"dict_down", "", "low-scale dictionary (OCTD)"},
};

const std::vector<Key> kPreprocKeys = {
    {"loess_span", "0.15", "LOESS span as a fraction of the columns"},
    {"robust_iters", "2", "LOESS robustness iterations"},
    {"w_min", "0.2", "robust weight below which a column counts as an outlier"},
    {"intensity_factor", "0.7", "tissue intensity ratio below which a column counts as shadowed"},
    {"tissue_half_height", "100", "rows above the membrane used for the intensity test"},
    {"median_window", "51", "columns in the rolling median reference"},
    {"dilation", "2", "closing radius for shadow columns, px"},
    {"shadow_margin", "2", "columns added on each side of a detected shadow"},
    {"target_depth", "-1", "flattening row for the membrane (-1: median depth)"},
};

const std::vector<Key> kTrainKeys = {
    {"budget", "10000", "patches sampled per image"},
    {"iterations", "20", "K-SVD iterations"},
    {"variance_floor", "0.0001", "patches with lower variance are dropped as background"},
};

const std::vector<Key> kCommonKeys = {
    {"seed", "0", "random seed"},
};

std::set<std::string> all_key_names() {
	std::set<std::string> s;
	for (const auto* group : {&kPipelineKeys, &kPreprocKeys, &kTrainKeys, &kCommonKeys})
		for (const Key& k : *group)
			s.insert(k.name);
	return s;
}

std::string dashed(std::string s) {
	std::replace(s.begin(), s.end(), '_', '-');
	return s;
}

/// Layered settings: built-in defaults, then the config file, then flags.
class Settings {
public:
	void bind(CLI::App* app, const std::vector<Key>& keys) {
		for (const Key& k : keys) {
			defaults_[k.name] = k.fallback;
			auto* opt = app->add_option("--" + dashed(k.name), flags_[k.name], k.help)->default_str(k.fallback);
			options_[k.name] = opt;
		}
	}

	void resolve(const std::string& config_flag) {
		values_ = defaults_;
		std::string path = config_flag;
		if (path.empty())
			if (const char* env = std::getenv("OCT_INPAINT_CONFIG"); env && *env)
				path = env;
		if (!path.empty()) {
			if (!fs::exists(path))
				throw Error(Errc::IoFailure, "config file not found: " + path);
			const ConfigFile file = ConfigFile::load(path, all_key_names());
			for (const auto& [k, v] : file.values())
				if (values_.count(k))
					values_[k] = v;
		}
		for (const auto& [k, opt] : options_)
			if (opt->count() > 0)
				values_[k] = flags_[k];
	}

	void set(const std::string& key, const std::string& v) { values_[key] = v; }

	const std::string& str(const std::string& key) const { return values_.at(key); }

	long integer(const std::string& key) const {
		const std::string& v = str(key);
		long out = 0;
		auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
		if (ec != std::errc() || p != v.data() + v.size())
			throw Error(Errc::ConfigError, "'" + key + "' expects an integer, got '" + v + "'");
		return out;
	}

	double real(const std::string& key) const {
		const std::string& v = str(key);
		char* end = nullptr;
		const double out = std::strtod(v.c_str(), &end);
		if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(out))
			throw Error(Errc::ConfigError, "'" + key + "' expects a number, got '" + v + "'");
		return out;
	}

	bool boolean(const std::string& key) const {
		const std::string& v = str(key);
		if (v == "true" || v == "1" || v == "yes" || v == "on")
			return true;
		if (v == "false" || v == "0" || v == "no" || v == "off")
			return false;
		throw Error(Errc::ConfigError, "'" + key + "' expects true or false, got '" + v + "'");
	}

private:
	std::map<std::string, std::string> defaults_;
	std::map<std::string, std::string> flags_;
	std::map<std::string, CLI::Option*> options_;
	std::map<std::string, std::string> values_;
};

int exit_code(Errc c) {
	switch (c) {
	case Errc::IoFailure:
	case Errc::UnsupportedFormat:
	case Errc::CorruptFile:
		return 2;
	case Errc::ConfigError:
	case Errc::DimensionMismatch:
	case Errc::InsufficientData:
	case Errc::NonColumnarMask:
	case Errc::TooFewPatches:
	case Errc::PlacementInfeasible:
	case Errc::EmptyRegion:
	case Errc::NoReliableColumns:
	case Errc::IndexOutOfRange:
		return 3;
	case Errc::RegionTooSmall:
	case Errc::CoverageGap:
	case Errc::InsufficientSupport:
	case Errc::UpsamplerFailed:
		return 4;
	}
	return 4;
}

pipeline::PipelineConfig pipeline_config(const Settings& s) {
	pipeline::PipelineConfig c;
	c.patch_w = static_cast<int>(s.integer("patch_w"));
	c.patch_h = static_cast<int>(s.integer("patch_h"));
	c.sparsity = static_cast<int>(s.integer("sparsity"));
	c.atoms = static_cast<int>(s.integer("atoms"));
	c.downsample = static_cast<int>(s.integer("downsample"));
	c.width_threshold = static_cast<int>(s.integer("width_threshold"));
	c.max_width = static_cast<int>(s.integer("max_width"));
	c.stride = static_cast<int>(s.integer("stride"));
	c.context_margin = static_cast<int>(s.integer("context_margin"));
	c.multiscale = s.boolean("multiscale");
	const std::string& up = s.str("upsampler");
	if (up == "bicubic")
		c.upsampler = pipeline::Upsampler::Bicubic;
	else if (up == "external")
		c.upsampler = pipeline::Upsampler::External;
	else
		throw Error(Errc::ConfigError, "'upsampler' must be bicubic or external, got '" + up + "'");
	c.upsampler_cmd = s.str("upsampler_cmd");
	c.validate();
	return c;
}

pipeline::ScanOptions scan_options(const Settings& s) {
	pipeline::ScanOptions o;
	o.loess.span = s.real("loess_span");
	o.loess.robust_iters = static_cast<int>(s.integer("robust_iters"));
	o.shadows.w_min = s.real("w_min");
	o.shadows.intensity_factor = s.real("intensity_factor");
	o.shadows.tissue_half_height = static_cast<int>(s.integer("tissue_half_height"));
	o.shadows.median_window = static_cast<int>(s.integer("median_window"));
	o.shadows.dilation = static_cast<int>(s.integer("dilation"));
	o.shadows.margin = static_cast<int>(s.integer("shadow_margin"));
	o.target_depth = static_cast<int>(s.integer("target_depth"));
	if (o.loess.span <= 0.0 || o.loess.span > 1.0)
		throw Error(Errc::ConfigError, "'loess_span' must lie in (0, 1]");
	return o;
}

std::uint64_t seed_of(const Settings& s) {
	const long v = s.integer("seed");
	if (v < 0)
		throw Error(Errc::ConfigError, "'seed' must be non-negative");
	return static_cast<std::uint64_t>(v);
}

struct LoadedDictionaries {
	std::optional<sparse::Dictionary> full, down;

	pipeline::Dictionaries view() const {
		return {full ? &*full : nullptr, down ? &*down : nullptr};
	}
};

LoadedDictionaries load_dictionaries(const Settings& s, bool need_down) {
	LoadedDictionaries d;
	if (s.str("dict_full").empty())
		throw Error(Errc::ConfigError, "no full-resolution dictionary configured (dict_full)");
	d.full = sparse::load_dictionary(s.str("dict_full"));
	if (!s.str("dict_down").empty())
		d.down = sparse::load_dictionary(s.str("dict_down"));
	else if (need_down)
		throw Error(Errc::ConfigError, "no low-scale dictionary configured (dict_down)");
	return d;
}

std::vector<fs::path> image_files(const fs::path& dir) {
	if (!fs::is_directory(dir))
		throw Error(Errc::IoFailure, "not a directory: " + dir.string());
	std::vector<fs::path> out;
	for (const auto& e : fs::directory_iterator(dir)) {
		if (!e.is_regular_file())
			continue;
		std::string ext = e.path().extension().string();
		std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
		if (ext == ".png" || ext == ".pgm")
			out.push_back(e.path());
	}
	std::sort(out.begin(), out.end());
	if (out.empty())
		throw Error(Errc::IoFailure, "no .png or .pgm images in " + dir.string());
	return out;
}

std::vector<Image> load_corpus(const fs::path& dir) {
	std::vector<Image> images;
	for (const auto& p : image_files(dir))
		images.push_back(load_image(p));
	return images;
}

int parse_scale(const std::string& s) {
	if (s == "full")
		return 1;
	if (s.rfind("down:", 0) == 0) {
		int n = 0;
		const char* b = s.data() + 5;
		auto [p, ec] = std::from_chars(b, s.data() + s.size(), n);
		if (ec == std::errc() && p == s.data() + s.size() && n >= 1)
			return n;
	}
	throw Error(Errc::ConfigError, "scale must be 'full' or 'down:N', got '" + s + "'");
}

/// "7-24", "7-24:3" (step) or "7,10,13".
std::vector<int> parse_widths(const std::string& s) {
	auto bad = [&] { return Error(Errc::ConfigError, "cannot parse widths '" + s + "'"); };
	auto num = [&](std::string_view t) {
		int v = 0;
		auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
		if (ec != std::errc() || p != t.data() + t.size())
			throw bad();
		return v;
	};
	std::vector<int> out;
	const auto dash = s.find('-');
	if (dash != std::string::npos) {
		std::string_view rest(s);
		int step = 1;
		if (const auto colon = s.find(':'); colon != std::string::npos) {
			step = num(rest.substr(colon + 1));
			rest = rest.substr(0, colon);
		}
		const int lo = num(rest.substr(0, dash));
		const int hi = num(rest.substr(dash + 1));
		if (step < 1 || hi < lo)
			throw bad();
		for (int w = lo; w <= hi; w += step)
			out.push_back(w);
		return out;
	}
	std::string_view rest(s);
	while (!rest.empty()) {
		const auto comma = rest.find(',');
		out.push_back(num(rest.substr(0, comma)));
		if (comma == std::string_view::npos)
			break;
		rest = rest.substr(comma + 1);
	}
	if (out.empty())
		throw bad();
	return out;
}

std::string format_metric(double v) {
	if (std::isinf(v))
		return v > 0 ? "inf" : "-inf";
	char buf[64];
	std::snprintf(buf, sizeof buf, "%.4f", v);
	std::string s = buf;
	while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.')
		s.pop_back();
	return s;
}

void write_text(const fs::path& path, const std::string& text) {
	std::ofstream out(path, std::ios::binary);
	if (!out || !(out << text))
		throw Error(Errc::IoFailure, "cannot write " + path.string());
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{"Vessel-shadow inpainting for OCT B-scans"};
	app.require_subcommand(1);
	app.fallthrough();
	std::string config_path;
	int threads = 0;
	app.add_option("--config", config_path, "key = value config file (default: $OCT_INPAINT_CONFIG)");
	app.add_option("--threads", threads, "worker threads (0: all cores)")->default_str("0");

	Settings train_s, inp_s, syn_s, sw_s, ph_s;

	// train-dict
	auto* train = app.add_subcommand("train-dict", "learn a dictionary from a directory of B-scans");
	std::string corpus_dir, scale = "full", dict_out;
	train->add_option("corpus", corpus_dir, "directory of .png/.pgm images")->required();
	train->add_option("--scale", scale, "full or down:N")->default_str("full");
	train->add_option("-o,--out", dict_out, "output dictionary path")->required();
	train_s.bind(train, kTrainKeys);
	train_s.bind(train, {{"atoms", "128", "dictionary size (M)"},
	                      {"sparsity", "2", "atoms per patch code (L)"},
	                      {"patch_w", "8", "patch width, px"},
	                      {"patch_h", "8", "patch height, px"}});
	train_s.bind(train, kCommonKeys);

	// inpaint
	auto* inp = app.add_subcommand("inpaint", "detect and inpaint vessel shadows in one B-scan");
	std::string in_path, out_path, mask_path, emit_mask;
	bool no_multiscale = false;
	int bit_depth = 16;
	inp->add_option("input", in_path, "input image")->required();
	inp->add_option("output", out_path, "output image (.png or .pgm)")->required();
	inp->add_option("--mask", mask_path, "use this mask instead of shadow detection (white = reliable)");
	inp->add_option("--emit-mask", emit_mask, "write the mask used");
	inp->add_flag("--no-multiscale", no_multiscale, "route every shadow through the single-scale branch");
	inp->add_option("--bit-depth", bit_depth, "output bit depth, 8 or 16")->default_str("16");
	inp_s.bind(inp, kPipelineKeys);
	inp_s.bind(inp, kPreprocKeys);

	// synth
	auto* syn = app.add_subcommand("synth", "add synthetic black shadows to an image");
	std::string synth_in, synth_out, synth_mask;
	eval::SynthParams sp;
	syn->add_option("--in", synth_in, "source image (default: a generated phantom)");
	syn->add_option("-o,--out", synth_out, "shadowed image")->required();
	syn->add_option("--mask-out", synth_mask, "mask of the synthetic shadows");
	syn->add_option("--count", sp.count, "number of shadows")->default_str("4");
	syn->add_option("--min-width", sp.min_width, "narrowest shadow, px")->default_str("7");
	syn->add_option("--max-width", sp.max_width, "widest shadow, px")->default_str("24");
	syn->add_option("--gap", sp.gap, "reliable columns between shadows")->default_str("16");
	syn->add_option("--edge-margin", sp.edge_margin, "reliable columns at each image edge")->default_str("8");
	syn_s.bind(syn, kCommonKeys);

	// eval
	auto* ev = app.add_subcommand("eval", "PSNR and SSIM of a test image against a reference");
	std::string ref_path, test_path, eval_mask;
	ev->add_option("reference", ref_path, "reference image")->required();
	ev->add_option("test", test_path, "test image")->required();
	ev->add_option("--mask", eval_mask, "restrict metrics to the shadowed (black) columns of this mask");

	// sweep
	auto* sw = app.add_subcommand("sweep", "PSNR/SSIM versus shadow width for several methods");
	std::string widths_spec = "7-24", methods_spec = "proposed,proposed-no-multiscale,baseline-interp";
	std::string images_dir, csv_out, plot_out, plot_metric = "psnr";
	eval::SweepOptions so;
	int phantoms = 4;
	sw->add_option("--widths", widths_spec, "widths as lo-hi[:step] or a comma list")->default_str("7-24");
	sw->add_option("--methods", methods_spec, "comma list of proposed, proposed-no-multiscale, baseline-interp")
	    ->default_str(methods_spec);
	sw->add_option("--images", images_dir, "directory of clean test images (default: generated phantoms)");
	sw->add_option("--phantoms", phantoms, "generated phantoms when --images is absent")->default_str("4");
	sw->add_option("--trials", so.trials, "trials per width")->default_str("3");
	sw->add_option("--shadows-per-image", so.shadows_per_image, "shadows per trial image")->default_str("3");
	sw->add_option("--gap", so.gap, "reliable columns between shadows")->default_str("16");
	sw->add_option("--edge-margin", so.edge_margin, "reliable columns at each image edge")->default_str("8");
	sw->add_flag("--full-image", so.full_image, "score the whole image instead of the shadowed columns");
	sw->add_option("-o,--out", csv_out, "CSV output (default: stdout)");
	sw->add_option("--plot", plot_out, "write a PNG plot of the metric against width");
	sw->add_option("--plot-metric", plot_metric, "psnr or ssim")->default_str("psnr");
	sw_s.bind(sw, kPipelineKeys);
	sw_s.bind(sw, kPreprocKeys);
	sw_s.bind(sw, kCommonKeys);

	// phantom
	auto* ph = app.add_subcommand("phantom", "write generated layered test B-scans");
	std::string phantom_dir;
	int phantom_count = 1;
	eval::PhantomParams pp;
	ph->add_option("-o,--out", phantom_dir, "output directory")->required();
	ph->add_option("--count", phantom_count, "number of images")->default_str("1");
	ph->add_option("--width", pp.width, "image width")->default_str("256");
	ph->add_option("--height", pp.height, "image height")->default_str("256");
	ph_s.bind(ph, kCommonKeys);

	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp& e) {
		return app.exit(e);
	} catch (const CLI::CallForAllHelp& e) {
		return app.exit(e);
	} catch (const CLI::ParseError& e) {
		app.exit(e);
		return 3;
	}

	try {
		Settings& settings = *train ? train_s : *inp ? inp_s : *syn ? syn_s : *sw ? sw_s : ph_s;
		settings.resolve(config_path);
#ifdef _OPENMP
		if (threads < 0)
			throw Error(Errc::ConfigError, "--threads must be >= 0");
		if (threads > 0)
			omp_set_num_threads(threads);
#endif

		if (*train) {
			const int n = parse_scale(scale);
			PatchSampling sampling;
			sampling.patch_w = static_cast<int>(settings.integer("patch_w"));
			sampling.patch_h = static_cast<int>(settings.integer("patch_h"));
			sampling.budget_per_image = static_cast<int>(settings.integer("budget"));
			sampling.variance_floor = settings.real("variance_floor");
			sampling.seed = seed_of(settings);
			sparse::KsvdOptions ko;
			ko.atoms = static_cast<int>(settings.integer("atoms"));
			ko.sparsity = static_cast<int>(settings.integer("sparsity"));
			ko.iterations = static_cast<int>(settings.integer("iterations"));
			ko.seed = sampling.seed;
			const std::vector<Image> corpus = load_corpus(corpus_dir);
			std::vector<Image> scaled;
			for (const Image& img : corpus)
				scaled.push_back(pipeline::downsample(img, n));
			const Eigen::MatrixXd patches = sample_training_patches(scaled, sampling);
			std::printf("images: %zu, training patches: %lld\n", corpus.size(), static_cast<long long>(patches.cols()));
			ko.scale_tag = n;
			const auto result = sparse::train_dictionary(patches, ko);
			save_dictionary(result.dict, dict_out);
			const double err = result.mse_history.empty() ? sparse::representation_mse(result.dict, patches, ko.sparsity)
			                                              : result.mse_history.back();
			std::printf("mean representation error: %.6e\n", err);
			return 0;
		}

		if (*inp) {
			if (no_multiscale)
				settings.set("multiscale", "false");
			if (bit_depth != 8 && bit_depth != 16)
				throw Error(Errc::ConfigError, "--bit-depth must be 8 or 16");
			const auto cfg = pipeline_config(settings);
			const auto opt = scan_options(settings);
			const Image img = load_image(in_path);
			std::optional<ShadowMask> given;
			if (!mask_path.empty())
				given = load_mask(mask_path);
			const auto dicts = load_dictionaries(settings, cfg.multiscale);
			pipeline::PipelineDiagnostics diag;
			const auto res = pipeline::inpaint_scan(img, given ? &*given : nullptr, dicts.view(), cfg, opt, &diag);
			save_image(res.output, out_path, bit_depth == 8 ? BitDepth::Eight : BitDepth::Sixteen);
			if (!emit_mask.empty())
				save_mask(res.mask, emit_mask);
			const auto shadows = preproc::shadow_intervals(res.mask);
			std::printf("shadows: %zu, narrow strips: %d, wide strips: %d, fallback patches: %zu\n", shadows.size(),
			            diag.narrow_strips, diag.wide_strips, diag.narrow.fallbacks + diag.wide_low.fallbacks);
			return 0;
		}

		if (*syn) {
			const std::uint64_t seed = seed_of(settings);
			const Image src = synth_in.empty() ? eval::make_phantom(seed) : load_image(synth_in);
			const auto r = eval::synth_shadows(src, sp, seed);
			save_image(r.image, synth_out);
			if (!synth_mask.empty())
				save_mask(r.mask, synth_mask);
			for (const auto& iv : r.shadows)
				std::printf("shadow %d %d\n", iv.start, iv.width);
			return 0;
		}

		if (*ev) {
			const Image ref = load_image(ref_path);
			const Image test = load_image(test_path);
			if (!ref.same_shape(test))
				throw Error(Errc::DimensionMismatch, "reference and test dimensions differ");
			eval::Region region = eval::Region::full();
			std::optional<ShadowMask> m;
			if (!eval_mask.empty()) {
				m = load_mask(eval_mask);
				if (!m->matches(ref))
					throw Error(Errc::DimensionMismatch, "mask and image dimensions differ");
				region = eval::Region::masked(*m);
			}
			std::printf("PSNR: %s, SSIM: %s\n", format_metric(eval::psnr(ref, test, region)).c_str(),
			            format_metric(eval::ssim(ref, test, region)).c_str());
			return 0;
		}

		if (*sw) {
			const auto cfg = pipeline_config(settings);
			const auto opt = scan_options(settings);
			so.scan = opt;
			const std::uint64_t seed = seed_of(settings);
			const std::vector<int> widths = parse_widths(widths_spec);
			std::vector<eval::Method> methods;
			{
				std::string_view rest(methods_spec);
				while (!rest.empty()) {
					const auto comma = rest.find(',');
					const std::string name(rest.substr(0, comma));
					const auto m = eval::parse_method(name);
					if (!m)
						throw Error(Errc::ConfigError, "unknown method '" + name + "'");
					methods.push_back(*m);
					if (comma == std::string_view::npos)
						break;
					rest = rest.substr(comma + 1);
				}
			}
			const bool needs_dicts = std::any_of(methods.begin(), methods.end(),
			                                     [](eval::Method m) { return m != eval::Method::BaselineInterp; });
			const bool needs_down = std::any_of(methods.begin(), methods.end(),
			                                    [](eval::Method m) { return m == eval::Method::Proposed; });
			LoadedDictionaries dicts;
			if (needs_dicts)
				dicts = load_dictionaries(settings, needs_down && cfg.multiscale);
			if (phantoms < 1)
				throw Error(Errc::ConfigError, "--phantoms must be >= 1");
			const std::vector<Image> images =
			    images_dir.empty() ? eval::make_phantom_corpus(static_cast<std::size_t>(phantoms), seed)
			                       : load_corpus(images_dir);
			const auto report = eval::width_sweep(images, widths, methods, seed, cfg, dicts.view(), so);
			for (const auto& e : report.errors)
				std::fprintf(stderr, "trial failed: %s\n", e.c_str());
			const std::string csv = eval::sweep_csv(report);
			if (csv_out.empty())
				std::fputs(csv.c_str(), stdout);
			else
				write_text(csv_out, csv);
			if (!plot_out.empty()) {
				if (plot_metric != "psnr" && plot_metric != "ssim")
					throw Error(Errc::ConfigError, "--plot-metric must be psnr or ssim");
				save_image(eval::render_sweep_plot(report, plot_metric == "ssim"), plot_out, BitDepth::Eight);
			}
			return report.errors.empty() ? 0 : 4;
		}

		if (*ph) {
			if (phantom_count < 1)
				throw Error(Errc::ConfigError, "--count must be >= 1");
			fs::create_directories(phantom_dir);
			const auto images = eval::make_phantom_corpus(static_cast<std::size_t>(phantom_count), seed_of(settings), pp);
			for (std::size_t i = 0; i < images.size(); ++i) {
				char name[32];
				std::snprintf(name, sizeof name, "phantom_%03zu.png", i);
				save_image(images[i], fs::path(phantom_dir) / name);
			}
			return 0;
		}
	} catch (const Error& e) {
		std::fprintf(stderr, "octinpaint: %s\n", e.what());
		return exit_code(e.code());
	} catch (const fs::filesystem_error& e) {
		std::fprintf(stderr, "octinpaint: %s\n", e.what());
		return 2;
	} catch (const std::exception& e) {
		std::fprintf(stderr, "octinpaint: %s\n", e.what());
		return 4;
	}
	return 0;
}
