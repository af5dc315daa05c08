// Stand-in external upsampler for tests: bicubic by default, with modes
// that misbehave on purpose.

#include <octinpaint/image_io.hpp>
#include <octinpaint/resample.hpp>

#include <CLI11.hpp>

int main(int argc, char** argv) {
	CLI::App app{"test upsampler"};
	int scale = 1;
	std::string in, out, mode = "ok";
	app.add_option("--scale", scale)->required();
	app.add_option("--in", in)->required();
	app.add_option("--out", out)->required();
	app.add_option("--mode", mode, "ok | wrong-size | fail | no-output");
	CLI11_PARSE(app, argc, argv);

	if (mode == "fail")
		return 1;
	if (mode == "no-output")
		return 0;
	const auto img = octinpaint::load_image(in);
	auto up = octinpaint::pipeline::upsample_bicubic(img, scale);
	if (mode == "wrong-size")
		up = octinpaint::Image(up.width() + 1, up.height());
	octinpaint::save_image(up, out);
	return 0;
}
