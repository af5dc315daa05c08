#ifndef OCTINPAINT_TESTS_SUPPORT_HPP
#define OCTINPAINT_TESTS_SUPPORT_HPP

#include <octinpaint/octinpaint.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <random>

namespace testsupport {

using namespace octinpaint;

inline Eigen::MatrixXd random_unit_columns(int rows, int cols, std::mt19937_64& rng) {
	std::normal_distribution<double> g(0.0, 1.0);
	Eigen::MatrixXd d(rows, cols);
	for (int j = 0; j < cols; ++j) {
		for (int i = 0; i < rows; ++i)
			d(i, j) = g(rng);
		d.col(j).normalize();
	}
	return d;
}

inline double coherence(const Eigen::MatrixXd& d) {
	const Eigen::MatrixXd g = d.transpose() * d;
	double mu = 0.0;
	for (int i = 0; i < g.rows(); ++i)
		for (int j = 0; j < g.cols(); ++j)
			if (i != j)
				mu = std::max(mu, std::abs(g(i, j)));
	return mu;
}

/// Unit-norm dictionary with mutual coherence below `target`, found by
/// alternating between shrinking large Gram entries and projecting back to
/// a rank-`rows` Gram matrix.
inline Eigen::MatrixXd low_coherence_dictionary(int rows, int cols, double target, std::mt19937_64& rng) {
	for (int attempt = 0; attempt < 50; ++attempt) {
		Eigen::MatrixXd d = random_unit_columns(rows, cols, rng);
		const double aim = 0.95 * target;
		for (int it = 0; it < 2000; ++it) {
			if (coherence(d) < target)
				return d;
			Eigen::MatrixXd g = d.transpose() * d;
			for (int i = 0; i < cols; ++i)
				for (int j = 0; j < cols; ++j)
					if (i != j && std::abs(g(i, j)) > aim)
						g(i, j) = std::copysign(aim, g(i, j));
			Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
			const Eigen::VectorXd lam = es.eigenvalues().tail(rows).cwiseMax(0.0);
			const Eigen::MatrixXd v = es.eigenvectors().rightCols(rows);
			d = lam.cwiseSqrt().asDiagonal() * v.transpose();
			for (int j = 0; j < cols; ++j)
				d.col(j).normalize();
		}
	}
	throw std::runtime_error("no low-coherence dictionary found");
}

/// Dictionaries trained once per process on a small phantom corpus.
struct PhantomDictionaries {
	sparse::Dictionary full;
	sparse::Dictionary down;
	pipeline::Dictionaries view() const { return {&full, &down}; }
};

inline const PhantomDictionaries& phantom_dictionaries() {
	static const PhantomDictionaries dicts = [] {
		const auto corpus = eval::make_phantom_corpus(6, 1234);
		PatchSampling s;
		s.budget_per_image = 3000;
		s.seed = 11;
		sparse::KsvdOptions o;
		o.atoms = 128;
		o.sparsity = 2;
		o.iterations = 10;
		o.seed = 7;
		PhantomDictionaries d;
		d.full = train_from_images(corpus, 1, s, o).dict;
		d.down = train_from_images(corpus, 4, s, o).dict;
		return d;
	}();
	return dicts;
}

inline Image random_image(int w, int h, std::mt19937_64& rng) {
	std::uniform_real_distribution<double> u(0.0, 1.0);
	Image img(w, h);
	for (double& v : img.pixels())
		v = u(rng);
	return img;
}

} // namespace testsupport

#endif // OCTINPAINT_TESTS_SUPPORT_HPP
