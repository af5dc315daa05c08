#ifndef OCTINPAINT_SPARSE_HPP
#define OCTINPAINT_SPARSE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace octinpaint::sparse {

/// Atom matrix (atom_len x n_atoms), one unit-norm atom per column.
/// `scale_tag` is the downsampling factor of the images it was trained on
/// (1 = full resolution).
struct Dictionary {
	Eigen::MatrixXd atoms;
	int scale_tag = 1;

	int atom_len() const noexcept { return static_cast<int>(atoms.rows()); }
	int n_atoms() const noexcept { return static_cast<int>(atoms.cols()); }
	bool overcomplete() const noexcept { return atom_len() < n_atoms(); }

	/// Normalizes every column; zero columns are rejected.
	static Dictionary from_atoms(Eigen::MatrixXd atoms, int scale_tag = 1) {
		for (Eigen::Index k = 0; k < atoms.cols(); ++k) {
			const double n = atoms.col(k).norm();
			if (!(n > 0.0))
				throw Error(Errc::DimensionMismatch, "dictionary atom " + std::to_string(k) + " has zero norm");
			atoms.col(k) /= n;
		}
		return {std::move(atoms), scale_tag};
	}

	bool unit_norm(double tol = 1e-9) const {
		for (Eigen::Index k = 0; k < atoms.cols(); ++k)
			if (std::abs(atoms.col(k).norm() - 1.0) > tol)
				return false;
		return true;
	}
};

/// Sparse coefficient vector: atom indices in selection order with their
/// coefficients.
struct SparseCode {
	std::vector<int> indices;
	std::vector<double> coeffs;

	std::size_t size() const noexcept { return indices.size(); }
	bool empty() const noexcept { return indices.empty(); }
};

inline constexpr double kResidualTol = 1e-9;
inline constexpr double kRidge = 1e-12;

namespace detail {

// Least squares over the selected columns. Column-pivoted QR when the
// support has full rank, ridge-regularized normal equations otherwise.
inline Eigen::VectorXd solve_support(const Eigen::MatrixXd& sub, const Eigen::VectorXd& y) {
	Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
	if (qr.rank() == sub.cols())
		return qr.solve(y);
	Eigen::MatrixXd g = sub.transpose() * sub;
	g.diagonal().array() += kRidge;
	return g.ldlt().solve(sub.transpose() * y);
}

// Greedy OMP. `select_scale`, when non-empty, multiplies each correlation
// before the argmax (used to compare atoms at unit norm after row deletion);
// atoms with a zero scale are never selected.
inline SparseCode omp_core(const Eigen::MatrixXd& D, const Eigen::VectorXd& y, int L,
                           const Eigen::VectorXd& select_scale) {
	SparseCode code;
	if (y.norm() < kResidualTol)
		return code;
	const int m = static_cast<int>(D.cols());
	std::vector<char> used(m, 0);
	Eigen::VectorXd residual = y;
	Eigen::MatrixXd sub(D.rows(), 0);
	Eigen::VectorXd coeffs;
	while (static_cast<int>(code.indices.size()) < std::min(L, m)) {
		Eigen::VectorXd corr = D.transpose() * residual;
		if (select_scale.size())
			corr.array() *= select_scale.array();
		int best = -1;
		double best_abs = 0.0;
		for (int k = 0; k < m; ++k) {
			if (used[k] || (select_scale.size() && select_scale[k] == 0.0))
				continue;
			const double a = std::abs(corr[k]);
			if (a > best_abs) {
				best_abs = a;
				best = k;
			}
		}
		if (best < 0 || best_abs <= 1e-15)
			break;
		used[best] = 1;
		code.indices.push_back(best);
		sub.conservativeResize(Eigen::NoChange, sub.cols() + 1);
		sub.col(sub.cols() - 1) = D.col(best);
		coeffs = solve_support(sub, y);
		residual = y - sub * coeffs;
		if (residual.norm() < kResidualTol)
			break;
	}
	code.coeffs.assign(coeffs.data(), coeffs.data() + coeffs.size());
	return code;
}

} // namespace detail

/// Orthogonal matching pursuit with at most L atoms.
inline SparseCode omp(const Dictionary& dict, const Eigen::VectorXd& y, int L) {
	if (y.size() != dict.atom_len())
		throw Error(Errc::DimensionMismatch, "signal length " + std::to_string(y.size()) + " != atom length " +
		                                         std::to_string(dict.atom_len()));
	if (L < 1)
		throw Error(Errc::DimensionMismatch, "sparsity must be at least 1");
	return detail::omp_core(dict.atoms, y, L, Eigen::VectorXd());
}

/// Minimum number of kept rows for masked coding.
inline int support_floor(int L) { return std::max(2 * L, 8); }

/// OMP on the rows flagged in `keep` (nonzero = reliable). Atoms are compared
/// at unit norm over the kept rows; the returned coefficients fit the
/// un-normalized kept rows, so `reconstruct` yields the full patch directly.
inline SparseCode masked_omp(const Dictionary& dict, const Eigen::VectorXd& y, const Eigen::VectorXd& keep, int L) {
	if (y.size() != dict.atom_len() || keep.size() != dict.atom_len())
		throw Error(Errc::DimensionMismatch, "signal or keep vector length differs from atom length");
	const int kept = static_cast<int>((keep.array() != 0.0).count());
	if (kept == dict.atom_len())
		return omp(dict, y, L);
	if (kept < support_floor(L))
		throw Error(Errc::InsufficientSupport, std::to_string(kept) + " kept rows, need " +
		                                          std::to_string(support_floor(L)));
	if (L < 1)
		throw Error(Errc::DimensionMismatch, "sparsity must be at least 1");

	Eigen::MatrixXd sub(kept, dict.n_atoms());
	Eigen::VectorXd ys(kept);
	for (int i = 0, r = 0; i < dict.atom_len(); ++i) {
		if (keep[i] == 0.0)
			continue;
		sub.row(r) = dict.atoms.row(i);
		ys[r] = y[i];
		++r;
	}
	Eigen::VectorXd scale(dict.n_atoms());
	for (int k = 0; k < dict.n_atoms(); ++k) {
		const double n = sub.col(k).norm();
		scale[k] = n > 1e-12 ? 1.0 / n : 0.0;
	}
	return detail::omp_core(sub, ys, L, scale);
}

/// D * alpha over all atom_len rows.
inline Eigen::VectorXd reconstruct(const Dictionary& dict, const SparseCode& code) {
	Eigen::VectorXd out = Eigen::VectorXd::Zero(dict.atom_len());
	for (std::size_t i = 0; i < code.size(); ++i) {
		const int k = code.indices[i];
		if (k < 0 || k >= dict.n_atoms())
			throw Error(Errc::IndexOutOfRange, "atom index " + std::to_string(k) + " out of range");
		out += code.coeffs[i] * dict.atoms.col(k);
	}
	return out;
}

inline double squared_error(const Dictionary& dict, const Eigen::VectorXd& y, const SparseCode& code) {
	return (y - reconstruct(dict, code)).squaredNorm();
}

struct KsvdOptions {
	int atoms = 128;
	int sparsity = 2;
	int iterations = 20;
	std::uint64_t seed = 0;
	int scale_tag = 1;
	/// Called after every iteration with (iteration, mean squared error per entry).
	std::function<void(int, double)> on_iteration;
};

struct KsvdResult {
	Dictionary dict;
	/// Mean squared representation error per entry after each iteration.
	std::vector<double> mse_history;
};

/// K-SVD dictionary learning over the columns of `patches`.
///
/// Each iteration codes every patch with OMP, keeping the previous code when
/// it still represents the patch better under the current atoms, then
/// updates atoms one at a time by a rank-1 fit of the residual restricted to
/// the patches that use it. Atoms used by no patch are re-seeded from the
/// worst-represented patch. Under these rules the error never increases.
inline KsvdResult train_dictionary(const Eigen::MatrixXd& patches, const KsvdOptions& opt) {
	const int len = static_cast<int>(patches.rows());
	const int count = static_cast<int>(patches.cols());
	const int m = opt.atoms;
	if (m < 1 || opt.sparsity < 1)
		throw Error(Errc::TooFewPatches, "atom count and sparsity must be positive");
	if (count < m)
		throw Error(Errc::TooFewPatches, std::to_string(count) + " patches for " + std::to_string(m) + " atoms");

	// Initial atoms: distinct random patches.
	std::mt19937_64 rng(opt.seed);
	std::vector<int> order(count);
	std::iota(order.begin(), order.end(), 0);
	std::shuffle(order.begin(), order.end(), rng);
	Eigen::MatrixXd init(len, m);
	int filled = 0;
	std::vector<int> repeats;
	for (int idx : order) {
		if (filled == m)
			break;
		const double n = patches.col(idx).norm();
		if (!(n > 0.0))
			continue;
		Eigen::VectorXd a = patches.col(idx) / n;
		bool dup = false;
		for (int k = 0; k < filled && !dup; ++k)
			dup = (init.col(k) - a).squaredNorm() < 1e-24;
		if (dup) {
			repeats.push_back(idx);
			continue;
		}
		init.col(filled++) = a;
	}
	for (std::size_t i = 0; filled < m && i < repeats.size(); ++i)
		init.col(filled++) = patches.col(repeats[i]).normalized();
	if (filled < m)
		throw Error(Errc::TooFewPatches, "fewer than " + std::to_string(m) + " nonzero patches");

	KsvdResult result{Dictionary{std::move(init), opt.scale_tag}, {}};
	Dictionary& dict = result.dict;
	std::vector<SparseCode> codes(count);
	std::vector<double> err(count, 0.0);

	for (int iter = 0; iter < opt.iterations; ++iter) {
		// Sparse coding stage.
#pragma omp parallel for schedule(static)
		for (int j = 0; j < count; ++j) {
			const Eigen::VectorXd y = patches.col(j);
			SparseCode fresh = omp(dict, y, opt.sparsity);
			const double e_new = squared_error(dict, y, fresh);
			if (iter > 0) {
				const double e_old = squared_error(dict, y, codes[j]);
				if (e_old <= e_new) {
					err[j] = e_old;
					continue;
				}
			}
			codes[j] = std::move(fresh);
			err[j] = e_new;
		}

		// Users of each atom, with the slot of that atom inside each code.
		std::vector<std::vector<std::pair<int, int>>> users(m);
		for (int j = 0; j < count; ++j)
			for (std::size_t s = 0; s < codes[j].size(); ++s)
				users[codes[j].indices[s]].push_back({j, static_cast<int>(s)});

		std::vector<int> worst(count);
		std::iota(worst.begin(), worst.end(), 0);
		std::stable_sort(worst.begin(), worst.end(), [&](int a, int b) { return err[a] > err[b]; });
		std::size_t next_worst = 0;

		// Atom update stage.
		for (int k = 0; k < m; ++k) {
			const auto& u = users[k];
			if (u.empty()) {
				while (next_worst < worst.size() && !(patches.col(worst[next_worst]).norm() > 0.0))
					++next_worst;
				if (next_worst < worst.size())
					dict.atoms.col(k) = patches.col(worst[next_worst++]).normalized();
				continue;
			}
			Eigen::MatrixXd e(len, static_cast<Eigen::Index>(u.size()));
			for (std::size_t i = 0; i < u.size(); ++i) {
				const auto [j, slot] = u[i];
				Eigen::VectorXd r = patches.col(j);
				for (std::size_t s = 0; s < codes[j].size(); ++s)
					if (static_cast<int>(s) != slot)
						r -= codes[j].coeffs[s] * dict.atoms.col(codes[j].indices[s]);
				e.col(static_cast<Eigen::Index>(i)) = r;
			}
			if (e.squaredNorm() == 0.0)
				continue;
			Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(e * e.transpose());
			Eigen::VectorXd atom = eig.eigenvectors().col(len - 1);
			if (atom.dot(dict.atoms.col(k)) < 0)
				atom = -atom;
			atom.normalize();
			const Eigen::VectorXd x = e.transpose() * atom;
			dict.atoms.col(k) = atom;
			for (std::size_t i = 0; i < u.size(); ++i)
				codes[u[i].first].coeffs[u[i].second] = x[static_cast<Eigen::Index>(i)];
		}

#pragma omp parallel for schedule(static)
		for (int j = 0; j < count; ++j)
			err[j] = squared_error(dict, patches.col(j), codes[j]);
		double total = 0.0;
		for (double e : err)
			total += e;
		const double mse = total / (static_cast<double>(count) * len);
		result.mse_history.push_back(mse);
		if (opt.on_iteration)
			opt.on_iteration(iter, mse);
	}
	return result;
}

/// Mean squared representation error per entry of `patches` under `dict`.
inline double representation_mse(const Dictionary& dict, const Eigen::MatrixXd& patches, int L) {
	std::vector<double> err(patches.cols());
#pragma omp parallel for schedule(static)
	for (Eigen::Index j = 0; j < patches.cols(); ++j)
		err[j] = squared_error(dict, patches.col(j), omp(dict, patches.col(j), L));
	double total = 0.0;
	for (double e : err)
		total += e;
	return patches.size() ? total / static_cast<double>(patches.size()) : 0.0;
}

} // namespace octinpaint::sparse

#endif // OCTINPAINT_SPARSE_HPP
