#ifndef OCTINPAINT_DICTIONARY_IO_HPP
#define OCTINPAINT_DICTIONARY_IO_HPP

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <vector>

#include "sparse.hpp"

namespace octinpaint::sparse {

// On-disk layout, all integers and floats little-endian:
//   "OCTD" | u16 version (1) | u32 atom_len | u32 n_atoms | u32 scale_tag |
//   atom_len*n_atoms float32, atom after atom.
inline constexpr std::uint16_t kDictionaryVersion = 1;
inline constexpr std::size_t kDictionaryHeaderBytes = 4 + 2 + 4 + 4 + 4;

namespace detail {

inline void put_u16(std::vector<unsigned char>& b, std::uint16_t v) {
	b.push_back(static_cast<unsigned char>(v & 0xff));
	b.push_back(static_cast<unsigned char>(v >> 8));
}

inline void put_u32(std::vector<unsigned char>& b, std::uint32_t v) {
	for (int i = 0; i < 4; ++i)
		b.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

inline std::uint32_t get_u32(const unsigned char* p) {
	return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
	       (std::uint32_t(p[3]) << 24);
}

} // namespace detail

inline std::vector<unsigned char> encode_dictionary(const Dictionary& dict) {
	std::vector<unsigned char> b{'O', 'C', 'T', 'D'};
	detail::put_u16(b, kDictionaryVersion);
	detail::put_u32(b, static_cast<std::uint32_t>(dict.atom_len()));
	detail::put_u32(b, static_cast<std::uint32_t>(dict.n_atoms()));
	detail::put_u32(b, static_cast<std::uint32_t>(dict.scale_tag));
	b.reserve(b.size() + 4 * dict.atoms.size());
	for (Eigen::Index k = 0; k < dict.atoms.cols(); ++k) {
		for (Eigen::Index i = 0; i < dict.atoms.rows(); ++i) {
			const float f = static_cast<float>(dict.atoms(i, k));
			std::uint32_t bits;
			std::memcpy(&bits, &f, 4);
			detail::put_u32(b, bits);
		}
	}
	return b;
}

/// Atoms are re-normalized in double precision after decoding, since the
/// float32 payload only holds unit norm to about 1e-7.
inline Dictionary decode_dictionary(const std::vector<unsigned char>& b) {
	if (b.size() < kDictionaryHeaderBytes || std::memcmp(b.data(), "OCTD", 4) != 0)
		throw Error(Errc::UnsupportedFormat, "missing OCTD magic");
	const std::uint16_t version = static_cast<std::uint16_t>(b[4] | (b[5] << 8));
	if (version != kDictionaryVersion)
		throw Error(Errc::UnsupportedFormat, "unsupported dictionary version " + std::to_string(version));
	const std::uint32_t len = detail::get_u32(b.data() + 6);
	const std::uint32_t atoms = detail::get_u32(b.data() + 10);
	const std::uint32_t scale = detail::get_u32(b.data() + 14);
	const std::uint64_t payload = std::uint64_t(len) * atoms * 4;
	if (len == 0 || atoms == 0 || scale == 0 || b.size() != kDictionaryHeaderBytes + payload)
		throw Error(Errc::CorruptFile, "dictionary payload size does not match header");
	Eigen::MatrixXd m(len, atoms);
	const unsigned char* p = b.data() + kDictionaryHeaderBytes;
	for (std::uint32_t k = 0; k < atoms; ++k) {
		for (std::uint32_t i = 0; i < len; ++i, p += 4) {
			const std::uint32_t bits = detail::get_u32(p);
			float f;
			std::memcpy(&f, &bits, 4);
			m(i, k) = f;
		}
	}
	return Dictionary::from_atoms(std::move(m), static_cast<int>(scale));
}

inline void save_dictionary(const Dictionary& dict, const std::filesystem::path& path) {
	const auto bytes = encode_dictionary(dict);
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw Error(Errc::IoFailure, "cannot write " + path.string());
	out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
	if (!out)
		throw Error(Errc::IoFailure, "short write to " + path.string());
}

inline Dictionary load_dictionary(const std::filesystem::path& path) {
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw Error(Errc::IoFailure, "cannot open " + path.string());
	std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
	return decode_dictionary(bytes);
}

} // namespace octinpaint::sparse

#endif // OCTINPAINT_DICTIONARY_IO_HPP
