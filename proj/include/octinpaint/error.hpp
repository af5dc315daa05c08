#ifndef OCTINPAINT_ERROR_HPP
#define OCTINPAINT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace octinpaint {

enum class Errc {
	RegionTooSmall,
	CoverageGap,
	UnsupportedFormat,
	CorruptFile,
	IoFailure,
	DimensionMismatch,
	InsufficientData,
	NonColumnarMask,
	InsufficientSupport,
	IndexOutOfRange,
	TooFewPatches,
	UpsamplerFailed,
	ConfigError,
	PlacementInfeasible,
	EmptyRegion,
	NoReliableColumns,
};

inline const char* errc_name(Errc c) {
	switch (c) {
	case Errc::RegionTooSmall: return "RegionTooSmall";
	case Errc::CoverageGap: return "CoverageGap";
	case Errc::UnsupportedFormat: return "UnsupportedFormat";
	case Errc::CorruptFile: return "CorruptFile";
	case Errc::IoFailure: return "IoFailure";
	case Errc::DimensionMismatch: return "DimensionMismatch";
	case Errc::InsufficientData: return "InsufficientData";
	case Errc::NonColumnarMask: return "NonColumnarMask";
	case Errc::InsufficientSupport: return "InsufficientSupport";
	case Errc::IndexOutOfRange: return "IndexOutOfRange";
	case Errc::TooFewPatches: return "TooFewPatches";
	case Errc::UpsamplerFailed: return "UpsamplerFailed";
	case Errc::ConfigError: return "ConfigError";
	case Errc::PlacementInfeasible: return "PlacementInfeasible";
	case Errc::EmptyRegion: return "EmptyRegion";
	case Errc::NoReliableColumns: return "NoReliableColumns";
	}
	return "Unknown";
}

/// Every failure raised by the library carries one of the Errc codes.
class Error : public std::runtime_error {
public:
	Error(Errc code, const std::string& what)
	    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

	Errc code() const noexcept { return code_; }

private:
	Errc code_;
};

} // namespace octinpaint

#endif // OCTINPAINT_ERROR_HPP
