#ifndef OCTINPAINT_CONFIG_HPP
#define OCTINPAINT_CONFIG_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "error.hpp"

namespace octinpaint {

/// Plain `key = value` settings. Blank lines and lines starting with '#'
/// are skipped; keys outside `known` are rejected by name.
class ConfigFile {
public:
	static ConfigFile parse(const std::string& text, const std::set<std::string>& known) {
		ConfigFile cfg;
		std::istringstream in(text);
		std::string line;
		int lineno = 0;
		while (std::getline(in, line)) {
			++lineno;
			const std::string t = trim(line);
			if (t.empty() || t[0] == '#')
				continue;
			const auto eq = t.find('=');
			if (eq == std::string::npos)
				throw Error(Errc::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
			const std::string key = trim(t.substr(0, eq));
			const std::string value = trim(t.substr(eq + 1));
			if (!known.count(key))
				throw Error(Errc::ConfigError, "unknown config key '" + key + "' on line " + std::to_string(lineno));
			cfg.values_[key] = value;
		}
		return cfg;
	}

	static ConfigFile load(const std::filesystem::path& path, const std::set<std::string>& known) {
		std::ifstream in(path);
		if (!in)
			throw Error(Errc::IoFailure, "cannot open config " + path.string());
		std::stringstream ss;
		ss << in.rdbuf();
		return parse(ss.str(), known);
	}

	bool has(const std::string& key) const { return values_.count(key) != 0; }
	const std::string& get(const std::string& key) const { return values_.at(key); }
	const std::map<std::string, std::string>& values() const { return values_; }

private:
	static std::string trim(const std::string& s) {
		const auto b = s.find_first_not_of(" \t\r\n");
		if (b == std::string::npos)
			return {};
		const auto e = s.find_last_not_of(" \t\r\n");
		return s.substr(b, e - b + 1);
	}

	std::map<std::string, std::string> values_;
};

} // namespace octinpaint

#endif // OCTINPAINT_CONFIG_HPP
