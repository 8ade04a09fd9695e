#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "maltls/bytes.hpp"

namespace testutil {

inline std::string fixtures_dir() { return MALTLS_FIXTURES_DIR; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string read_fixture(const std::string& name) {
    return read_file(fixtures_dir() + "/" + name);
}

inline nlohmann::json manifest() {
    return nlohmann::json::parse(read_fixture("manifest.json"));
}

inline maltls::Bytes from_hex(const std::string& hex) {
    maltls::Bytes out;
    for (size_t i = 0; i + 1 < hex.size(); i += 2)
        out.push_back(static_cast<uint8_t>(std::stoi(hex.substr(i, 2), nullptr, 16)));
    return out;
}

}  // namespace testutil
