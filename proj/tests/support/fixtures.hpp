#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "dirm/model.hpp"

namespace testsupport {

inline std::string fixture_path(const std::string& name) {
    return std::string(DIRM_FIXTURE_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline dirm::Model load_fixture(const std::string& name) {
    return dirm::parse_model(read_file(fixture_path(name)));
}

inline dirm::Word word(const dirm::Model& m, const std::string& csv) {
    return dirm::parse_word(m, csv);
}

inline dirm::StateSet states_by_name(const dirm::Model& m,
                                     const std::vector<std::string>& names) {
    dirm::StateSet out;
    for (const auto& n : names) out.push_back(*m.find_state(n));
    dirm::detail::sort_unique(out);
    return out;
}

} // namespace testsupport
