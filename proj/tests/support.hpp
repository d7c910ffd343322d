#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#ifndef HKB_DATA_DIR
#error "HKB_DATA_DIR must point at the bundled data directory"
#endif

inline std::string read_data(const std::string& name) {
    std::ifstream in(std::string(HKB_DATA_DIR) + "/" + name);
    if (!in) throw std::runtime_error("missing data file " + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
