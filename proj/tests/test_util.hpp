#pragma once

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

// Shared helpers for the unit suites.

inline std::string temp_path(const std::string& name) {
    return std::string("bm_test_") + name;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}
