#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace lfc {

struct GrayPng {
    int width = 0, height = 0;
    int bit_depth = 0;  // 8 or 16
    std::vector<uint16_t> pixels;
    std::map<std::string, std::string> text;  // tEXt chunks
};

GrayPng read_gray_png(const std::string& path);
void write_gray_png(const std::string& path, int width, int height, int bit_depth,
                    const std::vector<uint16_t>& pixels,
                    const std::map<std::string, std::string>& text = {});

}  // namespace lfc
