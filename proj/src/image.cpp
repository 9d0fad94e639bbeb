#include "shapetrack/image.hpp"

#include <algorithm>
#include <filesystem>
#include <stdexcept>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace shapetrack {

double GrayImage::sample_clamped(double x, double y) const {
    const double cx = std::clamp(x, 0.0, static_cast<double>(width - 1));
    const double cy = std::clamp(y, 0.0, static_cast<double>(height - 1));
    const int x0 = std::min(static_cast<int>(cx), width - 2 >= 0 ? width - 2 : 0);
    const int y0 = std::min(static_cast<int>(cy), height - 2 >= 0 ? height - 2 : 0);
    const int x1 = std::min(x0 + 1, width - 1);
    const int y1 = std::min(y0 + 1, height - 1);
    const double fx = cx - x0;
    const double fy = cy - y0;
    const double top = (1.0 - fx) * at(x0, y0) + fx * at(x1, y0);
    const double bot = (1.0 - fx) * at(x0, y1) + fx * at(x1, y1);
    return (1.0 - fy) * top + fy * bot;
}

GrayImage load_frame(const std::string& path) {
    if (!std::filesystem::exists(path)) {
        throw std::runtime_error("load_frame: no such file: " + path);
    }
    cv::Mat raw = cv::imread(path, cv::IMREAD_UNCHANGED);
    if (raw.empty()) {
        throw std::runtime_error("load_frame: cannot decode: " + path);
    }
    if (raw.cols <= 0 || raw.rows <= 0) {
        throw std::runtime_error("load_frame: zero-sized image: " + path);
    }

    cv::Mat img;
    raw.convertTo(img, CV_64F);

    GrayImage out(img.cols, img.rows);
    if (img.channels() == 1) {
        for (int y = 0; y < img.rows; ++y) {
            const double* row = img.ptr<double>(y);
            for (int x = 0; x < img.cols; ++x) out.at(x, y) = row[x];
        }
    } else if (img.channels() == 3 || img.channels() == 4) {
        // OpenCV decodes interleaved BGR(A).
        const int ch = img.channels();
        for (int y = 0; y < img.rows; ++y) {
            const double* row = img.ptr<double>(y);
            for (int x = 0; x < img.cols; ++x) {
                const double b = row[x * ch + 0];
                const double g = row[x * ch + 1];
                const double r = row[x * ch + 2];
                out.at(x, y) = 0.299 * r + 0.587 * g + 0.114 * b;
            }
        }
    } else {
        throw std::runtime_error("load_frame: unsupported channel count: " + path);
    }
    return out;
}

void save_png(const GrayImage& img, const std::string& path) {
    if (img.empty()) throw std::runtime_error("save_png: empty image");
    cv::Mat m(img.height, img.width, CV_8U);
    for (int y = 0; y < img.height; ++y) {
        uint8_t* row = m.ptr<uint8_t>(y);
        for (int x = 0; x < img.width; ++x) {
            row[x] = static_cast<uint8_t>(std::clamp(std::lround(img.at(x, y)), 0L, 255L));
        }
    }
    if (!cv::imwrite(path, m)) {
        throw std::runtime_error("save_png: cannot write: " + path);
    }
}

}  // namespace shapetrack
