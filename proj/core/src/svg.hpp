#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace multimax::detail {

/// Minimal SVG 1.1 document builder with fixed two-decimal coordinates so
/// that output is byte-stable.
class SvgWriter {
 public:
  SvgWriter(double width, double height);

  void rect(double x, double y, double w, double h, std::string_view fill, double opacity = 1.0,
            std::string_view stroke = {}, std::string_view dash = {});
  void line(double x1, double y1, double x2, double y2, std::string_view stroke,
            double width = 1.0, std::string_view dash = {});
  void polyline(const std::vector<std::pair<double, double>>& points, std::string_view stroke,
                double width = 1.0);
  void circle(double cx, double cy, double r, std::string_view fill);
  void text(double x, double y, std::string_view content, int size,
            std::string_view anchor = "start", std::string_view fill = "#222222");
  /// Raw passthrough for <title>/<desc>.
  void title(std::string_view content);

  [[nodiscard]] std::string finish(std::string_view font_family) const;
  [[nodiscard]] double width() const noexcept { return width_; }
  [[nodiscard]] double height() const noexcept { return height_; }

 private:
  double width_;
  double height_;
  std::string body_;
};

std::string xml_escape(std::string_view text);

}  // namespace multimax::detail
