#include "svg.hpp"

#include <fmt/format.h>

namespace multimax::detail {

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

SvgWriter::SvgWriter(double width, double height) : width_(width), height_(height) {}

void SvgWriter::rect(double x, double y, double w, double h, std::string_view fill,
                     double opacity, std::string_view stroke, std::string_view dash) {
  body_ += fmt::format(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="{}")",
                       x, y, w, h, fill);
  if (opacity != 1.0) body_ += fmt::format(R"( fill-opacity="{:.2f}")", opacity);
  if (!stroke.empty()) body_ += fmt::format(R"( stroke="{}" stroke-width="1")", stroke);
  if (!dash.empty()) body_ += fmt::format(R"( stroke-dasharray="{}")", dash);
  body_ += "/>\n";
}

void SvgWriter::line(double x1, double y1, double x2, double y2, std::string_view stroke,
                     double width, std::string_view dash) {
  body_ += fmt::format(
      R"(<line x1="{:.2f}" y1="{:.2f}" x2="{:.2f}" y2="{:.2f}" stroke="{}" stroke-width="{:.2f}")",
      x1, y1, x2, y2, stroke, width);
  if (!dash.empty()) body_ += fmt::format(R"( stroke-dasharray="{}")", dash);
  body_ += "/>\n";
}

void SvgWriter::polyline(const std::vector<std::pair<double, double>>& points,
                         std::string_view stroke, double width) {
  std::string coords;
  for (const auto& [x, y] : points) {
    if (!coords.empty()) coords.push_back(' ');
    coords += fmt::format("{:.2f},{:.2f}", x, y);
  }
  body_ += fmt::format(
      R"(<polyline points="{}" fill="none" stroke="{}" stroke-width="{:.2f}"/>)", coords, stroke,
      width);
  body_ += "\n";
}

void SvgWriter::circle(double cx, double cy, double r, std::string_view fill) {
  body_ += fmt::format(R"(<circle cx="{:.2f}" cy="{:.2f}" r="{:.2f}" fill="{}"/>)", cx, cy, r,
                       fill);
  body_ += "\n";
}

void SvgWriter::text(double x, double y, std::string_view content, int size,
                     std::string_view anchor, std::string_view fill) {
  body_ += fmt::format(
      R"(<text x="{:.2f}" y="{:.2f}" font-size="{}" text-anchor="{}" fill="{}">{}</text>)", x, y,
      size, anchor, fill, xml_escape(content));
  body_ += "\n";
}

void SvgWriter::title(std::string_view content) {
  body_ += fmt::format("<title>{}</title>\n", xml_escape(content));
}

std::string SvgWriter::finish(std::string_view font_family) const {
  std::string out = R"(<?xml version="1.0" encoding="UTF-8"?>)";
  out += "\n";
  out += fmt::format(
      R"(<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.2f}" height="{:.2f}" viewBox="0 0 {:.2f} {:.2f}" font-family="{}">)",
      width_, height_, width_, height_, xml_escape(font_family));
  out += "\n";
  out += fmt::format(R"(<rect x="0.00" y="0.00" width="{:.2f}" height="{:.2f}" fill="#ffffff"/>)",
                     width_, height_);
  out += "\n";
  out += body_;
  out += "</svg>\n";
  return out;
}

}  // namespace multimax::detail
