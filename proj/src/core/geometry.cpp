#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <iterator>
#include <vector>

namespace weakseg {

bool PixelRect::contains(const PixelRect& other) const {
  if (other.empty()) return true;
  return other.x >= x && other.y >= y && other.right() <= right() &&
         other.bottom() <= bottom();
}

PixelRect PixelRect::intersect(const PixelRect& other) const {
  const int x0 = std::max(x, other.x);
  const int y0 = std::max(y, other.y);
  const int x1 = std::min(right(), other.right());
  const int y1 = std::min(bottom(), other.bottom());
  if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
  return {x0, y0, x1 - x0, y1 - y0};
}

const char* to_string(Script script) {
  switch (script) {
    case Script::kLatin: return "latin";
    case Script::kNonLatin: return "non_latin";
    case Script::kUnknown: return "unknown";
  }
  return "unknown";
}

Script script_from_string(const std::string& text) {
  if (text == "latin") return Script::kLatin;
  if (text == "non_latin") return Script::kNonLatin;
  if (text == "unknown") return Script::kUnknown;
  throw format_error("unknown script '" + text + "'");
}

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double shoelace(std::initializer_list<Point> pts) {
  double twice = 0.0;
  for (auto a = pts.begin(); a != pts.end(); ++a) {
    auto b = std::next(a) == pts.end() ? pts.begin() : std::next(a);
    twice += a->x * b->y - b->x * a->y;
  }
  return 0.5 * std::abs(twice);
}

// Proper crossing of segments ab and cd; writes the intersection point.
bool crosses(const Point& a, const Point& b, const Point& c, const Point& d, Point& at) {
  const double d1 = cross(c, d, a), d2 = cross(c, d, b);
  const double d3 = cross(a, b, c), d4 = cross(a, b, d);
  if (!(((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))) {
    return false;
  }
  const double t = d1 / (d1 - d2);
  at = {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
  return true;
}

}  // namespace

double polygon_area(const Quad& q) {
  // A self-crossing quad encloses two triangles whose signed areas cancel
  // in the shoelace sum, so measure the lobes separately.
  Point p;
  if (crosses(q[0], q[1], q[2], q[3], p)) return shoelace({p, q[1], q[2]}) + shoelace({p, q[3], q[0]});
  if (crosses(q[1], q[2], q[3], q[0], p)) return shoelace({p, q[2], q[3]}) + shoelace({p, q[0], q[1]});
  return shoelace({q[0], q[1], q[2], q[3]});
}

PixelRect TextBox::covering_rect() const {
  double x0, y0, x1, y1;
  if (const auto* r = std::get_if<Rect>(&geometry)) {
    x0 = r->x;
    y0 = r->y;
    x1 = r->x + r->w;
    y1 = r->y + r->h;
  } else {
    const Quad& q = std::get<Quad>(geometry);
    x0 = x1 = q[0].x;
    y0 = y1 = q[0].y;
    for (const Point& p : q) {
      x0 = std::min(x0, p.x);
      y0 = std::min(y0, p.y);
      x1 = std::max(x1, p.x);
      y1 = std::max(y1, p.y);
    }
  }
  const int ix = static_cast<int>(std::floor(x0));
  const int iy = static_cast<int>(std::floor(y0));
  return {ix, iy, static_cast<int>(std::ceil(x1)) - ix, static_cast<int>(std::ceil(y1)) - iy};
}

void TextBox::validate() const {
  if (const auto* r = std::get_if<Rect>(&geometry)) {
    if (!(std::isfinite(r->x) && std::isfinite(r->y) && r->w > 0.0 && r->h > 0.0 &&
          std::isfinite(r->w) && std::isfinite(r->h))) {
      throw invalid_argument("degenerate box");
    }
    return;
  }
  const Quad& q = std::get<Quad>(geometry);
  for (const Point& p : q) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw invalid_argument("degenerate quad");
  }
  if (!(polygon_area(q) > 0.0)) throw invalid_argument("degenerate quad");
}

bool is_qualifying(const TextBox& box) {
  return box.legible && box.machine_printed && box.script == Script::kLatin;
}

PixelRect enlarge_box(const PixelRect& box, double factor, Size image) {
  if (box.w <= 0 || box.h <= 0) throw invalid_argument("degenerate box");
  if (!(factor >= 0.0)) throw invalid_argument("enlargement factor must be >= 0");
  // The epsilon keeps representation noise (20 * 1.3 = 26.000000000000004)
  // from adding a spurious pixel.
  auto grow = [factor](int extent) {
    const double target = static_cast<double>(extent) * (1.0 + factor);
    return std::max(extent, static_cast<int>(std::ceil(target - 1e-9)));
  };
  const int w = grow(box.w);
  const int h = grow(box.h);
  const int x0 = box.x - (w - box.w) / 2;
  const int y0 = box.y - (h - box.h) / 2;
  const PixelRect grown{x0, y0, w, h};
  return grown.intersect({0, 0, image.width, image.height});
}

namespace {

void mark_centres(BinaryMask& mask, int row, double x_lo, double x_hi) {
  // Pixel px has its centre at px + 0.5.
  const int first = std::max(0, static_cast<int>(std::ceil(x_lo - 0.5)));
  const int last = std::min(mask.width() - 1, static_cast<int>(std::floor(x_hi - 0.5)));
  for (int px = first; px <= last; ++px) mask.at(px, row) = 1;
}

}  // namespace

BinaryMask rasterize_quad(const Quad& quad, Size image) {
  for (const Point& p : quad) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw invalid_argument("degenerate quad");
  }
  if (!(polygon_area(quad) > 0.0)) throw invalid_argument("degenerate quad");

  BinaryMask mask(image);
  std::vector<double> crossings;
  crossings.reserve(4);
  for (int row = 0; row < image.height; ++row) {
    const double yc = row + 0.5;
    crossings.clear();
    for (std::size_t i = 0; i < 4; ++i) {
      const Point& a = quad[i];
      const Point& b = quad[(i + 1) % 4];
      // Half-open in y so a shared vertex is counted once.
      if ((a.y <= yc && yc < b.y) || (b.y <= yc && yc < a.y)) {
        crossings.push_back(a.x + ((yc - a.y) * (b.x - a.x)) / (b.y - a.y));
      }
    }
    std::sort(crossings.begin(), crossings.end());
    for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
      mark_centres(mask, row, crossings[i], crossings[i + 1]);
    }
    // Centres lying exactly on an edge are inside.
    for (std::size_t i = 0; i < 4; ++i) {
      const Point& a = quad[i];
      const Point& b = quad[(i + 1) % 4];
      if (yc < std::min(a.y, b.y) || yc > std::max(a.y, b.y)) continue;
      if (a.y == b.y) {
        mark_centres(mask, row, std::min(a.x, b.x), std::max(a.x, b.x));
      } else {
        const double x = a.x + ((yc - a.y) * (b.x - a.x)) / (b.y - a.y);
        mark_centres(mask, row, x, x);
      }
    }
  }
  return mask;
}

BinaryMask rasterize_box(const TextBox& box, Size image) {
  if (box.is_quad()) return rasterize_quad(std::get<Quad>(box.geometry), image);
  box.validate();
  const Rect& r = std::get<Rect>(box.geometry);
  BinaryMask mask(image);
  const int y_first = std::max(0, static_cast<int>(std::ceil(r.y - 0.5)));
  const int y_last = std::min(image.height - 1, static_cast<int>(std::floor(r.y + r.h - 0.5)));
  for (int row = y_first; row <= y_last; ++row) mark_centres(mask, row, r.x, r.x + r.w);
  return mask;
}

}  // namespace weakseg
