#pragma once

#include "polybanach/space.hpp"

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

namespace polybanach {

namespace detail {

// Exact counterclockwise angular order around the origin: quadrant first,
// then the cross product sign. No floating point.
inline bool angular_less(const Vec& a, const Vec& b) {
  auto half = [](const Vec& v) { return v(1) > 0 || (v(1) == 0 && v(0) > 0) ? 0 : 1; };
  const int ha = half(a), hb = half(b);
  if (ha != hb) return ha < hb;
  const Rational cross = a(0) * b(1) - a(1) * b(0);
  if (cross != 0) return cross > 0;
  return lex_less(a, b);
}

inline Integer lcm_int(const Integer& a, const Integer& b) {
  if (a == 0 || b == 0) return 1;
  return a / gcd(a, b) * b;
}

}  // namespace detail

/// Renders the unit ball of a 2-dimensional space as an SVG polygon. The
/// scale is the least common multiple of all vertex-coordinate denominators,
/// so every emitted polygon coordinate is an exact integer; the scale is
/// recorded in the data-scale attribute. Facet labels sit at edge midpoints.
inline std::string render_ball_svg(const PolyhedralSpace& s) {
  if (s.dimension() != 2)
    throw std::invalid_argument("render: only 2-dimensional balls are supported (projection is out of scope)");

  std::vector<Vec> verts = s.ball_vertices().points();
  std::sort(verts.begin(), verts.end(), detail::angular_less);

  Integer scale = 1;
  for (const auto& v : verts) {
    scale = detail::lcm_int(scale, denominator(v(0)));
    scale = detail::lcm_int(scale, denominator(v(1)));
  }
  // Keep the drawing a sensible size on screen.
  while (scale < 100) scale *= 10;

  auto sx = [&](const Rational& q) {
    Rational scaled = q * Rational(scale);
    return numerator(scaled).str();
  };

  Rational maxc(0);
  for (const auto& v : verts) {
    for (int k = 0; k < 2; ++k) {
      Rational a = boost::multiprecision::abs(Rational(v(k)));
      if (a > maxc) maxc = a;
    }
  }
  const Rational span = maxc * Rational(scale) * Rational(6, 5);
  const Integer extent = numerator(span) / denominator(span) + 1;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-" << extent << " -" << extent << " " << 2 * extent
      << " " << 2 * extent << "\" data-scale=\"" << scale << "\">\n";
  svg << "  <line x1=\"-" << extent << "\" y1=\"0\" x2=\"" << extent << "\" y2=\"0\" stroke=\"#bbb\" stroke-width=\""
      << extent / 200 + 1 << "\"/>\n";
  svg << "  <line x1=\"0\" y1=\"-" << extent << "\" x2=\"0\" y2=\"" << extent << "\" stroke=\"#bbb\" stroke-width=\""
      << extent / 200 + 1 << "\"/>\n";
  svg << "  <polygon points=\"";
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (i) svg << " ";
    svg << sx(verts[i](0)) << "," << sx(verts[i](1));
  }
  svg << "\" fill=\"#8fb4d9\" fill-opacity=\"0.5\" stroke=\"#1d4e79\" stroke-width=\"" << extent / 100 + 1 << "\"/>\n";

  // One label per facet at the midpoint of its edge.
  const Integer font = extent / 12 + 1;
  for (const auto& row : s.ball_facets().rows()) {
    std::vector<const Vec*> tight;
    for (const auto& v : verts)
      if (row.normal.dot(v) == row.offset) tight.push_back(&v);
    if (tight.size() != 2) continue;
    const Vec mid = (*tight[0] + *tight[1]) / 2;
    svg << "  <text x=\"" << sx(mid(0)) << "\" y=\"" << sx(mid(1)) << "\" font-size=\"" << font
        << "\" fill=\"#333\">" << rational_to_string(row.normal(0)) << "x+" << rational_to_string(row.normal(1))
        << "y&#8804;" << rational_to_string(row.offset) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace polybanach
