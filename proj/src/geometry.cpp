#include "millmass/geometry.hpp"

#include "millmass/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace millmass {

double wrap_two_pi(double angle)
{
    double a = std::fmod(angle, kTwoPi);
    if (a < 0.0)
        a += kTwoPi;
    if (a >= kTwoPi)
        a = 0.0;
    return a;
}

Mat3 Mat3::operator*(const Mat3& o) const
{
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
        {
            double s = 0.0;
            for (int k = 0; k < 3; ++k)
                s += (*this)(i, k) * o(k, j);
            r(i, j) = s;
        }
    return r;
}

Mat3 Mat3::transposed() const
{
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r(i, j) = (*this)(j, i);
    return r;
}

double Mat3::determinant() const
{
    const auto& a = m;
    return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
           a[2] * (a[3] * a[7] - a[4] * a[6]);
}

bool Frame::is_valid(double tol) const
{
    const Mat3 rrt = rotation * rotation.transposed();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (std::abs(rrt(i, j) - (i == j ? 1.0 : 0.0)) > tol)
                return false;
    return std::abs(rotation.determinant() - 1.0) <= tol && origin.is_finite();
}

Frame tilt_transform(double angle_deg, const Vec3& axis, const Vec3& origin)
{
    if (std::abs(norm(axis) - 1.0) > 1e-9)
        throw std::invalid_argument("tilt axis must be a unit vector");

    const double a = deg2rad(angle_deg);
    const double c = std::cos(a);
    const double s = std::sin(a);
    const double t = 1.0 - c;
    const auto [x, y, z] = axis;

    Frame f;
    f.origin = origin;
    f.rotation.m = {t * x * x + c,     t * x * y - s * z, t * x * z + s * y,
                    t * x * y + s * z, t * y * y + c,     t * y * z - s * x,
                    t * x * z - s * y, t * y * z + s * x, t * z * z + c};
    return f;
}

std::vector<LineHit> circle_line_intersections(const Circle2& c, const Vec2& p0, const Vec2& p1)
{
    const Vec2 d = p1 - p0;
    const double len2 = dot(d, d);
    if (len2 == 0.0)
        throw std::invalid_argument("circle_line_intersections: p0 == p1");

    // Foot of the perpendicular from the center, then offset along the line.
    const double t_foot = dot(c.center - p0, d) / len2;
    const Vec2 foot = p0 + d * t_foot;
    const Vec2 off = c.center - foot;
    const double disc = c.radius * c.radius - dot(off, off);

    std::vector<LineHit> hits;
    if (disc < -1e-12)
        return hits;
    if (disc <= 1e-12)
    {
        hits.push_back({foot, t_foot});
        return hits;
    }
    const double dt = std::sqrt(disc / len2);
    hits.push_back({p0 + d * (t_foot - dt), t_foot - dt});
    hits.push_back({p0 + d * (t_foot + dt), t_foot + dt});
    return hits;
}

double circle_circle_lune_area(const Circle2& a, const Circle2& b)
{
    const double r = b.radius;
    const double d = norm(b.center - a.center);
    const double disk = kPi * r * r;
    if (d >= 2.0 * r)
        return disk;
    const double lens = 2.0 * r * r * std::acos(d / (2.0 * r)) - 0.5 * d * std::sqrt(4.0 * r * r - d * d);
    return std::max(0.0, disk - lens);
}

std::vector<Vec2> circle_circle_intersections(const Circle2& a, const Circle2& b)
{
    const Vec2 dv = b.center - a.center;
    const double d = norm(dv);
    std::vector<Vec2> pts;
    if (d == 0.0 || d > a.radius + b.radius || d < std::abs(a.radius - b.radius))
        return pts;
    const double along = (a.radius * a.radius - b.radius * b.radius + d * d) / (2.0 * d);
    const double h2 = a.radius * a.radius - along * along;
    const Vec2 u = dv / d;
    const Vec2 base = a.center + u * along;
    if (h2 <= 0.0)
    {
        pts.push_back(base);
        return pts;
    }
    const double h = std::sqrt(h2);
    const Vec2 perp{-u.y, u.x};
    pts.push_back(base + perp * h);
    pts.push_back(base - perp * h);
    return pts;
}

std::vector<Vec2> arc_polyline(const Circle2& c, double phi_start, double phi_end, double max_step)
{
    if (!(max_step > 0.0))
        throw std::invalid_argument("arc_polyline: max_step must be positive");
    const double sweep = phi_end - phi_start;
    if (sweep == 0.0)
        throw std::invalid_argument("arc_polyline: empty sweep");

    const auto segments = static_cast<std::size_t>(std::max(1.0, std::ceil(std::abs(sweep) / max_step - 1e-12)));
    std::vector<Vec2> pts;
    pts.reserve(segments + 1);
    for (std::size_t k = 0; k < segments; ++k)
        pts.push_back(c.point_at(phi_start + sweep * static_cast<double>(k) / static_cast<double>(segments)));
    pts.push_back(c.point_at(phi_end));
    return pts;
}

AreaMoments signed_area_moments(std::span<const Vec2> loop)
{
    AreaMoments out;
    const std::size_t n = loop.size();
    if (n < 3)
        return out;
    // Shift to the first vertex so the sums stay well conditioned far from the origin.
    const Vec2 ref = loop[0];
    double a2 = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const Vec2 p = loop[i] - ref;
        const Vec2 q = loop[(i + 1) % n] - ref;
        const double w = cross(p, q);
        a2 += w;
        sx += (p.x + q.x) * w;
        sy += (p.y + q.y) * w;
    }
    out.area = 0.5 * a2;
    out.mx = sx / 6.0 + ref.x * out.area;
    out.my = sy / 6.0 + ref.y * out.area;
    return out;
}

AreaCentroid polygon_area_centroid(const Polygon2& p)
{
    if (p.vertices.size() < 3)
        throw DegeneratePolygon("polygon needs at least 3 vertices");
    const AreaMoments am = signed_area_moments(p.vertices);
    if (std::abs(am.area) < 1e-12)
        throw DegeneratePolygon("polygon area below 1e-12 mm^2");
    // Orientation normalization: the moments flip sign together with the area.
    return {std::abs(am.area), {am.mx / am.area, am.my / am.area}};
}

std::optional<Vec2> segment_intersection(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d)
{
    const Vec2 r = b - a;
    const Vec2 s = d - c;
    const double denom = cross(r, s);
    if (denom == 0.0)
        return std::nullopt;  // parallel or collinear; collinear overlap is not reported
    const double t = cross(c - a, s) / denom;
    const double u = cross(c - a, r) / denom;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0)
        return std::nullopt;
    return a + r * t;
}

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b)
{
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0)
        return norm(p - a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + ab * t));
}

} // namespace millmass
