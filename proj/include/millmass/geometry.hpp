#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace millmass {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Maps any angle into [0, 2pi).
double wrap_two_pi(double angle);

struct Vec2
{
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr bool operator==(const Vec2&) const = default;
};

inline constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline Vec2 polar(double radius, double angle) { return {radius * std::cos(angle), radius * std::sin(angle)}; }

struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3& operator+=(const Vec3& o)
    {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr bool operator==(const Vec3&) const = default;

    constexpr Vec2 xy() const { return {x, y}; }
    bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline constexpr Vec3 cross(const Vec3& a, const Vec3& b)
{
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

// Row-major 3x3 matrix.
struct Mat3
{
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static constexpr Mat3 identity() { return {}; }

    constexpr double operator()(int r, int c) const { return m[static_cast<std::size_t>(r * 3 + c)]; }
    constexpr double& operator()(int r, int c) { return m[static_cast<std::size_t>(r * 3 + c)]; }

    constexpr Vec3 operator*(const Vec3& v) const
    {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }
    Mat3 operator*(const Mat3& o) const;
    Mat3 transposed() const;
    double determinant() const;
};

// Rigid placement: maps local coordinates p to origin + rotation * p.
struct Frame
{
    Vec3 origin;
    Mat3 rotation;

    static Frame identity() { return {}; }

    Vec3 apply(const Vec3& local) const { return origin + rotation * local; }
    Vec3 apply_direction(const Vec3& local) const { return rotation * local; }
    Vec3 inverse_apply(const Vec3& world) const { return rotation.transposed() * (world - origin); }
    Vec3 inverse_direction(const Vec3& world) const { return rotation.transposed() * world; }

    // R * R^T = I within tol and det(R) = +1.
    bool is_valid(double tol = 1e-9) const;
};

// Rotation by `angle_deg` about the unit `axis` (Rodrigues), placed at `origin`.
// Throws std::invalid_argument when |axis| deviates from 1 by more than 1e-9.
Frame tilt_transform(double angle_deg, const Vec3& axis, const Vec3& origin = {});

struct Circle2
{
    Vec2 center;
    double radius = 1.0;

    Vec2 point_at(double angle) const { return center + polar(radius, angle); }
};

struct LineHit
{
    Vec2 point;
    double t = 0.0;  // point = p0 + t * (p1 - p0)
};

// Intersections of the infinite line through p0, p1 with the circle, sorted by t.
// A grazing line (|r^2 - dist^2| <= 1e-12 mm^2) yields one point.
std::vector<LineHit> circle_line_intersections(const Circle2& c, const Vec2& p0, const Vec2& p1);

// Area of b not covered by a, for two circles of equal radius.
double circle_circle_lune_area(const Circle2& a, const Circle2& b);

// Intersection points of two circles (0, 1 or 2 points).
std::vector<Vec2> circle_circle_intersections(const Circle2& a, const Circle2& b);

// Points on the circle from phi_start to phi_end (either direction), equally spaced
// with an angular gap <= max_step. End points are placed at exactly the given angles.
std::vector<Vec2> arc_polyline(const Circle2& c, double phi_start, double phi_end, double max_step);

struct Polygon2
{
    std::vector<Vec2> vertices;
};

struct AreaCentroid
{
    double area = 0.0;
    Vec2 centroid;
};

// Signed shoelace area and first moments (positive for counterclockwise loops).
struct AreaMoments
{
    double area = 0.0;
    double mx = 0.0;  // integral of x over the region
    double my = 0.0;  // integral of y over the region

    AreaMoments& operator+=(const AreaMoments& o)
    {
        area += o.area;
        mx += o.mx;
        my += o.my;
        return *this;
    }
};
AreaMoments signed_area_moments(std::span<const Vec2> loop);

// Area (made positive) and centroid of a simple polygon.
// Throws DegeneratePolygon when |area| < 1e-12 mm^2 or fewer than 3 vertices.
AreaCentroid polygon_area_centroid(const Polygon2& p);

// Proper or touching intersection of segments ab and cd; returns the point if any.
std::optional<Vec2> segment_intersection(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

// Distance from p to the segment ab.
double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b);

} // namespace millmass
