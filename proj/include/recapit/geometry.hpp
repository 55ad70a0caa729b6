#pragma once

#include <array>
#include <optional>
#include <span>

namespace recapit {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

// Ray-casting point-in-polygon. Points on an edge or vertex count as inside.
bool point_in_polygon(std::span<const Point> polygon, Point p);

// True when two non-adjacent edges of the closed polygon intersect or touch.
bool polygon_self_intersects(std::span<const Point> polygon);

// Projective map between camera pixels and normalized working-area
// coordinates. Row-major 3x3.
class Homography {
public:
    Homography();  // identity
    explicit Homography(const std::array<double, 9>& m);

    static Homography scale(double sx, double sy);

    const std::array<double, 9>& matrix() const noexcept { return m_; }
    double determinant() const;
    Homography inverse() const;

    friend bool operator==(const Homography&, const Homography&) = default;

private:
    std::array<double, 9> m_;
};

// Returns (hx/hw, hy/hw); throws ValidationError when |hw| < 1e-9.
Point apply_homography(const Homography& h, Point p);

// Same as apply_homography but yields nullopt for points mapped to infinity.
std::optional<Point> try_apply_homography(const Homography& h, Point p);

}  // namespace recapit
