#include "recapit/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "recapit/error.hpp"

namespace recapit {

namespace {

constexpr double kEdgeEps = 1e-12;

double cross(Point o, Point a, Point b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(Point a, Point b, Point p) {
    if (std::abs(cross(a, b, p)) > kEdgeEps) return false;
    return p.x >= std::min(a.x, b.x) - kEdgeEps && p.x <= std::max(a.x, b.x) + kEdgeEps &&
           p.y >= std::min(a.y, b.y) - kEdgeEps && p.y <= std::max(a.y, b.y) + kEdgeEps;
}

int orientation(Point a, Point b, Point c) {
    const double v = cross(a, b, c);
    if (v > kEdgeEps) return 1;
    if (v < -kEdgeEps) return -1;
    return 0;
}

bool segments_intersect(Point p1, Point p2, Point q1, Point q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

}  // namespace

bool point_in_polygon(std::span<const Point> polygon, Point p) {
    const std::size_t n = polygon.size();
    if (n < 3) return false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        if (on_segment(polygon[j], polygon[i], p)) return true;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point a = polygon[i];
        const Point b = polygon[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

bool polygon_self_intersects(std::span<const Point> polygon) {
    const std::size_t n = polygon.size();
    if (n < 4) {
        // a triangle can only be degenerate (collinear)
        return n == 3 && orientation(polygon[0], polygon[1], polygon[2]) == 0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Point a1 = polygon[i];
        const Point a2 = polygon[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(a1, a2, polygon[j], polygon[(j + 1) % n])) return true;
        }
    }
    return false;
}

Homography::Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

Homography::Homography(const std::array<double, 9>& m) : m_(m) {
    for (double v : m_) {
        if (!std::isfinite(v)) throw ValidationError("homography has non-finite entries");
    }
    if (std::abs(determinant()) <= 1e-12) {
        throw ValidationError("homography is not invertible");
    }
}

Homography Homography::scale(double sx, double sy) {
    return Homography({sx, 0, 0, 0, sy, 0, 0, 0, 1});
}

double Homography::determinant() const {
    const auto& a = m_;
    return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
           a[2] * (a[3] * a[7] - a[4] * a[6]);
}

Homography Homography::inverse() const {
    const auto& a = m_;
    const double det = determinant();
    std::array<double, 9> inv{
        (a[4] * a[8] - a[5] * a[7]) / det, (a[2] * a[7] - a[1] * a[8]) / det,
        (a[1] * a[5] - a[2] * a[4]) / det, (a[5] * a[6] - a[3] * a[8]) / det,
        (a[0] * a[8] - a[2] * a[6]) / det, (a[2] * a[3] - a[0] * a[5]) / det,
        (a[3] * a[7] - a[4] * a[6]) / det, (a[1] * a[6] - a[0] * a[7]) / det,
        (a[0] * a[4] - a[1] * a[3]) / det,
    };
    return Homography(inv);
}

std::optional<Point> try_apply_homography(const Homography& h, Point p) {
    const auto& m = h.matrix();
    const double hx = m[0] * p.x + m[1] * p.y + m[2];
    const double hy = m[3] * p.x + m[4] * p.y + m[5];
    const double hw = m[6] * p.x + m[7] * p.y + m[8];
    if (std::abs(hw) < 1e-9) return std::nullopt;
    return Point{hx / hw, hy / hw};
}

Point apply_homography(const Homography& h, Point p) {
    auto q = try_apply_homography(h, p);
    if (!q) throw ValidationError("point maps to infinity under homography");
    return *q;
}

}  // namespace recapit
