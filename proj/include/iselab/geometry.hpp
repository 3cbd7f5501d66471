#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace iselab {

// Error with a stable machine-readable code ("EmptyDomain", "Stuck", ...).
struct Error : std::runtime_error {
    std::string code;
    Error(std::string c, const std::string& msg)
        : std::runtime_error(c + ": " + msg), code(std::move(c)) {}
};

using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return static_cast<double>(r); }

// Exact conversion; every finite double is a dyadic rational.
inline Rat rat_from_double(double d) {
    if (!std::isfinite(d)) throw Error("BadNumber", "non-finite coordinate");
    return Rat(d);
}

// "1/32" or plain decimal.
inline Rat parse_rational(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return rat_from_double(std::stod(s));
    long long num = std::stoll(s.substr(0, slash));
    long long den = std::stoll(s.substr(slash + 1));
    if (den == 0) throw Error("BadNumber", "zero denominator in " + s);
    return Rat(num, den);
}

struct RatPt {
    Rat x, y;
};

struct Vec2i {
    int x = 0, y = 0;
    friend bool operator==(const Vec2i& a, const Vec2i& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(const Vec2i& a, const Vec2i& b) { return !(a == b); }
    friend bool operator<(const Vec2i& a, const Vec2i& b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    }
};

struct Vec2iHash {
    size_t operator()(const Vec2i& v) const {
        return std::hash<std::uint64_t>()((std::uint64_t(std::uint32_t(v.x)) << 32) | std::uint32_t(v.y));
    }
};

// Simple polygon, vertices in counterclockwise order.
struct Polygon {
    std::vector<RatPt> pts;

    enum class Where { Inside, Boundary, Outside };

    Where locate(const RatPt& t) const {
        const size_t n = pts.size();
        int crossings = 0;
        for (size_t i = 0; i < n; ++i) {
            const RatPt& p = pts[i];
            const RatPt& q = pts[(i + 1) % n];
            // on-segment test
            Rat cross = (q.x - p.x) * (t.y - p.y) - (q.y - p.y) * (t.x - p.x);
            if (cross == 0) {
                Rat dot = (t.x - p.x) * (q.x - p.x) + (t.y - p.y) * (q.y - p.y);
                Rat len2 = (q.x - p.x) * (q.x - p.x) + (q.y - p.y) * (q.y - p.y);
                if (dot >= 0 && dot <= len2) return Where::Boundary;
            }
            // ray toward +x, half-open in y
            bool up = p.y <= t.y && q.y > t.y;
            bool down = q.y <= t.y && p.y > t.y;
            if (up || down) {
                // x coordinate of the edge at height t.y
                Rat xint = p.x + (t.y - p.y) * (q.x - p.x) / (q.y - p.y);
                if (xint > t.x) ++crossings;
            }
        }
        return (crossings % 2 == 1) ? Where::Inside : Where::Outside;
    }

    bool contains(const RatPt& t) const { return locate(t) == Where::Inside; }

    static Polygon rectangle(const Rat& x0, const Rat& y0, const Rat& x1, const Rat& y1) {
        Polygon p;
        p.pts = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
        return p;
    }
};

}  // namespace iselab
