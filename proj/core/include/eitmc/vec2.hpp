#pragma once

#include <cmath>

namespace eitmc {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
    Vec2& operator+=(Vec2 b) { x += b.x; y += b.y; return *this; }
    Vec2& operator-=(Vec2 b) { x -= b.x; y -= b.y; return *this; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline Vec2 normalized(Vec2 a) { return a / norm(a); }
// 90-degree counter-clockwise rotation
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

// Symmetric 2x2 matrix, stored as the upper triangle.
struct Mat2Sym {
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;

    static Mat2Sym identity() { return {1.0, 0.0, 1.0}; }
    static Mat2Sym diagonal(double d1, double d2) { return {d1, 0.0, d2}; }
    static Mat2Sym isotropic(double c) { return {c, 0.0, c}; }

    friend Mat2Sym operator+(Mat2Sym a, Mat2Sym b) {
        return {a.a11 + b.a11, a.a12 + b.a12, a.a22 + b.a22};
    }
    friend Mat2Sym operator*(double s, Mat2Sym a) {
        return {s * a.a11, s * a.a12, s * a.a22};
    }
    Vec2 operator*(Vec2 v) const {
        return {a11 * v.x + a12 * v.y, a12 * v.x + a22 * v.y};
    }
    double quad(Vec2 v) const {
        return a11 * v.x * v.x + 2.0 * a12 * v.x * v.y + a22 * v.y * v.y;
    }
    double trace() const { return a11 + a22; }
    double det() const { return a11 * a22 - a12 * a12; }

    // Eigenvalues of a symmetric 2x2, smallest first.
    void eigenvalues(double& lo, double& hi) const {
        const double m = 0.5 * (a11 + a22);
        const double r = std::sqrt(0.25 * (a11 - a22) * (a11 - a22) + a12 * a12);
        lo = m - r;
        hi = m + r;
    }
};

// General 2x2 matrix (used for diffusion factors, which are lower triangular).
struct Mat2 {
    double m11 = 0.0, m12 = 0.0;
    double m21 = 0.0, m22 = 0.0;

    Vec2 operator*(Vec2 v) const {
        return {m11 * v.x + m12 * v.y, m21 * v.x + m22 * v.y};
    }
    Mat2Sym aat() const {  // A * A^T (symmetric by construction)
        return {m11 * m11 + m12 * m12,
                m11 * m21 + m12 * m22,
                m21 * m21 + m22 * m22};
    }
};

}  // namespace eitmc
